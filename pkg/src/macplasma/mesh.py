"""Rectilinear MAC (marker-and-cell) meshes in one and two dimensions.

The primal mesh partitions a rectangle into cells; scalar unknowns live on
cells, the i-th velocity component lives on the faces normal to direction i.
Each face ``sigma`` carries a dual cell ``D_sigma`` built from the two half
cells adjacent to it, and the dual cells of one direction tile the domain
shifted by half a cell.  All face-indexed data is stored with a global
orientation: a face value refers to the +e_i direction, and the outward value
seen from a cell K is obtained by multiplying with ``e_i . nu_{sigma,K}``.

Meshes are immutable after construction and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

PERIODIC = "periodic"
NEUMANN = "neumann"  # no-flux wall, homogeneous Neumann for the potential
DIRICHLET = "dirichlet"

_VALID_BC = (PERIODIC, NEUMANN, DIRICHLET)

# face boundary classification codes
FACE_INTERIOR = 0
FACE_NEUMANN = 1
FACE_DIRICHLET = 2


class MeshError(ValueError):
    """Raised for inconsistent grid specifications."""


@dataclass(frozen=True)
class GridSpec:
    """Tensor-product grid: cell-edge coordinates and boundary tags per axis.

    ``axis_edges[i]`` holds the strictly increasing edge coordinates of axis i
    (length ``n_i + 1``); ``boundary[i]`` is the (low, high) tag pair of that
    axis, each one of ``"periodic"``, ``"neumann"`` or ``"dirichlet"``.
    Periodic on one side forces periodic on the other.
    """

    axis_edges: tuple[np.ndarray, ...]
    boundary: tuple[tuple[str, str], ...]

    def __post_init__(self):
        if not 1 <= len(self.axis_edges) <= 2:
            raise MeshError(f"only 1D and 2D grids are supported, got dim={len(self.axis_edges)}")
        if len(self.boundary) != len(self.axis_edges):
            raise MeshError("boundary tags must be given per axis")
        object.__setattr__(
            self, "axis_edges", tuple(np.asarray(e, dtype=float) for e in self.axis_edges)
        )
        for ax, edges in enumerate(self.axis_edges):
            if edges.ndim != 1 or edges.size < 3:
                raise MeshError(f"axis {ax}: need at least 2 cells")
            if not np.all(np.diff(edges) > 0.0):
                raise MeshError(f"axis {ax}: edge coordinates must be strictly increasing")
            lo, hi = self.boundary[ax]
            if lo not in _VALID_BC or hi not in _VALID_BC:
                raise MeshError(f"axis {ax}: unknown boundary tag {(lo, hi)!r}")
            if (lo == PERIODIC) != (hi == PERIODIC):
                raise MeshError(f"axis {ax}: periodic requires both sides periodic")

    @property
    def dim(self) -> int:
        return len(self.axis_edges)

    @property
    def cells_per_axis(self) -> tuple[int, ...]:
        return tuple(e.size - 1 for e in self.axis_edges)

    def is_periodic(self, axis: int) -> bool:
        return self.boundary[axis][0] == PERIODIC

    @staticmethod
    def uniform(
        cells: Sequence[int],
        extent: Sequence[tuple[float, float]] | None = None,
        boundary: str | Sequence[tuple[str, str]] = PERIODIC,
    ) -> "GridSpec":
        """Uniform grid helper: ``cells`` per axis on ``extent`` (default unit box)."""
        cells = tuple(int(n) for n in cells)
        if extent is None:
            extent = [(0.0, 1.0)] * len(cells)
        edges = tuple(np.linspace(a, b, n + 1) for (a, b), n in zip(extent, cells))
        if isinstance(boundary, str):
            bc = tuple((boundary, boundary) for _ in cells)
        else:
            bc = tuple(tuple(pair) for pair in boundary)
        return GridSpec(axis_edges=edges, boundary=bc)


@dataclass(frozen=True)
class FaceSet:
    """All faces normal to one direction, flat-indexed in C order.

    ``left_cell``/``right_cell`` are flat cell indices along -e_i/+e_i (-1
    where no cell exists).  ``half_left``/``half_right`` are the half-dual
    measures |D_{sigma,K}|; their sum is |D_sigma|.  The dual-edge tables
    describe, per interior face and slot, the neighbouring face across each
    edge of D_sigma and the two primal faces whose half fluxes compose the
    dual flux (sign = outward orientation, 0 marks a boundary dual edge).
    """

    direction: int
    shape: tuple[int, ...]
    area: np.ndarray
    left_cell: np.ndarray
    right_cell: np.ndarray
    half_left: np.ndarray
    half_right: np.ndarray
    dual_volume: np.ndarray
    bc_code: np.ndarray
    centers: np.ndarray          # (n_faces, dim)
    delta_inv: np.ndarray        # 1/Delta_sigma on interior faces, 0 elsewhere
    edge_neighbor: np.ndarray    # (n_faces, 2d) face index in this set
    edge_sign: np.ndarray        # (n_faces, 2d) +-1, or 0 for inactive slots
    edge_dir: np.ndarray         # (2d,) axis of the composing primal faces
    edge_comp_a: np.ndarray      # (n_faces, 2d) indices into the edge_dir face set
    edge_comp_b: np.ndarray

    @property
    def n_faces(self) -> int:
        return self.area.size

    @property
    def interior(self) -> np.ndarray:
        return self.bc_code == FACE_INTERIOR

    @property
    def exterior(self) -> np.ndarray:
        return self.bc_code != FACE_INTERIOR

    def adjacent_cell(self) -> np.ndarray:
        """Flat index of the neighbouring cell (the only one for exterior faces)."""
        return np.where(self.left_cell >= 0, self.left_cell, self.right_cell)


@dataclass(frozen=True)
class DualEdge:
    """One edge of a dual cell, as seen from its owning face."""

    neighbor: int                    # face index across the edge, -1 on the boundary
    direction: int                   # axis of the edge normal
    orientation: int                 # +-1 outward along e_direction, 0 if boundary
    faces: tuple[tuple[int, float], ...]  # composing primal faces with weights
    exterior: bool


@dataclass(frozen=True)
class Mesh:
    """Immutable MAC mesh: primal cells, per-direction face sets, dual cells."""

    spec: GridSpec
    shape: tuple[int, ...]
    cell_volumes: np.ndarray
    cell_perimeters: np.ndarray
    cell_centers_axis: tuple[np.ndarray, ...]
    cell_widths_axis: tuple[np.ndarray, ...]
    faces: tuple[FaceSet, ...]
    cell_faces: tuple[np.ndarray, ...]   # per direction: (n_cells, 2) [minus, plus]

    @property
    def dim(self) -> int:
        return len(self.shape)

    @property
    def n_cells(self) -> int:
        return self.cell_volumes.size

    @property
    def domain_volume(self) -> float:
        return float(np.prod([e[-1] - e[0] for e in self.spec.axis_edges]))

    def cell_center_coords(self) -> np.ndarray:
        """(n_cells, dim) coordinates of cell centers, C-order."""
        grids = np.meshgrid(*self.cell_centers_axis, indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)

    def dual_edges(self, direction: int, face: int) -> list[DualEdge]:
        """Edges of the dual cell of an interior face, with flux compositions."""
        fs = self.faces[direction]
        if not fs.interior[face]:
            raise MeshError(f"face {face} of direction {direction} is not interior")
        edges = []
        for s in range(fs.edge_sign.shape[1]):
            sign = fs.edge_sign[face, s]
            if sign == 0.0:
                edges.append(DualEdge(-1, int(fs.edge_dir[s]), 0, (), True))
                continue
            comp = (
                (int(fs.edge_comp_a[face, s]), 0.5 * float(sign)),
                (int(fs.edge_comp_b[face, s]), 0.5 * float(sign)),
            )
            edges.append(
                DualEdge(int(fs.edge_neighbor[face, s]), int(fs.edge_dir[s]),
                         int(sign), comp, False)
            )
        return edges


def _face_set(spec: GridSpec, i: int, cell_volumes: np.ndarray,
              centers: tuple[np.ndarray, ...], widths: tuple[np.ndarray, ...],
              cell_index: np.ndarray) -> tuple[FaceSet, np.ndarray]:
    """Build the direction-i face set and the per-cell [minus, plus] face table."""
    dim = spec.dim
    n = spec.cells_per_axis
    periodic = spec.is_periodic(i)
    n_edges = n[i] if periodic else n[i] + 1

    face_shape = tuple(n_edges if j == i else n[j] for j in range(dim))
    idx = np.indices(face_shape)
    e = idx[i]

    # neighbouring cells along -e_i / +e_i (flat indices, -1 where absent)
    def cell_at(axis_i_index: np.ndarray) -> np.ndarray:
        coords = [idx[j] for j in range(dim)]
        coords[i] = axis_i_index
        if periodic:
            coords[i] = coords[i] % n[i]
            return cell_index[tuple(coords)].ravel()
        valid = (coords[i] >= 0) & (coords[i] < n[i])
        safe = np.clip(coords[i], 0, n[i] - 1)
        coords[i] = safe
        flat = cell_index[tuple(coords)].ravel()
        return np.where(valid.ravel(), flat, -1)

    left_cell = cell_at(e - 1)
    right_cell = cell_at(e.copy())

    area = np.ones(face_shape)
    for j in range(dim):
        if j != i:
            area *= widths[j][idx[j]]
    area = area.ravel()

    half_left = np.where(left_cell >= 0, 0.5 * cell_volumes[np.maximum(left_cell, 0)], 0.0)
    half_right = np.where(right_cell >= 0, 0.5 * cell_volumes[np.maximum(right_cell, 0)], 0.0)

    bc_code = np.full(left_cell.shape, FACE_INTERIOR, dtype=np.int8)
    if not periodic:
        lo_tag, hi_tag = spec.boundary[i]
        lo = (e == 0).ravel()
        hi = (e == n[i]).ravel()
        bc_code[lo] = FACE_DIRICHLET if lo_tag == DIRICHLET else FACE_NEUMANN
        bc_code[hi] = FACE_DIRICHLET if hi_tag == DIRICHLET else FACE_NEUMANN

    face_coords = np.empty((area.size, dim))
    for j in range(dim):
        coord = spec.axis_edges[i][idx[i]] if j == i else centers[j][idx[j]]
        face_coords[:, j] = coord.ravel()

    # per-cell [minus, plus] face table
    cidx = np.indices(n)
    minus_axis = cidx[i]
    plus_axis = (cidx[i] + 1) % n[i] if periodic else cidx[i] + 1

    def face_flat(axis_i_index: np.ndarray) -> np.ndarray:
        coords = [cidx[j] for j in range(dim)]
        coords[i] = axis_i_index
        return np.ravel_multi_index(tuple(coords), face_shape).ravel()

    cell_face = np.stack([face_flat(minus_axis), face_flat(plus_axis)], axis=-1)

    fs = FaceSet(
        direction=i,
        shape=face_shape,
        area=area,
        left_cell=left_cell,
        right_cell=right_cell,
        half_left=half_left,
        half_right=half_right,
        dual_volume=half_left + half_right,
        bc_code=bc_code,
        centers=face_coords,
        delta_inv=np.zeros_like(area),
        edge_neighbor=np.zeros((area.size, 2 * dim), dtype=np.int64),
        edge_sign=np.zeros((area.size, 2 * dim)),
        edge_dir=np.zeros(2 * dim, dtype=np.int64),
        edge_comp_a=np.zeros((area.size, 2 * dim), dtype=np.int64),
        edge_comp_b=np.zeros((area.size, 2 * dim), dtype=np.int64),
    )
    return fs, cell_face


def _fill_dual_edges(spec: GridSpec, faces: list[FaceSet],
                     cell_faces: list[np.ndarray]) -> None:
    """Populate the dual-edge tables: half-sum composition of primal fluxes.

    Slot layout per direction-i face set: slots (2k, 2k+1) are the (-,+) edges
    along axis order (i first, then the transverse axes), so slot 0/1 always
    sit at the centers of the left/right cells.
    """
    dim = spec.dim
    n = spec.cells_per_axis
    for i, fs in enumerate(faces):
        nf = fs.n_faces
        interior = fs.interior
        K = fs.left_cell
        L = fs.right_cell
        Ks = np.maximum(K, 0)
        Ls = np.maximum(L, 0)
        axes = [i] + [j for j in range(dim) if j != i]
        self_idx = np.arange(nf)
        for s_pair, j in enumerate(axes):
            lo_slot, hi_slot = 2 * s_pair, 2 * s_pair + 1
            fs.edge_dir[lo_slot] = j
            fs.edge_dir[hi_slot] = j
            if j == i:
                # edges at the cell centers of K and L; neighbours are the
                # opposite direction-i faces of those cells
                nb_lo = cell_faces[i][Ks, 0]
                nb_hi = cell_faces[i][Ls, 1]
                comp_lo = (cell_faces[i][Ks, 0], self_idx)
                comp_hi = (self_idx, cell_faces[i][Ls, 1])
                act_lo = interior.copy()
                act_hi = interior.copy()
            else:
                # transverse edges: composed of the j-faces of K and L; the
                # neighbour is the direction-i face one cell over in j
                fidx = np.unravel_index(self_idx, fs.shape)
                periodic_j = spec.is_periodic(j)

                def shifted(offset):
                    coords = [c.copy() for c in fidx]
                    cj = coords[j] + offset
                    if periodic_j:
                        cj = cj % n[j]
                        ok = np.ones(nf, dtype=bool)
                    else:
                        ok = (cj >= 0) & (cj < n[j])
                        cj = np.clip(cj, 0, n[j] - 1)
                    coords[j] = cj
                    return np.ravel_multi_index(tuple(coords), fs.shape), ok

                nb_lo, ok_lo = shifted(-1)
                nb_hi, ok_hi = shifted(+1)
                comp_lo = (cell_faces[j][Ks, 0], cell_faces[j][Ls, 0])
                comp_hi = (cell_faces[j][Ks, 1], cell_faces[j][Ls, 1])
                act_lo = interior & ok_lo
                act_hi = interior & ok_hi

            for slot, nb, comp, act, sign in (
                (lo_slot, nb_lo, comp_lo, act_lo, -1.0),
                (hi_slot, nb_hi, comp_hi, act_hi, +1.0),
            ):
                fs.edge_neighbor[:, slot] = np.where(act, nb, self_idx)
                fs.edge_sign[:, slot] = np.where(act, sign, 0.0)
                fs.edge_comp_a[:, slot] = np.where(act, comp[0], 0)
                fs.edge_comp_b[:, slot] = np.where(act, comp[1], 0)


def build_mesh(spec: GridSpec) -> Mesh:
    """Construct the MAC mesh for a grid specification.

    Measures follow the 1D convention |sigma| = 1, so |D_sigma| has the
    dimension of a volume in every dimension and the discrete gradient and
    divergence share one code path.
    """
    dim = spec.dim
    n = spec.cells_per_axis
    widths = tuple(np.diff(e) for e in spec.axis_edges)
    centers = tuple(0.5 * (e[:-1] + e[1:]) for e in spec.axis_edges)

    vol_grid = widths[0].copy()
    for w in widths[1:]:
        vol_grid = np.multiply.outer(vol_grid, w)
    cell_volumes = vol_grid.ravel()
    cell_index = np.arange(cell_volumes.size).reshape(n)

    faces: list[FaceSet] = []
    cell_faces: list[np.ndarray] = []
    for i in range(dim):
        fs, cf = _face_set(spec, i, cell_volumes, centers, widths, cell_index)
        faces.append(fs)
        cell_faces.append(cf)

    perim = np.zeros_like(cell_volumes)
    for i in range(dim):
        perim += faces[i].area[cell_faces[i][:, 0]] + faces[i].area[cell_faces[i][:, 1]]

    ratio = perim / cell_volumes
    for fs in faces:
        interior = fs.interior
        d_inv = np.zeros(fs.n_faces)
        d_inv[interior] = 0.5 * (
            ratio[fs.left_cell[interior]] + ratio[fs.right_cell[interior]]
        )
        fs.delta_inv[:] = d_inv

    _fill_dual_edges(spec, faces, cell_faces)

    return Mesh(
        spec=spec,
        shape=tuple(n),
        cell_volumes=cell_volumes,
        cell_perimeters=perim,
        cell_centers_axis=centers,
        cell_widths_axis=widths,
        faces=tuple(faces),
        cell_faces=tuple(cell_faces),
    )
