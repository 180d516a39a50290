"""Tour of the staggered-mesh toolbox.

Builds 1D and 2D MAC meshes, inspects primal/dual measures, checks the
gradient-divergence duality on random fields, and tabulates the second-order
convergence of the discrete Laplacian.
"""

import numpy as np

from macplasma import operators as ops
from macplasma.mesh import NEUMANN, PERIODIC, GridSpec, build_mesh

rng = np.random.default_rng(0)

print("== 1D periodic mesh, 4 uniform cells on [0, 1] ==")
mesh = build_mesh(GridSpec.uniform([4], boundary=PERIODIC))
fs = mesh.faces[0]
print(f"cell volumes   : {mesh.cell_volumes}")
print(f"face measures  : {fs.area}  (1D convention: |sigma| = 1)")
print(f"dual volumes   : {fs.dual_volume}")
print(f"interior faces : {int(fs.interior.sum())} of {fs.n_faces}")

print("\n== dual cell of an interior face (half-sum flux composition) ==")
for edge in mesh.dual_edges(0, 1):
    print(f"  edge along axis {edge.direction}, orientation {edge.orientation:+d}, "
          f"composed of faces {[f for f, _ in edge.faces]} with weights "
          f"{[w for _, w in edge.faces]}")

print("\n== 2D walled mesh: exterior faces carry half dual cells ==")
mesh2 = build_mesh(GridSpec.uniform([2, 2], boundary=NEUMANN))
fsx = mesh2.faces[0]
print(f"x-face measures: {fsx.area}")
print(f"dual volumes   : {fsx.dual_volume}")

print("\n== gradient-divergence duality on random fields ==")
mesh = build_mesh(GridSpec.uniform([32, 32], boundary=NEUMANN))
q = rng.standard_normal(mesh.n_cells)
v = []
for fs in mesh.faces:
    vi = rng.standard_normal(fs.n_faces)
    vi[fs.exterior] = 0.0
    v.append(vi)
lhs = np.sum(mesh.cell_volumes * q * ops.div(mesh, v))
rhs = sum(
    np.sum(fs.dual_volume * gi * vi)
    for fs, gi, vi in zip(mesh.faces, ops.grad_interior(mesh, q), v)
)
print(f"<q, div v> = {lhs:+.6e}")
print(f"<grad q, v> = {rhs:+.6e}")
print(f"defect      = {abs(lhs + rhs):.3e}")

print("\n== discrete Laplacian converges at second order ==")
print(f"{'N':>6} {'max error':>12} {'order':>7}")
prev = None
for n in (32, 64, 128, 256):
    m = build_mesh(GridSpec.uniform([n], boundary=PERIODIC))
    x = m.cell_centers_axis[0]
    err = np.max(np.abs(ops.laplacian(m, np.sin(2 * np.pi * x))
                        + 4 * np.pi**2 * np.sin(2 * np.pi * x)))
    order = "" if prev is None else f"{np.log2(prev / err):7.3f}"
    print(f"{n:>6} {err:12.4e} {order:>7}")
    prev = err
