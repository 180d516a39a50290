"""Command-line front end: run / sweep / verify / compare.

All flags override keys of an optional JSON configuration file, so a sweep or
a CI run can be described by a single machine-writable document.  Exit
status: 0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import classical as cl
from . import limit as lim
from . import semi_implicit as si
from . import verification
from .cases import CASE_NAMES, preset
from .elliptic import SolverConfig
from .runner import SCHEMES, RunFailure, run_case

_OUT_ENV = "MACPLASMA_OUT"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="macplasma",
        description="Euler-Poisson solvers on staggered MAC grids",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", type=Path, help="JSON configuration file")
        p.add_argument("--case", choices=CASE_NAMES)
        p.add_argument("--scheme", choices=SCHEMES)
        p.add_argument("--eps", type=float, help="Debye length")
        p.add_argument("--cells", type=int, help="cells per axis")
        p.add_argument("--delta", type=float, help="perturbation amplitude override")
        p.add_argument("--eta", type=float, help="momentum-shift constant (> 5/4)")
        p.add_argument("--alpha", type=float, help="potential-shift constant (>= 2)")
        p.add_argument("--cfl", type=float, help="CFL safety factor")
        p.add_argument("--t-end", dest="t_end", type=float, help="truncate the run")
        p.add_argument("--max-dt", dest="max_dt", type=float, help="hard time-step cap")
        p.add_argument("--dt-eps-factor", dest="dt_eps_factor", type=float,
                       help="classical scheme: dt <= factor * eps")
        p.add_argument("--solver-rtol", dest="solver_rtol", type=float)
        p.add_argument("--output-times", dest="output_times", type=str,
                       help="comma-separated snapshot times")
        p.add_argument("--out", type=Path, help="output directory")
        p.add_argument("--dump-matrix", dest="dump_matrix", action="store_true",
                       default=None, help="dump the first elliptic matrix (row col value)")

    p_run = sub.add_parser("run", help="run one case with one scheme")
    add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="run one case across a list of eps values")
    add_common(p_sweep)
    p_sweep.add_argument("--eps-list", dest="eps_list", type=str,
                         help="comma-separated Debye lengths (at least two)")
    p_sweep.add_argument("--workers", type=int, default=1,
                         help="parallel worker processes")

    p_verify = sub.add_parser("verify", help="run the property-check suite")
    p_verify.add_argument("--seed", type=int, default=0)

    p_compare = sub.add_parser("compare", help="run two schemes and diff the fields")
    add_common(p_compare)
    p_compare.add_argument("--schemes", type=str, default="ap,classical",
                           help="two comma-separated scheme tags")
    return parser


def _merge_config(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if getattr(args, "config", None):
        cfg.update(json.loads(Path(args.config).read_text()))
    for key in (
        "case", "scheme", "eps", "cells", "delta", "eta", "alpha", "cfl",
        "t_end", "max_dt", "dt_eps_factor", "solver_rtol", "output_times",
        "out", "dump_matrix",
    ):
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = value
    if isinstance(cfg.get("output_times"), str):
        cfg["output_times"] = [float(t) for t in cfg["output_times"].split(",") if t]
    return cfg


def _out_dir(cfg: dict, default_name: str) -> Path:
    root = cfg.get("out") or os.environ.get(_OUT_ENV, "out")
    return Path(root) if cfg.get("out") else Path(root) / default_name


def _configs_from(cfg: dict):
    solver = SolverConfig(rtol=float(cfg.get("solver_rtol", 1e-10)))
    ap = si.APConfig(
        eta=float(cfg.get("eta", 1.5)),
        alpha=float(cfg.get("alpha", 2.0)),
        cfl_safety=float(cfg.get("cfl", 0.9)),
        max_dt=cfg.get("max_dt"),
        solver=solver,
    )
    classical = cl.ClassicalConfig(
        cfl_advective=float(cfg.get("cfl", 0.9)),
        dt_eps_factor=float(cfg.get("dt_eps_factor", 0.5)),
        solver=solver,
    )
    limit_cfg = lim.LimitConfig(
        eta=float(cfg.get("eta", 1.5)),
        alpha=float(cfg.get("alpha", 2.0)),
        gamma=float(cfg.get("gamma", 2.0)),
        cfl_safety=float(cfg.get("cfl", 0.9)),
        solver=solver,
    )
    return ap, classical, limit_cfg


def _resolve_case(cfg: dict):
    if "case" not in cfg:
        raise UsageError("--case is required (or a 'case' key in the config file)")
    return preset(
        cfg["case"],
        eps=cfg.get("eps"),
        cells=cfg.get("cells"),
        delta=cfg.get("delta"),
        output_times=cfg.get("output_times"),
    )


class UsageError(ValueError):
    pass


def cmd_run(args) -> int:
    cfg = _merge_config(args)
    case = _resolve_case(cfg)
    scheme = cfg.get("scheme", "ap")
    out_dir = _out_dir(cfg, f"{case.name}_{scheme}")
    ap, classical, limit_cfg = _configs_from({**cfg, "gamma": case.gamma})
    limit_cfg = lim.LimitConfig(
        eta=limit_cfg.eta, alpha=limit_cfg.alpha, gamma=case.gamma,
        cfl_safety=limit_cfg.cfl_safety, solver=limit_cfg.solver,
    )
    dump = out_dir / "matrix.coo" if cfg.get("dump_matrix") else None
    if dump is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    echo = {**case.to_config(), "scheme": scheme, "t_end": cfg.get("t_end")}
    try:
        result = run_case(
            case, scheme, out_dir,
            ap_config=ap, classical_config=classical, limit_config=limit_cfg,
            t_end=cfg.get("t_end"), dump_matrix_path=dump, config_echo=echo,
        )
    except RunFailure as exc:
        print(f"run failed: {exc}", file=sys.stderr)
        return 1
    print(
        f"{case.name}/{scheme}: {result.n_steps} steps, "
        f"{len(result.snapshots)} snapshots, entropy "
        f"{'monotone' if result.entropy_monotone else 'VIOLATED'}, "
        f"mass drift {result.mass_drift:.2e} -> {result.out_dir}"
    )
    return 0


def _sweep_worker(payload: dict) -> dict:
    cfg = payload["cfg"]
    eps = payload["eps"]
    case = preset(
        cfg["case"], eps=eps, cells=cfg.get("cells"), delta=cfg.get("delta"),
        output_times=cfg.get("output_times"),
    )
    scheme = cfg.get("scheme", "ap")
    ap, classical, limit_cfg = _configs_from({**cfg, "gamma": case.gamma})
    out_dir = Path(payload["out_root"]) / f"eps_{eps:g}"
    row = {"eps": eps, "error": ""}
    try:
        result = run_case(
            case, scheme, out_dir, ap_config=ap, classical_config=classical,
            limit_config=limit_cfg, t_end=cfg.get("t_end"),
        )
        row.update(
            n_steps=result.n_steps,
            dt_min=float(result.dts.min()),
            dt_max=float(result.dts.max()),
            dt_mean=float(result.dts.mean()),
            final_max_density_deviation=result.final_max_density_deviation,
            entropy_monotone=int(result.entropy_monotone),
            wall_time_s=result.wall_time_s,
        )
    except Exception as exc:
        row.update(
            n_steps="", dt_min="", dt_max="", dt_mean="",
            final_max_density_deviation="", entropy_monotone="",
            wall_time_s="", error=f"{type(exc).__name__}: {exc}",
        )
    return row


def cmd_sweep(args) -> int:
    cfg = _merge_config(args)
    eps_raw = args.eps_list or cfg.get("eps_list")
    if isinstance(eps_raw, str):
        eps_values = [float(t) for t in eps_raw.split(",") if t]
    else:
        eps_values = [float(t) for t in (eps_raw or [])]
    if len(eps_values) < 2:
        print("sweep requires at least two eps values (--eps-list)", file=sys.stderr)
        return 2
    case_name = cfg.get("case")
    if case_name not in CASE_NAMES:
        print(f"unknown or missing case {case_name!r}", file=sys.stderr)
        return 2
    out_root = _out_dir(cfg, f"{case_name}_sweep")
    out_root.mkdir(parents=True, exist_ok=True)
    payloads = [{"cfg": cfg, "eps": e, "out_root": str(out_root)} for e in eps_values]
    workers = max(1, int(getattr(args, "workers", 1)))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_worker, payloads))
    else:
        rows = [_sweep_worker(p) for p in payloads]

    columns = (
        "eps", "n_steps", "dt_min", "dt_max", "dt_mean",
        "final_max_density_deviation", "entropy_monotone", "wall_time_s", "error",
    )
    summary = out_root / "summary.csv"
    with summary.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)
    failures = [r for r in rows if r["error"]]
    for r in rows:
        print(
            f"eps={r['eps']:g}: "
            + (f"dt in [{r['dt_min']:.3e}, {r['dt_max']:.3e}], "
               f"final |rho-1| = {r['final_max_density_deviation']:.3e}"
               if not r["error"] else f"FAILED ({r['error']})")
        )
    print(f"summary -> {summary}")
    return 1 if failures else 0


def cmd_verify(args) -> int:
    results = verification.run_all(seed=args.seed)
    failed = 0
    for res in results:
        status = "PASS" if res.ok else "FAIL"
        print(f"[{status}] {res.name}: {res.detail}")
        failed += 0 if res.ok else 1
    print(f"{len(results) - failed}/{len(results)} checks passed")
    return 1 if failed else 0


def cmd_compare(args) -> int:
    cfg = _merge_config(args)
    schemes = [s.strip() for s in args.schemes.split(",") if s.strip()]
    if len(schemes) != 2 or any(s not in SCHEMES for s in schemes):
        print(f"--schemes needs two of {SCHEMES}", file=sys.stderr)
        return 2
    case = _resolve_case(cfg)
    out_root = _out_dir(cfg, f"{case.name}_compare")
    ap, classical, limit_cfg = _configs_from({**cfg, "gamma": case.gamma})
    results = {}
    for scheme in schemes:
        try:
            results[scheme] = run_case(
                case, scheme, out_root / scheme, ap_config=ap,
                classical_config=classical, limit_config=limit_cfg,
                t_end=cfg.get("t_end"),
            )
        except RunFailure as exc:
            print(f"{scheme} failed: {exc}", file=sys.stderr)
            return 1

    diffs = []
    snap_a = np.genfromtxt(results[schemes[0]].snapshots[-1], delimiter=",", names=True)
    snap_b = np.genfromtxt(results[schemes[1]].snapshots[-1], delimiter=",", names=True)
    for col in snap_a.dtype.names:
        if col in ("x", "y") or col not in snap_b.dtype.names:
            continue
        d = snap_a[col] - snap_b[col]
        diffs.append(
            {"variable": col,
             "linf": float(np.max(np.abs(d))),
             "l2": float(np.sqrt(np.mean(d**2)))}
        )
    diff_path = out_root / "differences.csv"
    with diff_path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=("variable", "linf", "l2"))
        writer.writeheader()
        writer.writerows(diffs)
    for d in diffs:
        print(f"{d['variable']}: Linf={d['linf']:.6e} L2={d['l2']:.6e}")
    print(f"differences -> {diff_path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": cmd_run,
        "sweep": cmd_sweep,
        "verify": cmd_verify,
        "compare": cmd_compare,
    }
    try:
        return handlers[args.command](args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
