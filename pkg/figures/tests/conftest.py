import numpy as np
import pytest


def write_1d_snapshot(path, n=32, seed=0):
    rng = np.random.default_rng(seed)
    x = (np.arange(n) + 0.5) / n
    rho = 1.0 + 1e-3 * np.sin(2 * np.pi * x)
    u = 1.0 + 1e-3 * np.cos(2 * np.pi * x) + 1e-6 * rng.standard_normal(n)
    phi = 1e-4 * np.sin(2 * np.pi * x)
    with open(path, "w") as fh:
        fh.write("x,rho,u,phi\n")
        for k in range(n):
            fh.write(f"{x[k]:.17g},{rho[k]:.17g},{u[k]:.17g},{phi[k]:.17g}\n")
    return path


def write_2d_snapshot(path, n=16, phase=0.0):
    x = (np.arange(n) + 0.5) / n
    X, Y = np.meshgrid(x, x, indexing="ij")
    rho = 1.0 + 1e-3 * np.where(X < 0.5, -1.0, 1.0) * np.cos(phase)
    u = np.sin(2 * np.pi * (X + Y) + phase)
    v = np.cos(2 * np.pi * (X + Y) + phase)
    phi = 1e-2 * np.sin(2 * np.pi * X) * np.sin(2 * np.pi * Y + phase)
    div_u = 2 * np.pi * (np.cos(2 * np.pi * (X + Y)) - np.sin(2 * np.pi * (X + Y)))
    with open(path, "w") as fh:
        fh.write("x,y,rho,u,v,phi,div_u\n")
        for i in range(n):
            for j in range(n):
                row = (X[i, j], Y[i, j], rho[i, j], u[i, j], v[i, j],
                       phi[i, j], div_u[i, j])
                fh.write(",".join(f"{val:.17g}" for val in row) + "\n")
    return path


def write_steps(path, n=40):
    t = np.linspace(0, 0.1, n)
    energy = 0.5 * np.exp(-3.0 * t)
    with open(path, "w") as fh:
        fh.write("step,t,dt,active_bound,halvings,solver_iterations,"
                 "solver_residual,internal_energy,kinetic_energy,"
                 "potential_energy,total_energy,mass,max_density_deviation,"
                 "entropy_ok,poisson_residual\n")
        for k in range(n):
            fh.write(
                f"{k + 1},{t[k]:.17g},0.0025,stabilization,0,12,1e-11,"
                f"0,{energy[k]:.17g},0,{energy[k]:.17g},1,1e-8,1,1e-12\n"
            )
    return path


def write_sweep_summary(path):
    with open(path, "w") as fh:
        fh.write("eps,n_steps,dt_min,dt_max,dt_mean,"
                 "final_max_density_deviation,entropy_monotone,wall_time_s,error\n")
        for eps in (1e-1, 1e-2, 1e-4, 1e-6):
            fh.write(f"{eps:.17g},132,0.0004,0.00076,0.0007,{eps**2:.3g},1,0.2,\n")
    return path


@pytest.fixture
def artifact_tree(tmp_path):
    """Fake solver output tree covering every figure set's inputs."""
    tree = {}
    # index 0 is the initial snapshot, later indices the requested outputs
    for name, n_snaps, writer in (
        ("qn1d_ap", 3, write_1d_snapshot),
        ("qn1d_classical", 3, write_1d_snapshot),
        ("maxwell_eps", 2, write_1d_snapshot),
        ("maxwell_eps2", 2, write_1d_snapshot),
    ):
        d = tmp_path / name
        d.mkdir()
        for k in range(n_snaps):
            writer(d / f"snapshot_{k:03d}.csv", seed=k)
        write_steps(d / "steps.csv")
        tree[name] = d
    for name, phases in (("column", (0.0, 3.14159, 6.28318)),
                         ("qn2d", (0.0, 1.0))):
        d = tmp_path / name
        d.mkdir()
        for k, phase in enumerate(phases):
            write_2d_snapshot(d / f"snapshot_{k:03d}.csv", phase=phase)
        write_steps(d / "steps.csv")
        tree[name] = d
    tree["summary"] = write_sweep_summary(tmp_path / "summary.csv")
    tree["root"] = tmp_path
    return tree
