"""CSV/JSON artifact writers shared by the CLI.

CSV files use '.' decimals, '\\n' line endings, a mandatory header row,
and an optional leading comment line ``# {json}`` carrying the metadata
header.  Formatting is fixed (repr of float64), so identical inputs
produce byte-identical files.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np

from .deturck import DeTurckRun
from .flow import FlowTrajectory, MetricGrid1D, grid_curvature
from .solitons import SolitonProfile

__all__ = [
    "config_hash",
    "write_csv",
    "profile_to_csv",
    "trajectory_to_csv",
    "grid_to_csv",
    "deturck_history_to_csv",
    "distance_matrix_to_csv",
    "write_json",
]


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header: list[str], rows, meta: dict | None = None) -> None:
    path = Path(path)
    with path.open("w", newline="") as f:
        if meta is not None:
            f.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n")


def profile_to_csv(profile: SolitonProfile, path) -> None:
    """Columns r, phi_1, f, R, ric_eig_1..ric_eig_n (pointwise, sorted)."""
    meta = {
        "kind": profile.kind,
        "n": profile.n,
        "beta": profile.beta,
        "flat_factor_dim": profile.flat_factor_dim,
        "tolerance": profile.tolerance,
    }
    q = profile.fiber_dim
    R = profile.scalar_curvature()
    mixed, fiber = profile.sectional_curvatures()
    ric_rad = q * mixed
    ric_fib = mixed + (q - 1) * fiber
    lam = profile.soliton_constant
    header = ["r", "phi_1", "f", "R"] + [f"ric_eig_{i+1}" for i in range(profile.n)]
    rows = []
    for i, r in enumerate(profile.r_grid):
        eigs = sorted(
            [0.0] * profile.flat_factor_dim + [ric_fib[i]] * q + [ric_rad[i]]
        )
        rows.append([r, profile.phi[i], profile.f[i], R[i], *eigs])
    write_csv(path, header, rows, meta)


def grid_to_csv(grid: MetricGrid1D, path) -> None:
    cur = grid_curvature(grid)
    meta = {"n": grid.n, **{k: v for k, v in grid.meta.items() if k != "t"}}
    header = ["x", "rho", "phi", "R", "rm_min"]
    rows = [
        [x, r, p, R, m]
        for x, r, p, R, m in zip(
            grid.x_grid, grid.rho, grid.phi, cur["scalar"], cur["rm_min"]
        )
    ]
    write_csv(path, header, rows, meta)


def trajectory_to_csv(traj: FlowTrajectory, path, stride: int = 1) -> None:
    """Long format: t, x, rho, phi, R, rm_min (one row per node per time)."""
    meta = {
        "S": traj.S,
        "alpha_estimate": traj.alpha_estimate,
        "inj_estimate": traj.inj_estimate,
        "stopped": traj.meta.get("stopped"),
    }
    header = ["t", "x", "rho", "phi", "R", "rm_min"]
    rows = []
    for t, st in list(zip(traj.times, traj.states))[::stride]:
        if t == 0 and st.closure_slopes()[0] < 1 - 1e-3:
            continue  # singular initial rows have no curvature columns
        cur = grid_curvature(st)
        for i, x in enumerate(st.x_grid):
            rows.append(
                [t, x, st.rho[i], st.phi[i], cur["scalar"][i], cur["rm_min"][i]]
            )
    write_csv(path, header, rows, meta)


def deturck_history_to_csv(run: DeTurckRun, path) -> None:
    header = ["t", "sup_h"]
    rows = [[t, hh] for t, hh in zip(run.times, run.h_history)]
    write_csv(path, header, rows, {"n": run.meta.get("n"), "T": run.meta.get("T")})


def distance_matrix_to_csv(profile, path) -> None:
    meta = {"points": [list(p) for p in profile.points]}
    P = len(profile.points)
    header = [f"d_{j}" for j in range(P)]
    write_csv(path, header, profile.matrix.tolist(), meta)
