"""Command-line entry point: every module behind one binary.

Subcommands: curvature, suspend, glue, flow, soliton, deturck, simplex,
sweep.  Options may come from a TOML config file ([run] table) with
command-line flags taking precedence; every run writes a machine-readable
summary JSON (tool version, config hash, wall time) next to its primary
output.  Exit codes: 0 ok, 1 solver failure, 2 config error, 3 invariant
violation.  RICCI_LAB_THREADS caps sweep parallelism.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .deturck import PerturbationField, deturck_evolve, shrinking_round_background
from .distances import distance_profile, gh_estimate
from .fd_curvature import curvature_at_point
from .flow import GlueParams, evolve_ricci_flow, glue_expander, suspension_to_grid
from .serialize import (
    config_hash,
    deturck_history_to_csv,
    distance_matrix_to_csv,
    grid_to_csv,
    profile_to_csv,
    trajectory_to_csv,
    write_json,
)
from .simplex import (
    FaceDescriptor,
    SimplexPoint,
    build_phi,
    contraction_r,
    delta_vertex,
    face_vertices,
    pl_degree,
    random_face_preserving_map,
    surjectivity_check,
)
from .solitons import (
    bryant_shoot,
    cigar_profile,
    expander_shoot,
    product_steady,
    tip_ricci_eigenvalues,
    hamilton_identity_deviation,
    soliton_residual,
)
from .warped import SuspensionSpec, build_suspension, min_rm_over_suspension

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_CONFIG = 2
EXIT_INVARIANT = 3


class ConfigError(Exception):
    pass


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        import tomllib  # Python >= 3.11
    except ModuleNotFoundError:
        import tomli as tomllib
    with p.open("rb") as f:
        data = tomllib.load(f)
    run = data.get("run", {})
    if not isinstance(run, dict):
        raise ConfigError("[run] table missing or malformed")
    return run


def _merge(config: dict, args: argparse.Namespace, keys: list[str]) -> dict:
    """Config-file values with command-line flags taking precedence."""
    out = dict(config)
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            out[k] = v
    return out


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v != ""]


def _summary(path_base: Path, subcommand: str, cfg: dict, payload: dict,
             t0: float) -> None:
    summary = {
        "tool_version": __version__,
        "subcommand": subcommand,
        "config": cfg,
        "config_hash": config_hash({"subcommand": subcommand, **cfg}),
        "wall_time_s": round(time.time() - t0, 3),
        **payload,
    }
    write_json(path_base.with_suffix(path_base.suffix + ".summary.json"), summary)


def _cmd_curvature(args) -> int:
    cfg = _merge(_load_config(args.config), args, ["n", "beta", "samples", "seed", "out"])
    t0 = time.time()
    beta = _parse_floats(cfg["beta"]) if isinstance(cfg["beta"], str) else cfg["beta"]
    spec = SuspensionSpec(n=int(cfg["n"]), beta=tuple(beta))
    chain = build_suspension(spec)
    rng = np.random.default_rng(int(cfg.get("seed", 0)))
    n_samples = int(cfg.get("samples", 200))
    grid = rng.uniform(0.05, np.pi - 0.05, size=(n_samples, spec.n - 2))
    rm_min = min_rm_over_suspension(spec, grid)
    report = curvature_at_point(
        chain.metric_fn(), [np.pi / 2] * (spec.n - 2) + [0.5], spacing=1e-3
    )
    out = Path(cfg.get("out", "curvature.json"))
    payload = {
        "spec": spec.to_dict(),
        "min_rm_layer": rm_min,
        "oracle_at_equator": report.to_dict(),
        "singular_strata": list(chain.singular_strata),
    }
    write_json(out, payload)
    _summary(out, "curvature", cfg, {"min_rm_layer": rm_min}, t0)
    return EXIT_OK


def _cmd_suspend(args) -> int:
    cfg = _merge(_load_config(args.config), args, ["beta1", "n", "resolution", "out"])
    t0 = time.time()
    grid = suspension_to_grid(
        float(cfg["beta1"]), int(cfg["n"]), int(cfg.get("resolution", 256))
    )
    out = Path(cfg.get("out", "suspension.csv"))
    grid_to_csv(grid, out)
    _summary(out, "suspend", cfg, {"closure_slopes": list(grid.closure_slopes())}, t0)
    return EXIT_OK


def _cmd_glue(args) -> int:
    cfg = _merge(
        _load_config(args.config), args,
        ["beta1", "n", "s", "resolution", "cluster", "tol", "out"],
    )
    t0 = time.time()
    beta1 = float(cfg["beta1"])
    n = int(cfg["n"])
    s = float(cfg["s"])
    grid = suspension_to_grid(
        beta1, n, int(cfg.get("resolution", 512)), float(cfg.get("cluster", 0.5))
    )
    expander = None
    if beta1 < 1.0 - 1e-6:
        expander = expander_shoot(
            n - 1, beta1, r_max=1.3 * 3 * s**-0.25, tol=float(cfg.get("tol", 1e-8))
        )
    glued = glue_expander(grid, expander, GlueParams(s=s))
    out = Path(cfg.get("out", "glued.csv"))
    grid_to_csv(glued, out)
    _summary(out, "glue", cfg, {"closure_slopes": list(glued.closure_slopes())}, t0)
    return EXIT_OK


def _cmd_flow(args) -> int:
    cfg = _merge(
        _load_config(args.config), args,
        ["beta1", "n", "s", "T", "resolution", "cluster", "tol", "out", "gh"],
    )
    t0 = time.time()
    beta1 = float(cfg["beta1"])
    n = int(cfg["n"])
    T = float(cfg.get("T", 0.05))
    res = int(cfg.get("resolution", 512))
    cluster = float(cfg.get("cluster", 0.5))
    grid = suspension_to_grid(beta1, n, res, cluster)
    if beta1 < 1.0 - 1e-6:
        s = float(cfg.get("s", 1e-4))
        expander = expander_shoot(
            n - 1, beta1, r_max=1.3 * 3 * s**-0.25, tol=float(cfg.get("tol", 1e-8))
        )
        start = glue_expander(grid, expander, GlueParams(s=s))
    else:
        start = grid
    traj = evolve_ricci_flow(start, T)
    out = Path(cfg.get("out", "flow.csv"))
    stride = max(1, len(traj.times) // 24)
    trajectory_to_csv(traj, out, stride=stride)
    payload = {
        "alpha_estimate": traj.alpha_estimate,
        "inj_estimate": traj.inj_estimate,
        "S": traj.S,
        "stopped": traj.meta.get("stopped"),
        "rm_min_final": traj.meta["rm_min_series"][-1] if traj.meta["rm_min_series"] else None,
    }
    if cfg.get("gh"):
        d0 = distance_profile(grid)
        d1 = distance_profile(traj.states[1])
        payload["gh_tmin_vs_singular"] = gh_estimate(d0, d1)
        distance_matrix_to_csv(d1, out.with_name(out.stem + "_dist.csv"))
    _summary(out, "flow", cfg, payload, t0)
    return EXIT_OK


def _cmd_soliton(args) -> int:
    cfg = _merge(
        _load_config(args.config), args,
        ["kind", "dim", "flat", "beta", "r_max", "tol", "out"],
    )
    t0 = time.time()
    kind = cfg.get("kind", "bryant")
    tol = float(cfg.get("tol", 1e-10))
    r_max = float(cfg.get("r_max", 50.0))
    if kind == "cigar":
        profile = cigar_profile(r_max)
    elif kind == "bryant":
        profile = bryant_shoot(int(cfg["dim"]), r_max, tol)
    elif kind == "product":
        profile = product_steady(int(cfg.get("flat", 1)), int(cfg["dim"]), r_max, tol)
    elif kind == "expander":
        beta = float(cfg["beta"])
        if isinstance(cfg["beta"], str):
            beta = _parse_floats(cfg["beta"])[0]
        profile = expander_shoot(int(cfg["dim"]), beta, r_max, float(cfg.get("tol", 1e-8)))
    else:
        raise ConfigError(f"unknown soliton kind {kind!r}")
    out = Path(cfg.get("out", f"{kind}.csv"))
    profile_to_csv(profile, out)
    payload: dict = {"kind": kind, "n": profile.n}
    if profile.kind == "steady":
        payload["hamilton_deviation"] = hamilton_identity_deviation(profile)
        payload["soliton_residual"] = soliton_residual(profile)
        ev = tip_ricci_eigenvalues(profile)
        payload["tip_eigenvalues"] = list(ev.lambdas)
        payload["trace_identity"] = ev.trace_identity()
        write_json(
            out.with_name(out.stem + "_eigs.json"),
            {"n": profile.n, "flat_factor_dim": profile.flat_factor_dim,
             "lambdas": list(ev.lambdas), "trace": ev.trace_identity()},
        )
    else:
        payload.update({k: profile.meta[k] for k in
                        ("asymptotic_slope", "min_sectional", "avr_estimate")})
    _summary(out, "soliton", cfg, payload, t0)
    return EXIT_OK


def _cmd_deturck(args) -> int:
    cfg = _merge(
        _load_config(args.config), args,
        ["n", "c0", "eps", "T", "resolution", "out"],
    )
    t0 = time.time()
    n = int(cfg.get("n", 4))
    res = int(cfg.get("resolution", 256))
    T = float(cfg.get("T", 0.15))
    eps = float(cfg.get("eps", 1e-2))
    bg = shrinking_round_background(float(cfg.get("c0", 1.0)), n, res)
    m = bg.x_grid.size
    pert = PerturbationField(np.full(m, eps), np.full(m, eps))
    run = deturck_evolve(bg, pert, T)
    out = Path(cfg.get("out", "deturck.csv"))
    deturck_history_to_csv(run, out)
    payload = {
        "Lambda_meas": run.lambda_measured,
        "eps": eps,
        "background_id": f"round-S{n - 1}-c0={cfg.get('c0', 1.0)}",
    }
    write_json(out.with_name(out.stem + "_stability.json"), payload)
    _summary(out, "deturck", cfg, payload, t0)
    return EXIT_OK


def _cmd_simplex(args) -> int:
    cfg = _merge(
        _load_config(args.config), args,
        ["action", "n", "k", "point", "eps", "indices", "resolution", "seed", "out"],
    )
    t0 = time.time()
    action = cfg.get("action", "r")
    n = int(cfg["n"])
    out = Path(cfg.get("out", f"simplex_{action}.json"))
    if action == "r":
        coords = _parse_floats(cfg["point"])
        p = SimplexPoint(tuple(coords), "DeltaStar")
        res = contraction_r(p)
        payload = {"point": coords, "r": [round(v, 15) for v in res.coords]}
    elif action == "vertex":
        v = delta_vertex(n, int(cfg["k"]))
        payload = {"n": n, "k": int(cfg["k"]), "vertex": list(v.coords)}
    elif action == "phi":
        phi = build_phi(n, float(cfg.get("eps", 0.1)))
        coords = _parse_floats(cfg["point"])
        payload = {
            "point": coords,
            "phi": [float(v) for v in phi(np.array(coords))],
            "C": phi.C,
        }
    elif action == "degree":
        idxs = tuple(int(i) for i in str(cfg["indices"]).split(","))
        face = FaceDescriptor(len(idxs) - 1, idxs, "Delta")
        verts = face_vertices(face, n)
        rng = np.random.default_rng(int(cfg.get("seed", 0)))
        fmap = random_face_preserving_map(verts, rng)
        deg = pl_degree(fmap, verts, int(cfg.get("resolution", 64)), rng)
        payload = {"face": list(idxs), "degree": deg}
    elif action == "coverage":
        idxs = tuple(int(i) for i in str(cfg["indices"]).split(","))
        face = FaceDescriptor(len(idxs) - 1, idxs, "Delta")
        verts = face_vertices(face, n)
        rng = np.random.default_rng(int(cfg.get("seed", 0)))
        fmap = random_face_preserving_map(verts, rng)
        payload = surjectivity_check(
            fmap, face, n, int(cfg.get("resolution", 64)), rng
        )
    else:
        raise ConfigError(f"unknown simplex action {action!r}")
    write_json(out, payload)
    _summary(out, "simplex", cfg, payload, t0)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    if not args.config:
        raise ConfigError("sweep requires --config with a [[sweep.runs]] list")
    p = Path(args.config)
    if not p.exists():
        raise ConfigError(f"config file not found: {args.config}")
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    with p.open("rb") as f:
        data = tomllib.load(f)
    runs = data.get("sweep", {}).get("runs", [])
    if not runs:
        raise ConfigError("no [[sweep.runs]] entries found")
    workers = int(os.environ.get("RICCI_LAB_THREADS", "4"))

    def one(run_cfg: dict) -> int:
        argv = [run_cfg.pop("subcommand")]
        for k, v in run_cfg.items():
            argv.extend([f"--{k.replace('_', '-')}", str(v)])
        return main(argv)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        codes = list(pool.map(one, runs))
    return max(codes) if codes else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ricci-lab",
        description="warped sphere metrics, Ricci flow smoothing, soliton "
        "profiles, and eigenvalue-simplex checks",
    )
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def add(name, fn, flags):
        sp = sub.add_parser(name)
        sp.add_argument("--config", default=None)
        sp.add_argument("--out", default=None)
        for flag, typ in flags:
            sp.add_argument(f"--{flag.replace('_', '-')}", dest=flag, type=typ,
                            default=None)
        sp.set_defaults(fn=fn)

    add("curvature", _cmd_curvature, [("n", int), ("beta", str), ("samples", int),
                                      ("seed", int)])
    add("suspend", _cmd_suspend, [("beta1", float), ("n", int), ("resolution", int)])
    add("glue", _cmd_glue, [("beta1", float), ("n", int), ("s", float),
                            ("resolution", int), ("cluster", float), ("tol", float)])
    add("flow", _cmd_flow, [("beta1", float), ("n", int), ("s", float), ("T", float),
                            ("resolution", int), ("cluster", float), ("tol", float),
                            ("gh", int)])
    add("soliton", _cmd_soliton, [("kind", str), ("dim", int), ("flat", int),
                                  ("beta", str), ("r_max", float), ("tol", float)])
    add("deturck", _cmd_deturck, [("n", int), ("c0", float), ("eps", float),
                                  ("T", float), ("resolution", int)])
    add("simplex", _cmd_simplex, [("action", str), ("n", int), ("k", int),
                                  ("point", str), ("eps", float), ("indices", str),
                                  ("resolution", int), ("seed", int)])
    sp = sub.add_parser("sweep")
    sp.add_argument("--config", required=True)
    sp.set_defaults(fn=_cmd_sweep)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return EXIT_CONFIG if e.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ConfigError, KeyError, TypeError) as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as e:
        print(f"invariant violation: {e}", file=sys.stderr)
        return EXIT_INVARIANT
    except Exception as e:  # solver failures
        print(f"solver failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
