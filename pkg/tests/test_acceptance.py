"""Acceptance suite: one test per primary criterion, at stated tolerances.

Each test prints a single PASS line with its measured values (run pytest
with -s to see them); tolerances are pinned here and nowhere else.  The
suite uses only the primary component.
"""

import time

import numpy as np
import pytest

from ricci_lab.deturck import (
    PerturbationField,
    deturck_evolve,
    deturck_ode_pullback,
    shrinking_round_background,
)
from ricci_lab.distances import distance_profile, gh_estimate
from ricci_lab.fd_curvature import curvature_at_point
from ricci_lab.flow import grid_curvature
from ricci_lab.simplex import (
    FaceDescriptor,
    SimplexPoint,
    build_phi,
    contraction_r,
    delta_vertex,
    dist_to_sigma,
    face_vertices,
    pl_degree,
    random_delta_star_point,
    random_face_preserving_map,
    surjectivity_check,
    weighted_sum,
)
from ricci_lab.solitons import (
    hamilton_identity_deviation,
    product_steady,
    soliton_residual,
    tip_ricci_eigenvalues,
)
from ricci_lab.warped import WarpLayer, layer_curvature

from conftest import SMOOTHING_T


def _report(name: str, ok: bool, detail: str, t0: float, budget: float):
    elapsed = time.time() - t0
    status = "PASS" if ok else "FAIL"
    print(f"[{status}] {name}: {detail} ({elapsed:.1f}s / budget {budget:.0f}s)")
    assert ok, f"{name}: {detail}"
    assert elapsed < budget, f"{name} exceeded its runtime budget"


def test_warped_curvature_lemma():
    """200 random layers: Rm >= beta^-2 - 1e-8; oracle slope >= 1.9; <1 min."""
    t0 = time.time()
    rng = np.random.default_rng(42)
    worst_margin = np.inf
    for _ in range(200):
        beta = rng.uniform(0.3, 1.0)
        layer = WarpLayer(
            beta=beta,
            fiber_dim=int(rng.integers(1, 5)),
            fiber_rm_min=rng.uniform(1.0, 3.0),
            x=rng.uniform(0.05, np.pi - 0.05),
        )
        rep = layer_curvature(layer)
        worst_margin = min(worst_margin, rep.rm_operator_min_eig - 1 / beta**2)
    bound_ok = worst_margin >= -1e-8

    slopes = []
    for _ in range(12):
        beta = rng.uniform(0.3, 1.0)
        rho = rng.uniform(0.6, 1.0)
        x0 = rng.uniform(0.6, np.pi - 0.6)
        layer = WarpLayer(beta=beta, fiber_dim=2, fiber_rm_min=1 / rho**2, x=x0)

        def metric(z):
            return np.diag([
                beta**2,
                beta**2 * rho**2 * np.sin(z[0]) ** 2,
                beta**2 * rho**2 * (np.sin(z[0]) * np.sin(z[1])) ** 2,
            ])

        exact = layer_curvature(layer).rm_operator_min_eig
        errs = [
            abs(curvature_at_point(metric, [x0, 1.2, 0.3], spacing=hh)
                .rm_operator_min_eig - exact)
            for hh in (4e-2, 2e-2)
        ]
        if errs[1] > 1e-12:
            slopes.append(np.log2(errs[0] / errs[1]))
    slope_ok = bool(slopes) and min(slopes) >= 1.9
    _report(
        "warped-curvature-lemma",
        bound_ok and slope_ok,
        f"worst margin {worst_margin:.2e}, min slope "
        f"{min(slopes) if slopes else float('nan'):.2f}",
        t0, 60,
    )


def test_cigar_closed_form(cigar):
    """Residual < 1e-12; Hamilton constant 1 at machine precision; <1 s."""
    t0 = time.time()
    residual = soliton_residual(cigar)
    H = cigar.scalar_curvature() + cigar.f_prime**2
    ham = np.abs(H[1:] - 1.0).max()
    _report(
        "cigar-closed-form",
        residual < 1e-12 and ham <= 1e-15,
        f"residual {residual:.2e}, |R+|grad f|^2 - 1| <= {ham:.2e}",
        t0, 1,
    )


def test_bryant_family(bryant_profiles):
    """n in {3,4,5}: Hamilton < 1e-6, tips 1/n +- 1e-6, trace 1e-8; <30 s."""
    t0 = time.time()
    details = []
    ok = True
    for n, prof in bryant_profiles.items():
        ham = hamilton_identity_deviation(prof)
        ev = tip_ricci_eigenvalues(prof)
        tip_err = np.abs(ev.as_array() - 1.0 / n).max()
        trace_err = abs(ev.trace_identity() - 1.0)
        ok &= ham < 1e-6 and tip_err < 1e-6 and trace_err < 1e-8
        details.append(f"n={n}: ham={ham:.1e} tip={tip_err:.1e} tr={trace_err:.1e}")
    _report("bryant-family", ok, "; ".join(details), t0, 30)


def test_vertex_eigenvalue_map():
    """Products R^k x Bry^(4-k) hit Delta_0(k+1) within 1e-4; <1 min."""
    t0 = time.time()
    targets = {
        0: (0.25, 0.25, 0.25),
        1: (0.0, 1 / 3, 1 / 3),
        2: (0.0, 0.0, 0.5),
    }
    ok = True
    worst = 0.0
    for k, target in targets.items():
        prof = product_steady(k, 4 - k, r_max=40.0)
        ev = tip_ricci_eigenvalues(prof)
        err = np.abs(ev.as_array() - np.array(target)).max()
        vertex = delta_vertex(4, k + 1).as_array()
        err = max(err, np.abs(ev.as_array() - vertex).max())
        worst = max(worst, err)
        ok &= err < 1e-4
    _report("vertex-eigenvalue-map", ok, f"max deviation {worst:.2e}", t0, 60)


def test_expander_asymptotics(expanders):
    """beta in {0.5,0.9}, n in {3,4}: slope within 1e-3 at r=50, sec > 0."""
    t0 = time.time()
    ok = True
    details = []
    for (n, beta), prof in expanders.items():
        r = prof.r_grid
        i50 = np.searchsorted(r, 50.0) - 1
        dev = abs(prof.phi[i50] / r[i50] - beta)
        mixed, fiber = prof.sectional_curvatures()
        interior = r > 0
        min_sec = min(mixed[interior].min(), fiber[interior].min())
        ok &= dev < 1e-3 and min_sec > 0
        details.append(f"(n={n},b={beta}): dev={dev:.1e} minsec={min_sec:.1e}")
    _report("expander-asymptotics", ok, "; ".join(details), t0, 60)


def test_round_sphere_flow(round_flow):
    """Homothetic law rel. error < 1e-4 at 256 nodes to half-life; <30 s."""
    t0 = time.time()
    grid, traj = round_flow
    ieq = grid.x_grid.size // 2
    err = max(
        abs(st.phi[ieq] ** 2 - (1 - 4 * t)) / (1 - 4 * t)
        for t, st in zip(traj.times, traj.states)
    )
    _report("round-sphere-flow", err < 1e-4, f"max rel err {err:.2e}", t0, 30)


def test_smoothing_run(smoothing_runs):
    """beta=0.8, n=4, s=1e-4: Rm >= 0.99 past the healing gate 10*sqrt(s);
    gh(g(t_min), singular) <= 0.05; sup t|Rm| within x2 across s; <10 min."""
    t0 = time.time()
    s = 1e-4
    run = smoothing_runs[s]
    traj = run["traj"]
    series = list(zip(traj.times[1:], traj.meta["rm_min_series"]))
    gate = 10 * np.sqrt(s)
    after = [mn for t, mn in series if t >= gate]
    rm_ok = bool(after) and min(after) >= 0.99

    d_sing = distance_profile(run["grid"])
    d_tmin = distance_profile(traj.states[1])
    gh = gh_estimate(d_sing, d_tmin)
    gh_ok = gh <= 0.05

    sups = {}
    for ss, rr in smoothing_runs.items():
        sers = zip(rr["traj"].times[1:], rr["traj"].meta["abs_rm_series"])
        sups[ss] = max(t * ab for t, ab in sers)
    ratio = sups[1e-3] / sups[1e-4]
    alpha_ok = 0.5 <= ratio <= 2.0

    _report(
        "smoothing-run",
        rm_ok and gh_ok and alpha_ok,
        f"minRm(t>={gate:.2f})={min(after) if after else float('nan'):.3f}, "
        f"gh={gh:.4f}, sup t|Rm| ratio={ratio:.3f}",
        t0, 600,
    )


def test_deturck_stability(deturck_conformal_runs, deturck_bump_run):
    """eps ratios within 10%; zero drift < 1e-12; pullback < 10x solver."""
    t0 = time.time()
    lams = {eps: run.lambda_measured
            for eps, run in deturck_conformal_runs.items()}
    ratio_ok = abs(lams[1e-3] / lams[1e-2] - 1) < 0.10

    bg = shrinking_round_background(1.0, 4, 256)
    m = bg.x_grid.size
    zero_run = deturck_evolve(
        bg, PerturbationField(np.zeros(m), np.zeros(m)), T=0.05, n_records=20
    )
    drift_ok = zero_run.h_history.max() < 1e-12

    pb = deturck_ode_pullback(deturck_bump_run)
    pullback_ok = pb["residual"] < 10 * pb["solver_residual"]

    _report(
        "deturck-stability",
        ratio_ok and drift_ok and pullback_ok,
        f"Lambda ratio dev {abs(lams[1e-3]/lams[1e-2]-1):.2e}, "
        f"drift {zero_run.h_history.max():.1e}, "
        f"pullback {pb['residual']:.2e} vs 10x{pb['solver_residual']:.2e}",
        t0, 300,
    )


def test_simplex_suite():
    """r idempotent/fixing at 1e-12 on 1e4 points; worked example;
    Phi properties at eps in {0.1, 0.01}; degree 1 on 50 random maps
    (n=4,5); coverage gap <= 2 mesh cells; <2 min."""
    t0 = time.time()
    rng = np.random.default_rng(2024)

    r_img = contraction_r(SimplexPoint((0.5, 0.1, 0.2), "DeltaStar"))
    worked_ok = max(abs(v - 0.25) for v in r_img.coords) < 1e-15

    idem_worst = 0.0
    fix_worst = 0.0
    for _ in range(10_000):
        p = random_delta_star_point(4, rng)
        r1 = contraction_r(p)
        r2 = contraction_r(r1)
        idem_worst = max(idem_worst, np.abs(r2.as_array() - r1.as_array()).max())
        fix_worst = max(
            fix_worst, np.abs(contraction_r(r1).as_array() - r1.as_array()).max()
        )
    r_ok = idem_worst <= 1e-12 and fix_worst <= 1e-12

    phi_ok = True
    for eps in (0.1, 0.01):
        phi = build_phi(4, eps)
        for _ in range(10_000):
            p = random_delta_star_point(4, rng).as_array()
            d = dist_to_sigma(p)
            img = phi(p)
            if d >= eps and not np.array_equal(img, p):
                phi_ok = False
            if d <= eps / phi.C and abs(img[0]) > 1e-14:
                phi_ok = False
            if np.linalg.norm(img - p) > phi.C * eps + 1e-12:
                phi_ok = False

    deg_ok = True
    for n, idxs, res in ((4, (1, 2, 3), 64), (5, (1, 2, 3, 4), 16)):
        verts = face_vertices(FaceDescriptor(len(idxs) - 1, idxs, "Delta"), n)
        for _ in range(25):
            fmap = random_face_preserving_map(verts, rng)
            if pl_degree(fmap, verts, resolution=res, rng=rng) != 1:
                deg_ok = False

    face = FaceDescriptor(2, (1, 2, 3), "Delta")
    verts = face_vertices(face, 4)
    fmap = random_face_preserving_map(verts, rng)
    cov = surjectivity_check(fmap, face, 4, grid_resolution=64, rng=rng)
    cov_ok = cov["max_gap"] <= 2 * cov["mesh_size"]

    _report(
        "simplex-suite",
        worked_ok and r_ok and phi_ok and deg_ok and cov_ok,
        f"idem {idem_worst:.1e}, phi ok={phi_ok}, 50 degrees ok={deg_ok}, "
        f"gap {cov['max_gap']:.4f} <= 2x{cov['mesh_size']:.4f}",
        t0, 120,
    )
