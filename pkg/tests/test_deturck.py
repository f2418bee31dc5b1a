import numpy as np
import pytest

from ricci_lab.deturck import (
    PerturbationField,
    deturck_evolve,
    deturck_ode_pullback,
    shrinking_round_background,
    stability_ratio,
)
from ricci_lab.flow import _grid_to_state, _state_curvature, _state_to_grid


class TestZeroPerturbation:
    def test_structural_fixed_point(self):
        bg = shrinking_round_background(1.0, 4, 320)
        m = bg.x_grid.size
        zero = PerturbationField(np.zeros(m), np.zeros(m))
        run = deturck_evolve(bg, zero, T=0.18, n_records=20)
        assert run.meta["steps"] >= 10_000
        assert run.h_history.max() <= 1e-12

    def test_ratio_guard(self, deturck_background):
        bg = deturck_background
        m = bg.x_grid.size
        zero = PerturbationField(np.zeros(m), np.zeros(m))
        run = deturck_evolve(bg, zero, T=0.01, n_records=10)
        with pytest.raises(ZeroDivisionError):
            _ = run.lambda_measured
        with pytest.raises(ZeroDivisionError):
            stability_ratio(run, run)


class TestConformal:
    def test_lambda_matches_closed_form(self, deturck_conformal_runs):
        # (1+eps) x round stays conformally round: h grows exactly like
        # eps c0^2 / c^2(t), so Lambda = 1/(1 - 4T) for S^3
        for eps, run in deturck_conformal_runs.items():
            assert run.lambda_measured == pytest.approx(1 / (1 - 4 * 0.15),
                                                        rel=1e-6)

    def test_linear_regime_scaling(self, deturck_conformal_runs):
        lams = {eps: run.lambda_measured
                for eps, run in deturck_conformal_runs.items()}
        assert abs(lams[1e-3] / lams[1e-2] - 1) < 0.10

    def test_two_solution_ratio(self, deturck_conformal_runs):
        runs = list(deturck_conformal_runs.values())
        ratio = stability_ratio(runs[0], runs[1])
        assert ratio == pytest.approx(1 / (1 - 4 * 0.15), rel=1e-5)


class TestPerturbationGuards:
    def test_cap_enforced(self, deturck_background):
        m = deturck_background.x_grid.size
        with pytest.raises(ValueError, match="cap"):
            deturck_evolve(deturck_background,
                           PerturbationField(np.full(m, 0.5), np.zeros(m)),
                           T=0.01)

    def test_background_curvature_hypothesis(self):
        # a deep neck has strongly negative mixed curvature: rejected
        xi = np.linspace(0.0, np.pi, 129)
        pinch = 1.0 - 0.9 * np.exp(-(((xi - np.pi / 2) / 0.2) ** 2))
        phi = np.sin(xi) * pinch
        phi[0] = phi[-1] = 0.0
        from ricci_lab.flow import MetricGrid1D

        bad = MetricGrid1D(xi, np.ones(129), phi, 4)
        m = xi.size
        with pytest.raises(ValueError, match="Rm >= -1"):
            deturck_evolve(bad, PerturbationField(np.zeros(m), np.zeros(m)),
                           T=0.01)

    def test_rough_initial_data_runs(self, deturck_background):
        # Lipschitz, non-C^1 tent perturbation: solution exists, ratio finite
        bg = deturck_background
        x = bg.x_grid
        tent = 5e-3 * np.maximum(0.0, 1.0 - np.abs(x - np.pi / 2) / 0.7)
        run = deturck_evolve(bg, PerturbationField(np.zeros(x.size), tent),
                             T=0.02, n_records=40)
        assert np.isfinite(run.lambda_measured)
        assert run.lambda_measured <= 1.5


class TestBumpPerturbation:
    def test_halving_scales_suprema(self, deturck_background, deturck_bump_run):
        bg = deturck_background
        x = bg.x_grid
        bump = 1e-2 * np.exp(-(((x - np.pi / 2) / 0.5) ** 2))
        half = deturck_evolve(bg, PerturbationField(np.zeros(x.size), 0.5 * bump),
                              T=0.05, n_records=200)
        ratio = half.h_history.max() / deturck_bump_run.h_history.max()
        assert abs(ratio - 0.5) < 0.05

    def test_semigroup_restart(self, deturck_background):
        bg = deturck_background
        x = bg.x_grid
        bump = 1e-2 * np.exp(-(((x - np.pi / 2) / 0.5) ** 2))
        pert = PerturbationField(np.zeros(x.size), bump)
        direct = deturck_evolve(bg, pert, T=0.04, n_records=80)

        first = deturck_evolve(bg, pert, T=0.02, n_records=40)
        xi, _, _ = _grid_to_state(bg)
        Xb, Yb = first.bg_states[-1]
        bg_mid = _state_to_grid(xi, Xb, Yb, bg, t=0.02)
        second = deturck_evolve(bg_mid, first.fields[-1], T=0.02, n_records=40)
        assert np.abs(second.fields[-1].h_rr - direct.fields[-1].h_rr).max() < 1e-8
        assert np.abs(second.fields[-1].h_ff - direct.fields[-1].h_ff).max() < 1e-8


class TestPullback:
    def test_residual_within_solver_error(self, deturck_bump_run):
        pb = deturck_ode_pullback(deturck_bump_run)
        assert pb["residual"] < 10 * pb["solver_residual"]

    def test_zero_perturbation_identity(self, deturck_background):
        bg = deturck_background
        m = bg.x_grid.size
        run = deturck_evolve(bg, PerturbationField(np.zeros(m), np.zeros(m)),
                             T=0.02, n_records=50)
        pb = deturck_ode_pullback(run)
        xi, _, _ = _grid_to_state(bg)
        # W is not bitwise zero (the staggered resampling of sin is not
        # exactly sin), but the transport stays at interpolation level
        for k, pos in pb["psi"].items():
            assert np.abs(pos - xi).max() < 1e-9
        assert pb["residual"] < 1e-5

    def test_pure_gauge_recovers_background(self, deturck_background):
        # perturb by pulling the background back through a small diffeo;
        # after the DeTurck ODE the flow is round again: its sectional
        # curvature matches 1/c^2(t) up to the scheme error
        bg = deturck_background
        x = bg.x_grid
        delta = 5e-3
        dpsi = 1 + 2 * delta * np.cos(2 * x)
        b_p = np.sin(x + delta * np.sin(2 * x)) ** 2
        h_rr = dpsi**2 - 1.0
        s2 = np.sin(x) ** 2
        h_ff = np.zeros_like(x)
        h_ff[1:-1] = b_p[1:-1] / s2[1:-1] - 1.0
        h_ff[0] = h_ff[1]
        h_ff[-1] = h_ff[-2]
        run = deturck_evolve(bg, PerturbationField(h_rr, h_ff), T=0.05,
                             n_records=200)
        pb = deturck_ode_pullback(run)

        xi, _, _ = _grid_to_state(bg)
        h = bg.h
        k = len(run.times) - 1
        Xs, Ys = run.states[k]
        secm, secf = _state_curvature(xi, Xs, Ys, h, bg.n - 2)
        c2 = 1 - 4 * run.times[k]
        rows = slice(2, xi.size - 2)
        assert np.abs(secm[rows] * c2 - 1).max() < 5e-3
        assert np.abs(secf[rows] * c2 - 1).max() < 5e-3
