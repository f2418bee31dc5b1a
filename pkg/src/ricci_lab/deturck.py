"""Ricci-DeTurck stability runs against cohomogeneity-one backgrounds.

A perturbed metric g = g~ + h and its background g~ are co-evolved by the
same discrete Ricci-DeTurck right-hand side (log-relative staggered
variables from :mod:`flow`); the background solves the gauge-fixed flow
with W(g~, g~) = 0, i.e. plain Ricci flow, and h = 0 is a bitwise fixed
point of the pair, so the zero perturbation cannot drift.

Sup-norms of h are measured pointwise in the evolving background metric:
the eigenvalues of h relative to g~ are e^{X-X~} - 1 (radial) and
e^{Y-Y~} - 1 (fiber, multiplicity n-2).

The DeTurck vector field of the run is recorded along a dense time
ladder; integrating dPsi/dt = -W(Psi, t) backward from the identity at
the final time pulls the gauge-fixed solution back to an honest Ricci
flow, whose residual max |d_t g^ + 2 Ric(g^)| is measured with the same
discrete operators and compared against the solver's own equation
residual on the identical ladder.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .flow import (
    FlowError,
    FlowTrajectory,
    MetricGrid1D,
    _grid_to_state,
    _node_to_stag,
    _stag_to_node,
    _state_curvature,
    _state_rhs,
    grid_curvature,
)

__all__ = [
    "PerturbationField",
    "DeTurckField",
    "DeTurckRun",
    "shrinking_round_background",
    "deturck_evolve",
    "stability_ratio",
    "deturck_ode_pullback",
]

PERTURBATION_CAP = 0.1


@dataclass
class PerturbationField:
    """Adapted-frame components of h = g - g~ on the node grid.

    ``h_rr`` is the dx-dx component and ``h_ff`` the fiber-trace
    component, both measured relative to the background (eigenvalues of
    h with respect to g~).
    """

    h_rr: np.ndarray
    h_ff: np.ndarray
    time: float = 0.0

    def sup_norm(self) -> float:
        return float(max(np.abs(self.h_rr).max(), np.abs(self.h_ff).max()))


@dataclass
class DeTurckField:
    """Radial DeTurck vector field on the node grid; vanishes at tips."""

    W: np.ndarray
    time: float


@dataclass
class DeTurckRun:
    """Recorded co-evolution of a perturbed metric and its background."""

    times: np.ndarray
    h_history: np.ndarray  # sup |h(t)| per recorded time
    fields: list[PerturbationField]
    W_fields: list[np.ndarray]  # staggered DeTurck vector per time
    states: list[tuple[np.ndarray, np.ndarray]]  # (X, Y) staggered
    bg_states: list[tuple[np.ndarray, np.ndarray]]
    grid_ref: MetricGrid1D
    meta: dict = field(default_factory=dict)

    @property
    def lambda_measured(self) -> float:
        h0 = self.h_history[0]
        if h0 == 0:
            raise ZeroDivisionError("zero initial difference: ratio undefined")
        return float(self.h_history.max() / h0)

    def deturck_fields(self) -> list[DeTurckField]:
        """Gauge vector on the node grid per recorded time (tips pinned)."""
        out = []
        for t, W in zip(self.times, self.W_fields):
            Wn = _stag_to_node(W, odd=True)
            Wn[0] = 0.0
            Wn[-1] = 0.0
            out.append(DeTurckField(W=Wn, time=float(t)))
        return out


def shrinking_round_background(
    c0: float, n: int, resolution: int = 256
) -> MetricGrid1D:
    """Round S^(n-1) of radius c0 as a node grid (exact homothetic flow)."""
    xi = np.linspace(0.0, np.pi, resolution + 1)
    phi = c0 * np.sin(xi)
    phi[0] = 0.0
    phi[-1] = 0.0
    return MetricGrid1D(
        x_grid=xi, rho=np.full(xi.size, c0), phi=phi, n=n,
        meta={"kind": "round", "c0": c0},
    )


def deturck_evolve(
    background: MetricGrid1D | FlowTrajectory,
    h0: PerturbationField,
    T: float,
    n_records: int = 200,
    safety: float = 0.3,
    cap: float = PERTURBATION_CAP,
) -> DeTurckRun:
    """Co-evolve g = g~ + h and g~ under the reduced Ricci-DeTurck flow.

    Both metrics solve the gauge-fixed flow relative to the round
    reference (for round backgrounds the gauge field coincides with the
    DeTurck vector of the shrinking round flow itself, because round
    metrics of any radius share their Christoffel symbols); the
    stability statement compared is the two-solutions estimate
    sup ||g - g^|| <= Lambda ||g(0) - g^(0)||.

    The background may be a round (or otherwise smooth) grid or a
    FlowTrajectory, in which case the run restarts from the earliest
    recorded state satisfying the curvature hypothesis.  The background
    must satisfy Rm(g~) >= -1 (pre-checked); |h0| must stay under
    ``cap`` (default 0.1, well inside metric positivity).  States, h
    sup-norms, and the DeTurck field are recorded on the uniform ladder
    k*T/n_records, so runs over the same horizon are directly
    comparable.
    """
    if isinstance(background, FlowTrajectory):
        for st in background.states:
            if st.closure_slopes()[0] < 1 - 5e-2:
                continue
            if float(grid_curvature(st)["rm_min"].min()) >= -1.0:
                background = st
                break
        else:
            raise ValueError("trajectory has no state with Rm >= -1")
    cur = grid_curvature(background)
    if float(cur["rm_min"].min()) < -1.0 - 1e-8:
        raise ValueError("background violates Rm >= -1 (stability hypothesis)")
    if h0.sup_norm() > cap:
        raise ValueError(f"|h0| = {h0.sup_norm():.3g} exceeds the cap {cap}")
    if np.any(1.0 + np.asarray(h0.h_rr) <= 0) or np.any(
        1.0 + np.asarray(h0.h_ff) <= 0
    ):
        raise ValueError("h0 destroys metric positivity")

    n = background.n
    q = n - 2
    h = background.h
    xi, Xb, Yb = _grid_to_state(background)
    cot = 1.0 / np.tan(xi)

    # staggered initial solution state: multiplicative perturbation
    X = Xb + _node_to_stag(np.log1p(np.asarray(h0.h_rr, dtype=float)), odd=False)
    Y = Yb + _node_to_stag(np.log1p(np.asarray(h0.h_ff, dtype=float)), odd=False)

    times = [0.0]
    states = [(X.copy(), Y.copy())]
    bg_states = [(Xb.copy(), Yb.copy())]
    W_fields = [_state_rhs(xi, cot, X, Y, h, q)[2]]

    ladder = np.linspace(0.0, T, n_records + 1)
    t = 0.0
    steps = 0
    next_idx = 1
    while t < T - 1e-15:
        a_min = float(min(np.exp(X.min()), np.exp(Xb.min())))
        dt = safety * h**2 / max(1.0, q / 2.0) * a_min
        dt = min(dt, max(ladder[next_idx] - t, 1e-18))
        if dt <= 0 or not np.isfinite(dt):
            raise FlowError(f"step underflow at t={t:.3e}")

        def step(Xc, Yc, Xbc, Ybc):
            dX, dY, _ = _state_rhs(xi, cot, Xc, Yc, h, q)
            dXb, dYb, _ = _state_rhs(xi, cot, Xbc, Ybc, h, q)
            return dX, dY, dXb, dYb

        k1 = step(X, Y, Xb, Yb)
        k2 = step(*(v + 0.5 * dt * d for v, d in zip((X, Y, Xb, Yb), k1)))
        k3 = step(*(v + 0.5 * dt * d for v, d in zip((X, Y, Xb, Yb), k2)))
        k4 = step(*(v + dt * d for v, d in zip((X, Y, Xb, Yb), k3)))
        X, Y, Xb, Yb = (
            v + (dt / 6.0) * (a + 2 * b + 2 * c + d)
            for v, a, b, c, d in zip((X, Y, Xb, Yb), k1, k2, k3, k4)
        )
        t += dt
        steps += 1
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise FlowError(f"perturbed state blew up at t={t:.3e}")
        if np.abs(X - Xb).max() > 1.0 or np.abs(Y - Yb).max() > 1.0:
            raise FlowError("metric positivity margin lost (|h| ~ 1)")
        if next_idx < ladder.size and t >= ladder[next_idx] - 1e-15:
            times.append(float(ladder[next_idx]))
            states.append((X.copy(), Y.copy()))
            bg_states.append((Xb.copy(), Yb.copy()))
            W_fields.append(_state_rhs(xi, cot, X, Y, h, q)[2])
            next_idx += 1

    fields = []
    sup = []
    for (Xs, Ys), (Xbs, Ybs), tt in zip(states, bg_states, times):
        h_rr = _stag_to_node(np.expm1(Xs - Xbs), odd=False)
        h_ff = _stag_to_node(np.expm1(Ys - Ybs), odd=False)
        fields.append(PerturbationField(h_rr=h_rr, h_ff=h_ff, time=tt))
        sup.append(max(np.abs(h_rr).max(), np.abs(h_ff).max()))

    return DeTurckRun(
        times=np.array(times),
        h_history=np.array(sup),
        fields=fields,
        W_fields=W_fields,
        states=states,
        bg_states=bg_states,
        grid_ref=background,
        meta={"steps": steps, "n": n, "T": T, "safety": safety},
    )


def stability_ratio(run1: DeTurckRun, run2: DeTurckRun) -> float:
    """sup_t ||g1(t) - g2(t)||_inf / ||g1(0) - g2(0)||_inf.

    Both runs must share the background; differences are measured in the
    evolving background metric.  Raises ZeroDivisionError on identical
    initial data.
    """
    if run1.times.size != run2.times.size or not np.allclose(
        run1.times, run2.times, rtol=1e-10, atol=1e-12
    ):
        raise ValueError("runs were recorded on different time ladders")
    diffs = []
    for (X1, Y1), (X2, Y2), (Xb, Yb) in zip(
        run1.states, run2.states, run1.bg_states
    ):
        d_rr = np.abs(np.exp(X1 - Xb) - np.exp(X2 - Xb)).max()
        d_ff = np.abs(np.exp(Y1 - Yb) - np.exp(Y2 - Yb)).max()
        diffs.append(max(d_rr, d_ff))
    diffs = np.array(diffs)
    if diffs[0] == 0:
        raise ZeroDivisionError("zero initial difference: ratio undefined")
    return float(diffs.max() / diffs[0])


def deturck_ode_pullback(run: DeTurckRun, t_floor: float | None = None) -> dict:
    """Recover the Ricci flow gauge by integrating dPsi/dt = -W backward.

    Anchored at the final recorded time (Psi_T = id), the node positions
    are transported backward through the recorded DeTurck field (linear
    interpolation in time, cubic in space); the pulled-back metrics
    g^(t) = Psi_t^* g(t) are then differenced in time and their Ricci
    flow residual max |d_t g^ + 2 Ric(g^)|, measured in the background
    metric, is compared with the solver's own equation residual on the
    same ladder (``solver_residual``), computed with identical discrete
    operators.

    Returns {"residual", "solver_residual", "times", "psi"}.
    """
    xi, _, _ = _grid_to_state(run.grid_ref)
    h = run.grid_ref.h
    n = run.grid_ref.n
    q = n - 2
    cot = 1.0 / np.tan(xi)
    times = run.times
    if t_floor is None:
        # skip the initial layer where unresolved high-frequency content
        # dominates the time differences
        t_floor = 0.1 * times[-1]

    def interp_parity(pos, xi_grid, vals, odd):
        """Parity-extended cubic interpolation of staggered fields.

        Cubic accuracy matters: interpolation error of the pulled-back
        state at the pole-adjacent rows is amplified by csc^2 in the
        curvature evaluation.
        """
        s = -1.0 if odd else 1.0
        hh = xi_grid[1] - xi_grid[0]
        ext = np.concatenate([s * vals[1::-1], vals, s * vals[-1:-3:-1]])
        # ext[j] sits at (j - 2 + 1/2) * hh
        u = pos / hh - 0.5 + 2.0
        j = np.clip(np.floor(u).astype(int), 1, ext.size - 3)
        w = u - j
        vm, v0, v1, v2 = ext[j - 1], ext[j], ext[j + 1], ext[j + 2]
        return (
            vm * (-w * (w - 1) * (w - 2) / 6)
            + v0 * ((w + 1) * (w - 1) * (w - 2) / 2)
            + v1 * (-(w + 1) * w * (w - 2) / 2)
            + v2 * ((w + 1) * w * (w - 1) / 6)
        )

    def W_at(t, pos):
        i = int(np.clip(np.searchsorted(times, t) - 1, 0, times.size - 2))
        th = (t - times[i]) / (times[i + 1] - times[i])
        W = (1 - th) * run.W_fields[i] + th * run.W_fields[i + 1]
        return interp_parity(pos, xi, W, odd=True)

    # backward transport of the staggered positions
    psi_at = {times.size - 1: xi.copy()}
    pos = xi.copy()
    for k in range(times.size - 1, 0, -1):
        t1, t0 = times[k], times[k - 1]
        dt = t1 - t0
        k1 = -W_at(t1, pos)
        k2 = -W_at(t1 - 0.5 * dt, pos - 0.5 * dt * k1)
        k3 = -W_at(t1 - 0.5 * dt, pos - 0.5 * dt * k2)
        k4 = -W_at(t0, pos - dt * k3)
        pos = pos - (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if np.any(np.diff(pos) <= 0) or pos[0] <= 0 or pos[-1] >= np.pi:
            raise FlowError("DeTurck ODE left the chart (node crossing)")
        psi_at[k - 1] = pos.copy()

    # pulled-back log-relative state on the staggered grid:
    # X^ = X(psi) + 2 log psi', Y^ = Y(psi) + 2 log(sin psi / sin xi)
    def pullback(k):
        Xs, Ys = run.states[k]
        p = psi_at[k]
        # psi - xi is odd about both poles, so psi' has exact parity rows
        dpsi = 1.0 + _stag_d1_local(p - xi, h)
        Xh = interp_parity(p, xi, Xs, odd=False) + 2.0 * np.log(dpsi)
        Yh = interp_parity(p, xi, Ys, odd=False) + 2.0 * np.log(
            np.sin(p) / np.sin(xi)
        )
        return Xh, Yh

    def _stag_d1_local(y, hh):
        e = np.concatenate([[-y[0]], y, [-y[-1]]])
        return (e[2:] - e[:-2]) / (2 * hh)

    # Ricci flow residual of the pullback vs the solver's own equation
    # residual: both are defects against the independent 4th-order
    # evaluation of the spatial operators (the solver satisfies its own
    # 2nd-order stencil identity exactly, so that cannot serve as a
    # yardstick), over the same ladder, away from the pole-adjacent rows
    # where csc^2 amplifies interpolation noise.
    rows = slice(2, xi.size - 2)
    res = 0.0
    solver_res = 0.0
    ks = [k for k in range(1, times.size - 1) if times[k] >= t_floor]
    for k in ks[:-1]:
        dt2 = times[k + 1] - times[k - 1]
        Xm, Ym = pullback(k - 1)
        Xp, Yp = pullback(k + 1)
        Xc, Yc = pullback(k)
        a_c = np.exp(Xc)
        b_c = np.sin(xi) ** 2 * np.exp(Yc)
        secm, secf = _state_curvature(xi, Xc, Yc, h, q, order=4)
        ric_xx = q * secm * a_c
        ric_ff = (secm + (q - 1) * secf) * b_c
        rr = (np.exp(Xp) - np.exp(Xm)) / dt2 + 2 * ric_xx
        rf = (np.sin(xi) ** 2 * (np.exp(Yp) - np.exp(Ym))) / dt2 + 2 * ric_ff
        Xb, Yb = run.bg_states[k]
        ab = np.exp(Xb)
        bb = np.sin(xi) ** 2 * np.exp(Yb)
        res = max(
            res,
            np.abs(rr[rows] / ab[rows]).max(),
            np.abs(rf[rows] / bb[rows]).max(),
        )

        # solver residual against the 4th-order RDF operator
        X0, Y0 = run.states[k - 1]
        X2, Y2 = run.states[k + 1]
        X1, Y1 = run.states[k]
        dX, dY, _ = _state_rhs(xi, cot, X1, Y1, h, q, order=4)
        a1 = np.exp(X1)
        b1 = np.sin(xi) ** 2 * np.exp(Y1)
        sr_a = (np.exp(X2) - np.exp(X0)) / dt2 - a1 * dX
        sr_b = np.sin(xi) ** 2 * (np.exp(Y2) - np.exp(Y0)) / dt2 - b1 * dY
        sr = max(
            np.abs(sr_a[rows] / ab[rows]).max(),
            np.abs(sr_b[rows] / bb[rows]).max(),
        )
        solver_res = max(solver_res, sr)

    return {
        "residual": float(res),
        "solver_residual": float(solver_res),
        "times": times,
        "psi": psi_at,
    }
