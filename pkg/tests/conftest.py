"""Shared fixtures: expensive solver artifacts computed once per session."""

from __future__ import annotations

import numpy as np
import pytest

from ricci_lab.deturck import (
    PerturbationField,
    deturck_evolve,
    shrinking_round_background,
)
from ricci_lab.flow import (
    GlueParams,
    evolve_ricci_flow,
    glue_expander,
    suspension_to_grid,
)
from ricci_lab.solitons import bryant_shoot, cigar_profile, expander_shoot

SMOOTHING_BETA = 0.8
SMOOTHING_N = 4
SMOOTHING_T = 0.105


@pytest.fixture(scope="session")
def bryant_profiles():
    return {n: bryant_shoot(n, r_max=50.0, tol=1e-10) for n in (3, 4, 5)}


@pytest.fixture(scope="session")
def cigar():
    return cigar_profile(30.0)


@pytest.fixture(scope="session")
def expanders():
    out = {}
    for n in (3, 4):
        for beta in (0.5, 0.9):
            out[(n, beta)] = expander_shoot(n, beta, r_max=50.0, tol=1e-8)
    return out


@pytest.fixture(scope="session")
def round_flow():
    grid = suspension_to_grid(1.0, 4, 256)
    return grid, evolve_ricci_flow(grid, T=0.124)


@pytest.fixture(scope="session")
def glue_expander_profile():
    # long enough for the widest band used in the suite (s = 1e-4)
    return expander_shoot(
        SMOOTHING_N - 1, SMOOTHING_BETA, r_max=1.3 * 3 * (1e-4) ** -0.25, tol=1e-8
    )


@pytest.fixture(scope="session")
def smoothing_runs(glue_expander_profile):
    runs = {}
    for s, res, cluster in ((1e-3, 384, 0.45), (1e-4, 512, 0.6)):
        grid = suspension_to_grid(SMOOTHING_BETA, SMOOTHING_N, res, cluster)
        glued = glue_expander(grid, glue_expander_profile, GlueParams(s=s))
        traj = evolve_ricci_flow(glued, T=SMOOTHING_T)
        runs[s] = {"grid": grid, "glued": glued, "traj": traj}
    return runs


@pytest.fixture(scope="session")
def deturck_background():
    return shrinking_round_background(1.0, 4, 256)


@pytest.fixture(scope="session")
def deturck_conformal_runs(deturck_background):
    bg = deturck_background
    m = bg.x_grid.size
    out = {}
    for eps in (1e-3, 1e-2):
        pert = PerturbationField(np.full(m, eps), np.full(m, eps))
        out[eps] = deturck_evolve(bg, pert, T=0.15, n_records=100)
    return out


@pytest.fixture(scope="session")
def deturck_bump_run(deturck_background):
    bg = deturck_background
    x = bg.x_grid
    bump = 1e-2 * np.exp(-(((x - np.pi / 2) / 0.5) ** 2))
    pert = PerturbationField(np.zeros(x.size), bump)
    return deturck_evolve(bg, pert, T=0.05, n_records=200)
