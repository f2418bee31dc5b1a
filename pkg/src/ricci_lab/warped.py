"""Singular multiply-warped sphere metrics and their adapted-frame curvature.

The metric family on S^(n-1), for beta = (b_1, ..., b_{n-1}) in (0,1]^{n-1}:

    g_beta = b_1^2 ( dx_1^2 + b_2^2 sin^2(x_1) ( dx_2^2 + ... ) )

built inductively as spherical suspensions: each level is a single warped
layer b^2 (dx^2 + sin^2(x) h) over the next link h, ending in a circle.
A layer with link curvature operator bounded below by K has, in
g-orthonormal frames,

    mixed planes   (radial ∧ fiber):  1/b^2            (exactly),
    fiber planes:  at least (csc^2(x) K - cot^2(x)) / b^2,

so K >= 1 gives curvature operator >= 1/b^2 at every interior x.  The
raw coframe version of the fiber formula carries sin-power factors; the
fiber-unit form above is the one validated against the coordinate oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .fd_curvature import CurvatureReport

__all__ = [
    "SuspensionSpec",
    "WarpLayer",
    "SuspensionChain",
    "SingularStratumError",
    "build_suspension",
    "layer_curvature",
    "min_rm_over_suspension",
]

#: samples must keep |sin x_i| at or above this margin away from strata
STRATA_MARGIN = 1e-3


class SingularStratumError(ValueError):
    """Raised when a curvature evaluation touches a singular stratum."""


@dataclass(frozen=True)
class SuspensionSpec:
    """The beta-vector defining the singular warped metric on S^(n-1).

    ``n`` is the ambient dimension (the sphere is S^(n-1)); ``beta`` has
    n-1 entries in (0, 1].
    """

    n: int
    beta: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        if self.n < 3:
            raise ValueError(f"need n >= 3, got n={self.n}")
        if len(self.beta) != self.n - 1:
            raise ValueError(
                f"beta must have n-1={self.n - 1} entries, got {len(self.beta)}"
            )
        for b in self.beta:
            if not (0.0 < b <= 1.0):
                raise ValueError(f"beta entries must lie in (0,1], got {b}")

    def to_dict(self) -> dict:
        return {"n": self.n, "beta": list(self.beta)}

    @classmethod
    def from_dict(cls, d: dict) -> "SuspensionSpec":
        return cls(n=int(d["n"]), beta=tuple(d["beta"]))


@dataclass(frozen=True)
class WarpLayer:
    """One suspension layer g = beta^2 (dx^2 + sin^2(x) h).

    ``fiber_dim`` is the dimension m >= 1 of the link (N, h) and
    ``fiber_rm_min`` a lower bound for the curvature operator of h in
    h-orthonormal frames (ignored when m = 1; a circle carries no
    curvature).  ``x`` must be strictly interior to (0, pi).
    """

    beta: float
    fiber_dim: int
    fiber_rm_min: float
    x: float

    def __post_init__(self):
        if not (0.0 < self.beta <= 1.0):
            raise ValueError(f"beta must lie in (0,1], got {self.beta}")
        if self.fiber_dim < 1:
            raise ValueError("fiber_dim must be >= 1")
        if not (0.0 < self.x < np.pi):
            raise SingularStratumError(
                f"x={self.x} is not interior to (0, pi); curvature undefined at tips"
            )


@dataclass(frozen=True)
class SuspensionChain:
    """Nested representation of g_beta: outermost layer first.

    ``betas[i]`` warps the suspension over the sub-chain ``betas[i+1:]``;
    the chain ends in a circle of circumference 2*pi*betas[-1] (intrinsic
    link metric).  ``singular_strata`` lists the coordinate levels whose
    tips {sin x_i = 0} are genuine metric singularities, i.e. those whose
    link is not the unit round sphere.
    """

    spec: SuspensionSpec
    betas: tuple[float, ...]
    singular_strata: tuple[int, ...]

    @property
    def n(self) -> int:
        return self.spec.n

    def metric_matrix(self, x: Sequence[float]) -> np.ndarray:
        """Metric components diag(g_11, ..., g_{n-1,n-1}) at interior x.

        ``x`` supplies the n-2 polar angles (x_1, ..., x_{n-2}); the last
        coordinate x_{n-1} is the circle angle, on which nothing depends.
        """
        x = np.asarray(x, dtype=float)
        d = self.n - 1
        if x.size not in (d - 1, d):
            raise ValueError(f"expected {d - 1} (or {d}) coordinates, got {x.size}")
        angles = x[: d - 1]
        diag = np.empty(d)
        beta_sq_prod = 1.0
        sin_sq_prod = 1.0
        for i in range(d):
            beta_sq_prod *= self.betas[i] ** 2
            diag[i] = beta_sq_prod * sin_sq_prod
            if i < d - 1:
                sin_sq_prod *= np.sin(angles[i]) ** 2
        return np.diag(diag)

    def metric_fn(self, margin: float = STRATA_MARGIN):
        """Callable chart metric for the coordinate oracle, with a strata guard."""

        def metric(x: np.ndarray) -> np.ndarray:
            angles = np.asarray(x, dtype=float)[: self.n - 2]
            if np.any(np.abs(np.sin(angles)) < margin):
                raise SingularStratumError(
                    f"sample {angles} is within {margin} of a singular stratum"
                )
            return self.metric_matrix(x)

        return metric


def build_suspension(spec: SuspensionSpec) -> SuspensionChain:
    """Assemble the layer chain for g_beta and record its singular strata.

    The tip set {sin x_i = 0} is singular exactly when the link metric
    g_(beta_{i+1}, ..., beta_{n-1}) is not the unit round sphere, i.e.
    when any beta_j < 1 for j > i.
    """
    betas = spec.beta
    strata = []
    for i in range(spec.n - 2):  # levels with a sin x_i factor
        if any(b < 1.0 for b in betas[i + 1 :]):
            strata.append(i + 1)  # 1-based coordinate level
    return SuspensionChain(spec=spec, betas=betas, singular_strata=tuple(strata))


def layer_curvature(layer: WarpLayer) -> CurvatureReport:
    """Adapted-frame curvature of a single warped layer.

    Mixed 2-planes (radial with a fiber direction) carry curvature exactly
    1/beta^2 regardless of the link.  Fiber 2-planes are bounded below by
    (csc^2(x) * fiber_rm_min - cot^2(x)) / beta^2; the report's sectional
    and Ricci entries model the link at the bound (constant curvature
    fiber), which is exact for round links and extremal otherwise.  For
    m = 1 the layer is a surface of constant Gauss curvature 1/beta^2.
    """
    b2 = layer.beta**2
    mixed = 1.0 / b2
    m = layer.fiber_dim

    if m == 1:
        ricci = np.array([mixed, mixed])
        return CurvatureReport(
            point=np.array([layer.x]),
            sectional_min=mixed,
            sectional_max=mixed,
            rm_operator_min_eig=mixed,
            ricci_eigs=ricci,
            scalar=float(ricci.sum()),
        )

    s = np.sin(layer.x)
    c = np.cos(layer.x)
    fiber = (layer.fiber_rm_min / s**2 - (c / s) ** 2) / b2
    ric_radial = m * mixed
    ric_fiber = mixed + (m - 1) * fiber
    ricci = np.sort(np.array([ric_radial] + [ric_fiber] * m))
    scalar = 2.0 * (m * mixed + 0.5 * m * (m - 1) * fiber)
    return CurvatureReport(
        point=np.array([layer.x]),
        sectional_min=float(min(mixed, fiber)),
        sectional_max=float(max(mixed, fiber)),
        rm_operator_min_eig=float(min(mixed, fiber)),
        ricci_eigs=ricci,
        scalar=float(scalar),
    )


def _rm_min_recursive(betas: Sequence[float], angles: Sequence[float]) -> float:
    """Min curvature-operator eigenvalue of the chain at fixed angles.

    The inner chain's bound feeds the next layer as its fiber_rm_min;
    the curvature operator of a warped layer is block diagonal (mixed
    planes against fiber 2-forms), so the minimum over blocks is exact.
    """
    k = len(betas)
    if k == 1:
        return np.inf  # bare circle: no 2-planes
    fiber_dim = k - 1
    if fiber_dim == 1:
        # surface layer: constant Gauss curvature, no fiber planes
        return 1.0 / betas[0] ** 2
    inner = _rm_min_recursive(betas[1:], angles[1:])
    layer = WarpLayer(
        beta=betas[0], fiber_dim=fiber_dim, fiber_rm_min=inner, x=angles[0]
    )
    return layer_curvature(layer).rm_operator_min_eig


def min_rm_over_suspension(
    spec: SuspensionSpec, sample_grid: Sequence[Sequence[float]]
) -> float:
    """Minimum curvature-operator eigenvalue of g_beta over the samples.

    Each sample supplies the n-2 polar angles; samples must respect the
    strata margin (|sin x_i| >= 1e-3).
    """
    chain = build_suspension(spec)
    best = np.inf
    for point in sample_grid:
        angles = np.asarray(point, dtype=float)
        if angles.size != spec.n - 2:
            raise ValueError(f"samples need {spec.n - 2} angles, got {angles.size}")
        if np.any(np.abs(np.sin(angles)) < STRATA_MARGIN):
            raise SingularStratumError(f"sample {angles} touches a singular stratum")
        best = min(best, _rm_min_recursive(chain.betas, angles))
    return float(best)
