"""Parameter-space combinatorics: the simplices Omega, Delta*, Delta.

For ambient dimension n the three spaces live in R^(n-1):

    Omega  = {beta in [0,1]^{n-1} : some beta_i = 0}
    Delta* = {lambda in [0,1]^{n-1} : l_1 + ... + l_{n-2} + 2 l_{n-1} = 1}
    Delta  = {lambda in Delta* : l_1 <= ... <= l_{n-1}}

The trace form uses weights w = (1, ..., 1, 2) (the last eigenvalue is
doubled).  Faces are indexed by strictly increasing tuples
1 <= i_1 < ... < i_{k+1} <= n-1 with i_{k+2} = n by convention:
Omega_k fixes beta_i = 1 off the tuple; Delta*_k requires constant runs
l_{i_j} = ... = l_{i_{j+1}-1} (plus leading zeros when i_1 > 1); Delta_k
additionally sorts.  Delta is spanned by the vertices
Delta_0(k) = (0, ..., 0, 1/(n+1-k), ..., 1/(n+1-k)) with k-1 zeros.

This module implements membership tests, the sorting contraction
r : Delta* -> Delta, the collapse maps Phi (identity away from the facet
Sigma = {l_1 = 0}, projection onto it nearby, face-preserving), brute
force degree of PL self-maps of face boundaries, and grid surjectivity
checks.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "SimplexPoint",
    "FaceDescriptor",
    "FacePreservationError",
    "RegularValueError",
    "weights",
    "weighted_sum",
    "face_membership",
    "delta_vertex",
    "omega_vertex",
    "face_vertices",
    "contraction_r",
    "PhiMap",
    "build_phi",
    "project_to_sigma",
    "dist_to_sigma",
    "pl_degree",
    "surjectivity_check",
    "random_delta_star_point",
    "random_face_point",
    "random_face_preserving_map",
    "barycentric_chart",
]

TOL = 1e-12


class FacePreservationError(ValueError):
    """A map required to preserve faces sends a face off itself."""


class RegularValueError(RuntimeError):
    """No regular value found for the degree count at this resolution."""


def weights(n: int) -> np.ndarray:
    """Trace-form weights (1, ..., 1, 2) on R^(n-1)."""
    w = np.ones(n - 1)
    w[-1] = 2.0
    return w


def weighted_sum(lam: np.ndarray) -> float:
    lam = np.asarray(lam, dtype=float)
    return float(lam[:-1].sum() + 2.0 * lam[-1])


@dataclass(frozen=True)
class SimplexPoint:
    coords: tuple[float, ...]
    space: str  # "Omega" | "DeltaStar" | "Delta"

    def __post_init__(self):
        if self.space not in ("Omega", "DeltaStar", "Delta"):
            raise ValueError(f"unknown space {self.space!r}")
        object.__setattr__(self, "coords", tuple(float(v) for v in self.coords))
        arr = self.as_array()
        if np.any(arr < -TOL) or np.any(arr > 1 + TOL):
            raise ValueError("coordinates must lie in [0,1]")
        if self.space == "Omega":
            if arr.min() > TOL:
                raise ValueError("Omega points need some beta_i = 0")
        else:
            if abs(weighted_sum(arr) - 1.0) > 1e-9:
                raise ValueError("trace identity l_1+...+2 l_{n-1} = 1 violated")
            if self.space == "Delta" and np.any(np.diff(arr) < -1e-9):
                raise ValueError("Delta points must be sorted non-decreasing")

    @property
    def n(self) -> int:
        return len(self.coords) + 1

    def as_array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


@dataclass(frozen=True)
class FaceDescriptor:
    """k-face label: strictly increasing 1-based indices (i_1,...,i_{k+1})."""

    k: int
    indices: tuple[int, ...]
    space: str

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        object.__setattr__(self, "indices", idx)
        if len(idx) != self.k + 1:
            raise ValueError("a k-face needs k+1 indices")
        if any(a >= b for a, b in zip(idx, idx[1:])) or idx[0] < 1:
            raise ValueError("indices must satisfy 1 <= i_1 < ... <= n-1")
        if self.space not in ("Omega", "DeltaStar", "Delta"):
            raise ValueError(f"unknown space {self.space!r}")


def _blocks(face: FaceDescriptor, n: int):
    """0-based [start, stop) coordinate ranges of each constant run."""
    idx = face.indices + (n,)
    return [(idx[j] - 1, idx[j + 1] - 1) for j in range(len(face.indices))]


def face_membership(p: SimplexPoint, face: FaceDescriptor, tol: float = TOL) -> bool:
    """Exact face test with tolerance ``tol`` on the defining equalities."""
    if p.space != face.space:
        raise ValueError(f"point in {p.space} tested against face in {face.space}")
    lam = p.as_array()
    n = p.n
    if face.indices[-1] > n - 1:
        raise ValueError("face indices exceed n-1")
    if face.space == "Omega":
        fixed = [i for i in range(1, n) if i not in face.indices]
        return all(abs(lam[i - 1] - 1.0) <= tol for i in fixed) and lam.min() <= tol
    # Delta* / Delta: constant runs, leading zeros, sortedness for Delta
    if face.indices[0] > 1:
        if np.any(np.abs(lam[: face.indices[0] - 1]) > tol):
            return False
    for lo, hi in _blocks(face, n):
        seg = lam[lo:hi]
        if seg.size and seg.max() - seg.min() > tol:
            return False
    if face.space == "Delta" and np.any(np.diff(lam) < -tol):
        return False
    return True


def delta_vertex(n: int, k: int) -> SimplexPoint:
    """Vertex Delta_0(k) = (0,...,0, 1/(n+1-k), ..., 1/(n+1-k)), k-1 zeros."""
    if not (1 <= k <= n - 1):
        raise ValueError(f"vertex index k must satisfy 1 <= k <= n-1, got {k}")
    v = np.zeros(n - 1)
    v[k - 1 :] = 1.0 / (n + 1 - k)
    return SimplexPoint(tuple(v), "Delta")


def omega_vertex(n: int, k: int) -> SimplexPoint:
    """Vertex Omega_0(k) = (1,...,1,0,1,...,1) with the zero at slot k."""
    if not (1 <= k <= n - 1):
        raise ValueError(f"vertex index k must satisfy 1 <= k <= n-1, got {k}")
    v = np.ones(n - 1)
    v[k - 1] = 0.0
    return SimplexPoint(tuple(v), "Omega")


def face_vertices(face: FaceDescriptor, n: int) -> np.ndarray:
    """Ambient coordinates of the k+1 vertices spanning a Delta face."""
    if face.space != "Delta":
        raise ValueError("vertex hulls are only provided for Delta faces")
    return np.stack([delta_vertex(n, i).as_array() for i in face.indices])


# ---------------------------------------------------------------------------
# contraction r : Delta* -> Delta


def contraction_r(p: SimplexPoint | Sequence[float]) -> SimplexPoint:
    """Sorting contraction onto Delta, preserving the weighted trace sum.

    Left-to-right scan: on a strict descent between positions l and l+1,
    the prefix is rescaled by 1/nu and position l+1 overwritten with the
    rescaled prefix value, with nu chosen so the weighted sum of the
    affected prefix is unchanged.  Equal runs stay equal (the prefix is
    divided by one common factor), so every Delta*-face maps into the
    matching Delta-face and points of Delta are exact fixed points.
    """
    if isinstance(p, SimplexPoint):
        lam = p.as_array().copy()
    else:
        lam = np.asarray(p, dtype=float).copy()
    w = weights(lam.size + 1)
    for ell in range(lam.size - 1):
        if lam[ell] <= lam[ell + 1]:
            continue
        num = float(np.dot(w[: ell + 1], lam[: ell + 1])) + w[ell + 1] * lam[ell]
        den = float(np.dot(w[: ell + 2], lam[: ell + 2]))
        nu = num / den
        lam[: ell + 1] /= nu
        lam[ell + 1] = lam[ell]
    return SimplexPoint(tuple(lam), "Delta")


# ---------------------------------------------------------------------------
# the collapse map Phi (Sigma = {l_1 = 0} facet of Delta*)


def _sigma_projection(lam: np.ndarray, c: float, w: np.ndarray) -> np.ndarray:
    """Soft-threshold retraction: clip at level c, renormalize the trace.

    Preserves equal runs, zeros, and order, hence maps every Delta*-face
    into itself; c = l_1 sends the whole leading run to zero, landing on
    Sigma.
    """
    clipped = np.maximum(lam - c, 0.0)
    total = float(np.dot(w, clipped))
    return clipped / total


@dataclass(frozen=True)
class PhiMap:
    """Continuous self-map of Delta* collapsing a neighborhood of Sigma.

    With u = l_1: identity for u >= b, full projection onto Sigma for
    u <= a, PL-interpolated threshold in between (a = eps/C < b).  The
    constants are chosen so that, with d = dist(., Sigma):
    d >= eps implies identity (property 1), d <= eps/C implies the image
    lies on Sigma with displacement <= C*eps (property 2), and faces are
    preserved exactly (property 3).
    """

    n: int
    epsilon: float
    C: float
    a: float
    b: float

    def __call__(self, lam: Sequence[float]) -> np.ndarray:
        lam = np.asarray(lam, dtype=float)
        u = lam[0]
        if u >= self.b:
            return lam.copy()
        if u <= self.a:
            c = u
        else:
            c = u * (self.b - u) / (self.b - self.a)
            c = min(c, u)
        w = weights(self.n)
        return _sigma_projection(lam, c, w)

    def on_point(self, p: SimplexPoint) -> SimplexPoint:
        return SimplexPoint(tuple(self(p.as_array())), p.space)


def build_phi(n: int, epsilon: float, C: float | None = None,
              resolution: int = 64) -> PhiMap:
    """Concrete realization of the collapse map onto Sigma = {l_1 = 0}.

    ``C`` defaults to twice the distance-comparison constant
    K_n = 2(n+1) sqrt(n-1) (which bounds dist(p, Sigma) <= K_n * l_1);
    any C > K_n yields a valid map.  ``resolution`` is kept for sampling
    verifiers; the map itself is closed-form and exactly face-preserving.
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    K_n = 2.0 * (n + 1) * np.sqrt(n - 1.0)
    if C is None:
        C = 2.0 * K_n
    if C <= K_n:
        raise ValueError(f"C must exceed K_n = {K_n:.3f} for n = {n}")
    if resolution < 2:
        raise ValueError("resolution too coarse to respect face-preservation")
    b = epsilon / K_n
    a = epsilon / C
    return PhiMap(n=n, epsilon=epsilon, C=float(C), a=a, b=b)


def project_to_sigma(lam: Sequence[float]) -> np.ndarray:
    """Euclidean projection onto Sigma = {l in Delta*: l_1 = 0}.

    Waterfilling in the weighted trace constraint: q_i = max(l_i + w_i t, 0)
    for i >= 2, with t solving sum w_i q_i = 1.  Used as the independent
    distance oracle in tests.
    """
    lam = np.asarray(lam, dtype=float)
    w = weights(lam.size + 1)
    p, wp = lam[1:], w[1:]

    def total(t):
        return float(np.dot(wp, np.maximum(p + wp * t, 0.0)))

    t_lo, t_hi = -1.0, 1.0
    while total(t_lo) > 1.0:
        t_lo *= 2.0
    while total(t_hi) < 1.0:
        t_hi *= 2.0
    for _ in range(200):
        t_mid = 0.5 * (t_lo + t_hi)
        if total(t_mid) < 1.0:
            t_lo = t_mid
        else:
            t_hi = t_mid
    q = np.concatenate([[0.0], np.maximum(p + wp * t_hi, 0.0)])
    return q


def dist_to_sigma(lam: Sequence[float]) -> float:
    lam = np.asarray(lam, dtype=float)
    return float(np.linalg.norm(lam - project_to_sigma(lam)))


# ---------------------------------------------------------------------------
# barycentric charts, subdivision, degree


def barycentric_chart(vertices: np.ndarray):
    """Maps between ambient points of a k-face and R^k chart coordinates.

    The chart sends vertex 0 to the origin and vertex j to e_j; returns
    (to_chart, to_ambient) closures operating on single points or on
    (N, dim) batches.  Ambient points are assumed to lie on the face's
    affine hull (pseudo-inverse solve).
    """
    vertices = np.asarray(vertices, dtype=float)
    base = vertices[0]
    span = (vertices[1:] - base).T  # ambient_dim x k
    pinv = np.linalg.pinv(span)  # k x ambient_dim

    def to_chart(p):
        p = np.asarray(p, dtype=float)
        return (p - base) @ pinv.T

    def to_ambient(y):
        y = np.asarray(y, dtype=float)
        return base + y @ span.T

    return to_chart, to_ambient


def _boundary_mesh(k: int, N: int):
    """Triangulated boundary of the standard k-simplex in the R^k chart.

    Returns (verts, cells): unique subdivision vertices (V, k) and integer
    index triples/pairs (C, k) into them.  Vertices are keyed by their
    exact integer lattice coordinates (denominator N), so facets share
    vertices along common edges.
    """
    chart_vs = np.vstack([np.zeros(k), np.eye(k)])
    vert_index: dict[tuple, int] = {}
    verts: list[np.ndarray] = []
    cells: list[tuple[int, ...]] = []

    def vid(y_int):
        key = tuple(int(v) for v in y_int)
        if key not in vert_index:
            vert_index[key] = len(verts)
            verts.append(np.array(key, dtype=float) / N)
        return vert_index[key]

    for omit in range(k + 1):
        fv = [np.rint(chart_vs[i] * N).astype(int) for i in range(k + 1) if i != omit]
        if k == 2:
            e0, e1 = fv
            for i in range(N):
                cells.append(
                    (vid((e0 * (N - i) + e1 * i) // N),
                     vid((e0 * (N - i - 1) + e1 * (i + 1)) // N))
                )
        elif k == 3:
            w0, w1, w2 = fv
            def lat(i, j):
                return (w0 * (N - i - j) + w1 * i + w2 * j) // N
            for i in range(N):
                for j in range(N - i):
                    cells.append((vid(lat(i, j)), vid(lat(i + 1, j)), vid(lat(i, j + 1))))
                    if i + j < N - 1:
                        cells.append(
                            (vid(lat(i + 1, j)), vid(lat(i + 1, j + 1)), vid(lat(i, j + 1)))
                        )
        else:
            raise NotImplementedError("degree computation supports k in {1,2,3}")
    return np.stack(verts), np.array(cells, dtype=int)


def pl_degree(
    f: Callable[[np.ndarray], np.ndarray],
    vertices: np.ndarray,
    resolution: int = 64,
    rng: np.random.Generator | None = None,
    max_tries: int = 20,
) -> int:
    """Degree of ``f`` restricted to the boundary of the face hull.

    ``f`` maps ambient face points to ambient face points; it is sampled
    at the vertices of a resolution-``resolution`` simplicial subdivision
    of the boundary sphere and treated as simplicial.  The degree is the
    signed count of PL preimages of a ray from the barycenter through a
    random regular direction; irregular directions are retried with fresh
    jitter and exhausted tries raise RegularValueError.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    vertices = np.asarray(vertices, dtype=float)
    k = vertices.shape[0] - 1
    to_chart, to_ambient = barycentric_chart(vertices)

    if k == 1:
        e0, e1 = vertices
        same = np.linalg.norm(f(e0) - e0) + np.linalg.norm(f(e1) - e1)
        swap = np.linalg.norm(f(e0) - e1) + np.linalg.norm(f(e1) - e0)
        return 1 if same <= swap else -1

    mesh_verts, cells = _boundary_mesh(k, resolution)
    b = np.full(k, 1.0 / (k + 1))

    ambient = to_ambient(mesh_verts)
    images = np.stack([to_chart(f(p)) for p in ambient])

    X = mesh_verts[cells] - b  # (C, k, k): domain simplex vertices about b
    Y = images[cells] - b  # (C, k, k): image simplex vertices about b
    s_dom = np.sign(np.linalg.det(np.swapaxes(X, 1, 2)))
    dets = np.linalg.det(np.swapaxes(Y, 1, 2))
    s_img = np.sign(dets)

    C = cells.shape[0]
    lam_tol = 1e-9
    for _ in range(max_tries):
        u = rng.normal(size=k)
        u /= np.linalg.norm(u)
        M = np.zeros((C, k + 1, k + 1))
        M[:, :k, :k] = np.swapaxes(Y, 1, 2)
        M[:, :k, k] = -u
        M[:, k, :k] = 1.0
        rhs = np.zeros((C, k + 1))
        rhs[:, k] = 1.0
        ok = np.abs(np.linalg.det(M)) > 1e-14
        sol = np.full((C, k + 1), -1.0)
        if ok.any():
            sol[ok] = np.linalg.solve(M[ok], rhs[ok][..., None])[..., 0]
        lam, t = sol[:, :k], sol[:, k]
        hits = (t > lam_tol) & np.all(lam > lam_tol, axis=1) & ok
        grazes = (
            (t > lam_tol)
            & np.all(lam > -lam_tol, axis=1)
            & np.any(lam <= lam_tol, axis=1)
            & ok
        )
        if grazes.any():
            continue  # irregular direction: retry with fresh jitter
        return int(np.sum(s_img[hits] * s_dom[hits]))
    raise RegularValueError(
        f"no regular direction found in {max_tries} tries at resolution {resolution}"
    )


# ---------------------------------------------------------------------------
# surjectivity / coverage


def _check_face_preserving(f, face: FaceDescriptor, n: int, rng, samples: int = 40):
    """Verify f maps every subface of ``face`` into itself, else raise."""
    idx = face.indices
    for sub_k in range(face.k + 1):
        for sub in combinations(idx, sub_k + 1):
            sub_face = FaceDescriptor(k=sub_k, indices=sub, space=face.space)
            pts = [face_vertices(sub_face, n)[j] for j in range(sub_k + 1)]
            pts += [random_face_point(sub_face, n, rng).as_array() for _ in range(samples)]
            for lam in pts:
                try:
                    image = SimplexPoint(tuple(np.clip(f(lam), 0, 1)), face.space)
                    ok = face_membership(image, sub_face, tol=1e-7)
                except ValueError:
                    ok = False
                if not ok:
                    raise FacePreservationError(
                        f"face {sub_face.indices} not preserved at {lam}"
                    )


def surjectivity_check(
    f: Callable[[np.ndarray], np.ndarray],
    face: FaceDescriptor,
    n: int,
    grid_resolution: int = 64,
    rng: np.random.Generator | None = None,
) -> dict:
    """Covering test for a face-preserving map on a Delta face.

    Face preservation is verified first (vertices plus sampled interiors
    of every subface).  The face is then binned at ``grid_resolution``
    cells per barycentric axis; a dense set of domain samples is pushed
    through ``f`` and each target cell must receive an image point.
    Returns {"face", "resolution", "max_gap", "mesh_size", "covered",
    "cells"}, where max_gap is the largest distance from an uncovered
    cell center to the nearest image point (ambient units).
    """
    rng = np.random.default_rng(0) if rng is None else rng
    verts = face_vertices(face, n)
    _check_face_preserving(f, face, n, rng)
    k = face.k
    to_chart, to_ambient = barycentric_chart(verts)

    M = grid_resolution
    dense = 3 * M

    def lattice(depth):
        """Barycentric lattice y in R^k with sum <= 1 at the given depth."""
        pts = []

        def rec(prefix, remaining, slots):
            if slots == 0:
                pts.append(np.array(prefix, dtype=float) / depth)
                return
            for v in range(remaining + 1):
                rec(prefix + [v], remaining - v, slots - 1)

        rec([], depth, k)
        return np.stack(pts)

    domain = lattice(dense)
    images = np.stack([to_chart(f(to_ambient(y))) for y in domain])

    def cell_of(y):
        c = np.floor(y * M).astype(int)
        c = np.clip(c, 0, M - 1)
        return tuple(c)

    covered = set(cell_of(y) for y in images)
    edge = max(np.linalg.norm(verts[i] - verts[0]) for i in range(1, k + 1))
    mesh_size = edge / M

    max_gap = 0.0
    n_cells = 0
    uncovered = 0
    centers = lattice(M)  # cell corner lattice; use shifted centers
    for y in centers:
        c = y + 0.5 / M
        if c.sum() > 1.0:
            continue
        n_cells += 1
        if cell_of(c) in covered:
            continue
        uncovered += 1
        d = np.min(np.linalg.norm(images - c, axis=1))
        max_gap = max(max_gap, d * edge)  # chart distance scaled to ambient
    return {
        "face": list(face.indices),
        "resolution": M,
        "mesh_size": float(mesh_size),
        "max_gap": float(max_gap),
        "cells": n_cells,
        "covered": n_cells - uncovered,
    }


# ---------------------------------------------------------------------------
# sampling helpers and random face-preserving maps


def random_delta_star_point(n: int, rng: np.random.Generator) -> SimplexPoint:
    """Uniform-ish sample of Delta*: Dirichlet mass split by the weights."""
    y = rng.dirichlet(np.ones(n - 1))
    lam = y / weights(n)
    return SimplexPoint(tuple(lam), "DeltaStar")


def random_face_point(face: FaceDescriptor, n: int, rng) -> SimplexPoint:
    """Random point of a Delta*/Delta face (block values resampled)."""
    mu = rng.random(face.k + 1) + 1e-3
    if face.space == "Delta":
        mu = np.sort(mu)
    lam = np.zeros(n - 1)
    for (lo, hi), m in zip(_blocks(face, n), mu):
        lam[lo:hi] = m
    lam /= weighted_sum(lam)
    return SimplexPoint(tuple(lam), face.space)


def random_face_preserving_map(
    vertices: np.ndarray, rng: np.random.Generator, strength: float = 0.35
):
    """Random face-preserving homeomorphism of a face hull.

    Composition of barycentric vertex-weight rescalings and coordinate
    power maps: both fix each vertex, preserve every zero-pattern subface
    (hence every geometric subface of the hull), and are homeomorphisms,
    so the Lemma-A.1 hypotheses hold and the degree on each boundary
    sphere is 1.
    """
    vertices = np.asarray(vertices, dtype=float)
    k = vertices.shape[0] - 1
    to_chart, to_ambient = barycentric_chart(vertices)
    d_weights = np.exp(rng.uniform(-strength, strength, size=k + 1))
    powers = np.exp(rng.uniform(-strength, strength, size=k + 1))

    def fmap(p):
        y = to_chart(p)
        bary = np.concatenate([[1.0 - y.sum()], y])
        bary = np.clip(bary, 0.0, None)
        bary = bary**powers * d_weights
        bary /= bary.sum()
        return to_ambient(bary[1:])

    return fmap
