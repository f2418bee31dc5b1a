import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ricci_lab.simplex import (
    FaceDescriptor,
    FacePreservationError,
    SimplexPoint,
    barycentric_chart,
    build_phi,
    contraction_r,
    delta_vertex,
    dist_to_sigma,
    face_membership,
    face_vertices,
    omega_vertex,
    pl_degree,
    project_to_sigma,
    random_delta_star_point,
    random_face_point,
    random_face_preserving_map,
    surjectivity_check,
    weighted_sum,
)


class TestMembership:
    def test_omega_vertex(self):
        p = SimplexPoint((1.0, 0.0, 1.0), "Omega")
        assert face_membership(p, FaceDescriptor(0, (2,), "Omega"))
        assert not face_membership(p, FaceDescriptor(0, (1,), "Omega"))

    def test_delta_vertex_membership(self):
        p = SimplexPoint((0.25, 0.25, 0.25), "Delta")
        assert face_membership(p, FaceDescriptor(0, (1,), "Delta"))
        assert p.coords == delta_vertex(4, 1).coords

    def test_unsorted_delta_star_point(self):
        lam = (0.5, 0.1, 0.2)
        assert abs(weighted_sum(np.array(lam)) - 1) < 1e-15
        SimplexPoint(lam, "DeltaStar")  # valid in Delta*
        with pytest.raises(ValueError):
            SimplexPoint(lam, "Delta")  # not sorted

    def test_space_mismatch(self):
        p = SimplexPoint((0.25, 0.25, 0.25), "Delta")
        with pytest.raises(ValueError, match="tested against"):
            face_membership(p, FaceDescriptor(0, (1,), "Omega"))

    def test_leading_zero_faces(self):
        # i_1 > 1 requires vanishing leading entries
        p = SimplexPoint((0.0, 1 / 3, 1 / 3), "DeltaStar")
        assert face_membership(p, FaceDescriptor(1, (2, 3), "DeltaStar"))
        q = SimplexPoint((0.1, 0.3, 0.3), "DeltaStar")
        assert not face_membership(q, FaceDescriptor(1, (2, 3), "DeltaStar"))


class TestVertices:
    def test_delta_vertices_n4(self):
        assert delta_vertex(4, 1).coords == (0.25, 0.25, 0.25)
        assert delta_vertex(4, 2).coords == (0.0, 1 / 3, 1 / 3)
        assert delta_vertex(4, 3).coords == (0.0, 0.0, 0.5)

    def test_trace_exact(self):
        for n in (4, 5, 6):
            for k in range(1, n):
                v = delta_vertex(n, k).as_array()
                assert weighted_sum(v) == pytest.approx(1.0, abs=1e-15)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            delta_vertex(4, 0)
        with pytest.raises(ValueError):
            omega_vertex(4, 4)


class TestContraction:
    def test_worked_example(self):
        r = contraction_r(SimplexPoint((0.5, 0.1, 0.2), "DeltaStar"))
        assert r.coords == pytest.approx((0.25, 0.25, 0.25), abs=1e-15)

    def test_fixes_delta_exactly(self):
        rng = np.random.default_rng(5)
        for _ in range(2000):
            mu = np.sort(rng.random(3))
            lam = mu / weighted_sum(mu)
            out = contraction_r(lam).as_array()
            assert np.array_equal(out, lam)

    def test_idempotent_and_weight_preserving(self):
        rng = np.random.default_rng(6)
        for n in (4, 5, 6):
            for _ in range(2500):
                p = random_delta_star_point(n, rng)
                r1 = contraction_r(p)
                r2 = contraction_r(r1)
                assert np.abs(r2.as_array() - r1.as_array()).max() <= 1e-12
                assert abs(
                    weighted_sum(r1.as_array()) - weighted_sum(p.as_array())
                ) <= 1e-12

    def test_boundary_mapping(self):
        # points of a Delta*-face off Delta land on the face boundary
        rng = np.random.default_rng(7)
        n = 4
        face = FaceDescriptor(2, (1, 2, 3), "DeltaStar")
        for _ in range(300):
            p = random_face_point(face, n, rng)
            if np.all(np.diff(p.as_array()) >= 0):
                continue  # already sorted: interior case
            img = contraction_r(p).as_array()
            runs = np.isclose(img[:-1], img[1:], atol=1e-12).sum()
            zeros = np.isclose(img, 0, atol=1e-12).sum()
            assert runs + zeros >= 1  # an extra equality: a proper subface

    @given(st.lists(st.floats(1e-3, 1.0), min_size=3, max_size=3))
    @settings(max_examples=200, deadline=None)
    def test_contraction_properties_hypothesis(self, raw):
        lam = np.array(raw) / weighted_sum(np.array(raw))
        out = contraction_r(lam).as_array()
        assert np.all(np.diff(out) >= -1e-15)
        assert abs(weighted_sum(out) - 1.0) < 1e-12


class TestPhi:
    @pytest.mark.parametrize("eps", [0.1, 0.01])
    def test_claim_properties(self, eps):
        n = 4
        phi = build_phi(n, eps)
        rng = np.random.default_rng(int(eps * 1000))
        for _ in range(10_000):
            p = random_delta_star_point(n, rng).as_array()
            d = dist_to_sigma(p)
            img = phi(p)
            if d >= eps:
                assert np.array_equal(img, p)  # property (1)
            if d <= eps / phi.C:
                assert abs(img[0]) <= 1e-14  # property (2): lands on Sigma
            assert np.linalg.norm(img - p) <= phi.C * eps + 1e-12

    def test_identity_on_sigma(self):
        phi = build_phi(4, 0.05)
        p = np.array([0.0, 0.3, 0.35])
        assert np.array_equal(phi(p), p)

    def test_face_preservation(self):
        n, eps = 4, 0.05
        phi = build_phi(n, eps)
        rng = np.random.default_rng(2)
        for idxs in [(1,), (2,), (1, 2), (1, 3), (2, 3), (1, 2, 3)]:
            face = FaceDescriptor(len(idxs) - 1, idxs, "DeltaStar")
            for _ in range(400):
                p = random_face_point(face, n, rng)
                img = SimplexPoint(tuple(phi(p.as_array())), "DeltaStar")
                assert face_membership(img, face, tol=1e-10)

    def test_composition_lands_in_delta_faces(self):
        n = 4
        phi = build_phi(n, 0.05)
        rng = np.random.default_rng(3)
        for idxs in [(1, 2), (1, 3), (2, 3), (1, 2, 3)]:
            fstar = FaceDescriptor(len(idxs) - 1, idxs, "DeltaStar")
            fdelta = FaceDescriptor(len(idxs) - 1, idxs, "Delta")
            for _ in range(300):
                p = random_face_point(fstar, n, rng)
                img = contraction_r(phi(p.as_array()))
                assert face_membership(img, fdelta, tol=1e-9)

    def test_bad_constants_rejected(self):
        with pytest.raises(ValueError):
            build_phi(4, 0.1, C=1.0)
        with pytest.raises(ValueError):
            build_phi(4, 0.1, resolution=1)

    def test_projection_oracle(self):
        # the Euclidean projector used as the distance oracle stays in Sigma
        rng = np.random.default_rng(8)
        for _ in range(200):
            p = random_delta_star_point(5, rng).as_array()
            q = project_to_sigma(p)
            assert q[0] == 0.0
            assert abs(weighted_sum(q) - 1) < 1e-9
            assert np.all(q >= -1e-12)


class TestDegree:
    def test_identity_and_reflection(self):
        verts = face_vertices(FaceDescriptor(2, (1, 2, 3), "Delta"), 4)
        assert pl_degree(lambda p: p, verts) == 1
        to_chart, to_ambient = barycentric_chart(verts)

        def refl(p):
            y = to_chart(p)
            b = np.concatenate([[1 - y.sum()], y])
            b[0], b[1] = b[1], b[0]
            return to_ambient(b[1:])

        assert pl_degree(refl, verts) == -1

    def test_edge_face(self):
        verts = face_vertices(FaceDescriptor(1, (1, 3), "Delta"), 4)
        assert pl_degree(lambda p: p, verts) == 1

    def test_random_face_preserving_maps(self):
        rng = np.random.default_rng(9)
        verts4 = face_vertices(FaceDescriptor(2, (1, 2, 3), "Delta"), 4)
        verts5 = face_vertices(FaceDescriptor(3, (1, 2, 3, 4), "Delta"), 5)
        for _ in range(10):
            f4 = random_face_preserving_map(verts4, rng)
            assert pl_degree(f4, verts4, rng=rng) == 1
            f5 = random_face_preserving_map(verts5, rng)
            assert pl_degree(f5, verts5, resolution=24, rng=rng) == 1


class TestSurjectivity:
    def test_identity_full_cover(self):
        face = FaceDescriptor(2, (1, 2, 3), "Delta")
        rep = surjectivity_check(lambda p: p, face, 4, grid_resolution=32)
        assert rep["max_gap"] == 0.0
        assert rep["covered"] == rep["cells"]

    def test_random_map_cover(self):
        rng = np.random.default_rng(10)
        face = FaceDescriptor(2, (1, 2, 3), "Delta")
        verts = face_vertices(face, 4)
        fmap = random_face_preserving_map(verts, rng)
        rep = surjectivity_check(fmap, face, 4, grid_resolution=64, rng=rng)
        assert rep["max_gap"] <= 2 * rep["mesh_size"]

    def test_non_face_preserving_rejected(self):
        face = FaceDescriptor(2, (1, 2, 3), "Delta")
        verts = face_vertices(face, 4)
        center = verts.mean(axis=0)
        with pytest.raises(FacePreservationError):
            surjectivity_check(lambda p: center, face, 4, grid_resolution=16)
