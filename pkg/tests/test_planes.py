import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyconvex.errors import (
    BranchUndefined,
    CommutatorNotPositive,
    EigenvalueDegenerate,
    InvalidParameter,
    NotFactorable,
    NotTotallyReal,
    NotTransverse,
)
from polyconvex.planes import (
    CubicCoefficients,
    TotallyRealPlane,
    branch_lift,
    commutator_det,
    factor_cubic_preimage,
    family_matrices,
    family_planes,
    pairwise_reduction,
    plane_from_matrix,
    simultaneous_normal_form,
    verify_pullback,
    weinstock_normal_form,
)

SQRT3 = math.sqrt(3)

REAL_PLANE = TotallyRealPlane(np.eye(2))
IMAG_PLANE = TotallyRealPlane(1j * np.eye(2))

small = st.floats(-3, 3, allow_nan=False)
matrices = st.lists(small, min_size=4, max_size=4).map(lambda v: np.array(v).reshape(2, 2))


def similarity_invariants(a):
    return np.trace(a), np.linalg.det(a)


class TestTotallyRealPlane:
    def test_complex_line_rejected(self):
        with pytest.raises(NotTotallyReal):
            TotallyRealPlane.from_vectors([1, 0], [1j, 0])

    def test_graph_round_trip(self):
        p = TotallyRealPlane.from_graph(0.3 - 0.2j, cmath.exp(0.7j))
        a, b = p.graph_coefficients()
        assert a == pytest.approx(0.3 - 0.2j) and b == pytest.approx(cmath.exp(0.7j))

    def test_json_both_forms(self):
        p = TotallyRealPlane.from_graph(0.5j, 2)
        q = TotallyRealPlane.from_dict(p.to_dict())
        assert p.distance(q) < 1e-12
        r = TotallyRealPlane.from_dict({"basis": [[1, 0, 0, 0], [0, 0, 1, 0]]})
        assert r.distance(REAL_PLANE) < 1e-12

    def test_bad_shape(self):
        with pytest.raises(InvalidParameter):
            TotallyRealPlane(np.eye(3))


class TestWeinstockNormalForm:
    def test_family_at_two_matches_similarity_class(self):
        a1, a2 = family_matrices(2.0)
        want1 = np.array([[2 / (3 * SQRT3), 1 / 3], [1, 2 / SQRT3]])
        want2 = np.array([[-2 / (3 * SQRT3), 1 / 3], [1, -2 / SQRT3]])
        np.testing.assert_allclose(similarity_invariants(a1), similarity_invariants(want1), atol=1e-12)
        np.testing.assert_allclose(similarity_invariants(a2), similarity_invariants(want2), atol=1e-12)

    def test_imaginary_plane_gives_zero(self):
        (a,) = weinstock_normal_form(REAL_PLANE, [IMAG_PLANE])
        np.testing.assert_allclose(a, 0, atol=1e-15)

    def test_same_plane_not_transverse(self):
        with pytest.raises(NotTransverse):
            weinstock_normal_form(REAL_PLANE, [REAL_PLANE])

    def test_family_at_one_not_transverse(self):
        with pytest.raises(NotTransverse):
            family_matrices(1.0)

    @settings(max_examples=60, deadline=None)
    @given(st.floats(0.05, 6).filter(lambda t: abs(t - 1) > 1e-3))
    def test_reconstruction(self, t):
        p0, p1, p2 = family_planes(t)
        for plane, a in zip((p1, p2), weinstock_normal_form(p0, [p1, p2])):
            assert plane_from_matrix(a, p0).distance(plane) <= 1e-9


class TestPairwiseReduction:
    def test_trace_at_two(self):
        b = pairwise_reduction(*family_matrices(2.0))
        assert np.trace(b) == pytest.approx(8 * SQRT3 / 9, rel=1e-12)

    def test_opposite_identities(self):
        np.testing.assert_allclose(pairwise_reduction(np.eye(2), -np.eye(2)), 0, atol=1e-15)

    def test_equal_matrices(self):
        with pytest.raises(NotTransverse):
            pairwise_reduction(np.eye(2), np.eye(2))

    @settings(max_examples=40, deadline=None)
    @given(st.floats(0.05, 6).filter(lambda t: abs(t - 1) > 1e-3))
    def test_is_weinstock_matrix_of_the_pair(self, t):
        p0, p1, p2 = family_planes(t)
        a1, a2 = weinstock_normal_form(p0, [p1, p2])
        b = pairwise_reduction(a1, a2)
        (direct,) = weinstock_normal_form(p1, [p2])
        np.testing.assert_allclose(similarity_invariants(b), similarity_invariants(direct), rtol=1e-7, atol=1e-9)


class TestSimultaneousNormalForm:
    def test_hand_example(self):
        da, sb, T = simultaneous_normal_form(np.diag([1.0, 2.0]), np.array([[0.0, 1.0], [4.0, 0.0]]))
        np.testing.assert_allclose(da, np.diag([1, 2]), atol=1e-14)
        np.testing.assert_allclose(sb, [[0, 2], [2, 0]], atol=1e-14)
        assert abs(T[0, 0] / T[1, 1]) == pytest.approx(2)

    def test_symmetric_input_unchanged(self):
        b = np.array([[0.3, 1.5], [1.5, -0.2]])
        _, sb, _ = simultaneous_normal_form(np.diag([1.0, 2.0]), b)
        np.testing.assert_allclose(np.abs(sb), np.abs(b), atol=1e-14)

    def test_identity_degenerate(self):
        with pytest.raises(EigenvalueDegenerate):
            simultaneous_normal_form(np.eye(2), np.array([[0, 1], [2, 0]]))

    def test_commutator_sign(self):
        with pytest.raises(CommutatorNotPositive):
            simultaneous_normal_form(np.diag([1.0, 2.0]), np.array([[0.0, 1.0], [-1.0, 0.0]]))

    @settings(max_examples=100, deadline=None)
    @given(matrices, matrices)
    def test_invariants_preserved(self, a, b):
        tr, det = np.trace(a), np.linalg.det(a)
        if tr * tr - 4 * det < 1e-3 or commutator_det(a, b) < 1e-3:
            return
        da, sb, T = simultaneous_normal_form(a, b)
        np.testing.assert_allclose(T @ a @ np.linalg.inv(T), da, atol=1e-8)
        assert sb[0, 1] == pytest.approx(sb[1, 0], abs=1e-10)
        for x, y in ((a, da), (b, sb)):
            assert np.trace(y) == pytest.approx(np.trace(x), abs=1e-10 * max(1, abs(np.trace(x))) * 100)
            assert np.linalg.det(y) == pytest.approx(np.linalg.det(x), rel=1e-8, abs=1e-9)
        assert commutator_det(da, sb) > 0


class TestFactorization:
    def test_family_alphas(self):
        t = 2.0
        alphas = [p.graph_coefficients()[0] for p in factor_cubic_preimage(CubicCoefficients.family(t))]
        want = [0, -(3 - 1j * SQRT3) / (2 * t), -(3 + 1j * SQRT3) / (2 * t)]
        for got, w in zip(alphas, want):
            assert abs(got - w) <= 1e-12

    def test_not_factorable(self):
        with pytest.raises(NotFactorable) as info:
            factor_cubic_preimage(CubicCoefficients(1, 1, 1))
        assert info.value.details["residual"] == pytest.approx(2)

    def test_pure_conjugate_cube(self):
        planes = factor_cubic_preimage(CubicCoefficients(0, 0, 1))
        betas = sorted((p.graph_coefficients()[1] for p in planes), key=cmath.phase)
        want = sorted([1, cmath.exp(2j * math.pi / 3), cmath.exp(-2j * math.pi / 3)], key=cmath.phase)
        for got, w in zip(betas, want):
            assert abs(got - w) < 1e-12
        assert all(abs(p.graph_coefficients()[0]) < 1e-15 for p in planes)

    def test_pullback_family(self):
        c = CubicCoefficients.family(2.0)
        assert verify_pullback(c, factor_cubic_preimage(c)) <= 1e-9

    def test_conjugate_plane_always_solves(self):
        assert verify_pullback(CubicCoefficients(1, 2, 3), [TotallyRealPlane.from_graph(0, 1)]) <= 1e-9

    def test_perturbed_plane_detected(self):
        c = CubicCoefficients.family(2.0)
        planes = factor_cubic_preimage(c)
        a, b = planes[1].graph_coefficients()
        bad = TotallyRealPlane.from_graph(a + 0.01, b)
        assert verify_pullback(c, [bad]) > 1e-4

    @settings(max_examples=100, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_random_admissible(self, seed):
        rng = np.random.default_rng(seed)
        a3 = complex(*rng.uniform(0.2, 2, 2) * rng.choice([-1, 1], 2))
        a2 = complex(*rng.normal(size=2))
        c = CubicCoefficients(a2 * a2 / (3 * a3), a2, a3)
        assert verify_pullback(c, factor_cubic_preimage(c), seed=seed) <= 1e-9

    def test_family_rejects_nonpositive(self):
        with pytest.raises(InvalidParameter):
            family_planes(0)


def zero(_):
    return 0


def quartic(z):
    return abs(z) ** 4


class TestBranchLift:
    @pytest.mark.parametrize("branch", [0, 1, 2])
    def test_no_perturbation(self, branch):
        assert branch_lift(2.0, branch, zero, 0.3 + 0.1j) == 0

    @pytest.mark.parametrize("branch", [0, 1, 2])
    def test_cubic_residual(self, branch):
        t, zeta = 2.0, 0.1
        f = branch_lift(t, branch, quartic, zeta)
        u = zeta + t * np.conj(zeta)
        w = cmath.exp(2j * math.pi * branch / 3)
        # (t f + w u)^3 = u^3 + 3 t F
        assert abs((t * f + w * u) ** 3 - u**3 - 3 * t * quartic(zeta)) <= 1e-10
        if branch == 0:
            assert abs(t * t * f**3 + 3 * t * u * f**2 + 3 * u * u * f - 3 * quartic(zeta)) <= 1e-10

    def test_little_o(self):
        ratios = [abs(branch_lift(2.0, 0, quartic, r * cmath.exp(1j * math.pi / 7))) / r for r in (1e-2, 1e-3, 1e-4)]
        assert ratios[0] > ratios[1] > ratios[2]

    def test_branches_distinct(self):
        t = 1.5
        rng = np.random.default_rng(0)
        coeffs = [p.graph_coefficients() for p in family_planes(t)]
        for _ in range(50):
            zeta = complex(*rng.uniform(-0.01, 0.01, 2))
            pts = [a * zeta + b * zeta.conjugate() + branch_lift(t, k, quartic, zeta) for k, (a, b) in enumerate(coeffs)]
            assert min(abs(pts[i] - pts[k]) for i in range(3) for k in range(i)) > 0

    def test_errors(self):
        with pytest.raises(BranchUndefined):
            branch_lift(2.0, 0, quartic, 0)
        with pytest.raises(BranchUndefined):
            branch_lift(2.0, 0, lambda z: 10.0, 0.1)
        with pytest.raises(InvalidParameter):
            branch_lift(1.0, 0, zero, 0.1)
        with pytest.raises(InvalidParameter):
            branch_lift(2.0, 3, zero, 0.1)
