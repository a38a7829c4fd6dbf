import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyconvex.invariants import (
    InvariantReport,
    beta_normalform_identity_check,
    compute_invariants,
    spectrum,
)
from polyconvex.planes import family_matrices

SQRT3 = math.sqrt(3)
small = st.floats(-3, 3, allow_nan=False)
matrices = st.lists(small, min_size=4, max_size=4).map(lambda v: np.array(v).reshape(2, 2))


def rel_close(a, b, rel):
    return abs(a - b) <= rel * max(1.0, abs(a), abs(b))


class TestComputeInvariants:
    def test_family_at_two(self):
        r = compute_invariants(*family_matrices(2.0))
        assert r.det_a1 == pytest.approx(1 / 9, rel=1e-12)
        assert r.det_a2 == pytest.approx(1 / 9, rel=1e-12)
        # Tr A1 = -2t^2 / (sqrt3 (1 - t^2)) is positive at t = 2
        assert r.tr_a1 == pytest.approx(8 / (3 * SQRT3), rel=1e-12)
        assert r.tr_a2 == pytest.approx(-8 / (3 * SQRT3), rel=1e-12)
        assert r.tr_a1a2 == pytest.approx(-22 / 27, rel=1e-12)
        assert r.det_commutator == pytest.approx(64 / 81, rel=1e-12)
        assert r.in_omega

    def test_equal_matrices_outside_omega(self):
        a = np.array([[1.0, 2.0], [0.5, -1.0]])
        r = compute_invariants(a, a)
        assert r.det_commutator == 0 and not r.in_omega

    def test_theta_hand_example(self):
        r = compute_invariants(np.diag([1.0, 2.0]), np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert r.tr_a1a2 == 0 and r.theta_12 == 0

    def test_i_in_spectrum_excluded(self):
        rot = np.array([[0.0, -1.0], [1.0, 0.0]])
        assert not compute_invariants(np.diag([1.0, 2.0]), rot).in_omega

    def test_spectrum_complex_pair(self):
        lo, hi = spectrum(np.array([[0.0, -2.0], [2.0, 0.0]]))
        assert {lo, hi} == {2j, -2j}

    def test_json_round_trip(self):
        r = compute_invariants(*family_matrices(0.7))
        assert InvariantReport.from_dict(r.to_dict()) == r
        assert set(r.to_dict()) >= {"lambda_", "beta_", "theta_12", "theta_21", "in_omega"}

    @settings(max_examples=1000, deadline=None)
    @given(matrices, matrices)
    def test_identities(self, a1, a2):
        r = compute_invariants(a1, a2)
        assert r.lambda_ == 4 * r.det_a1a2 - 0.25 * (r.tr_a1 * r.tr_a2) ** 2
        assert r.beta_ == r.lambda_ - r.tr_a1a2 * (r.tr_a1a2 - r.tr_a1 * r.tr_a2)
        lhs, rhs = r.theta_12 + r.beta_, r.lambda_ + r.det_a1 * r.tr_a2**2
        scale = max(abs(r.theta_12), abs(r.beta_), abs(r.lambda_), abs(r.det_a1 * r.tr_a2**2), 1.0)
        assert abs(lhs - rhs) <= 1e-10 * scale

    @given(matrices, matrices)
    def test_commutator_antisymmetry(self, a1, a2):
        assert compute_invariants(a1, a2).det_commutator == compute_invariants(a2, a1).det_commutator

    @settings(max_examples=200, deadline=None)
    @given(matrices, matrices, st.integers(0, 2**32 - 1))
    def test_similarity_invariance(self, a1, a2, seed):
        rng = np.random.default_rng(seed)
        T = rng.normal(size=(2, 2))
        if abs(np.linalg.det(T)) < 0.3:
            T = T + np.eye(2) * 2
        Ti = np.linalg.inv(T)
        base = compute_invariants(a1, a2).to_dict()
        conj = compute_invariants(T @ a1 @ Ti, T @ a2 @ Ti).to_dict()
        cond = np.linalg.cond(T) ** 2
        for key, value in base.items():
            if key.startswith("spectrum") or key == "in_omega":
                continue
            scale = max(1.0, abs(value)) * cond * 50
            assert abs(conj[key] - value) <= 1e-8 * scale, key


class TestBetaIdentity:
    def test_hand_example(self):
        check = beta_normalform_identity_check(1, -1, 1, -1, 2)
        assert check.rhs == 16 and check.lhs == pytest.approx(16)
        assert check.agrees

    def test_symmetric_degenerate(self):
        check = beta_normalform_identity_check(2, 2, 0.5, 0.5, 0)
        assert check.agrees
        assert check.rhs == pytest.approx(4 * 4 * 0.25)

    @settings(max_examples=1000, deadline=None)
    @given(small, small, small, small, small)
    def test_random(self, l1, l2, s1, s2, q):
        check = beta_normalform_identity_check(l1, l2, s1, s2, q)
        assert check.agrees
        gap = (l1 - l2) ** 2 * (q * q - (s1 + s2) ** 2 / 4)
        if abs(gap) > 1e-9 * max(1.0, abs(check.lhs)) * 100:
            assert check.beta_exceeds == check.q_exceeds
