import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from polyconvex.convexity import (
    SQRT3_OVER_2,
    STAR,
    ConvexityVerdict,
    FamilyClassification,
    Status,
    SurfaceKind,
    bishop_t,
    classify_cubic_surface,
    classify_perturbed_surface,
    three_plane_decider,
    weinstock_pair_check,
)
from polyconvex.errors import InvalidParameter
from polyconvex.planes import family_matrices

small = st.floats(-3, 3, allow_nan=False)
matrices = st.lists(small, min_size=4, max_size=4).map(lambda v: np.array(v).reshape(2, 2))


def rotation(a):
    return np.array([[0.0, -a], [a, 0.0]])


RANK = {Status.HULL_BALL: 2, Status.HULL_DISCS: 2, Status.LPC: 2, Status.NOT_LPC: 2, Status.UNKNOWN: 0}


class TestConstants:
    def test_star(self):
        assert 1.0756 < STAR < 1.0760
        assert round(STAR, 3) == 1.076
        assert STAR**2 == pytest.approx((15 - math.sqrt(33)) / 8, rel=1e-15)

    def test_star_is_root_of_quartic(self):
        # 4 s^2 - 15 s + 12 with s = t^2
        s = STAR**2
        assert abs(4 * s * s - 15 * s + 12) < 1e-12


class TestWeinstockPair:
    def test_modulus_two_rejected(self):
        v = weinstock_pair_check(rotation(2))
        assert v.status is Status.NOT_LPC and v.witness["imaginary_modulus"] == pytest.approx(2)

    def test_zero_accepted(self):
        assert weinstock_pair_check(np.zeros((2, 2))).status is Status.LPC

    def test_unit_modulus_unknown(self):
        v = weinstock_pair_check(rotation(1))
        assert v.status is Status.UNKNOWN and v.criterion == ""

    def test_real_spectrum_accepted(self):
        assert weinstock_pair_check(np.diag([3.0, -5.0])).status is Status.LPC

    def test_non_purely_imaginary_accepted(self):
        # eigenvalues 0.1 +- 2i: large modulus but not purely imaginary
        assert weinstock_pair_check(np.array([[0.1, -2.0], [2.0, 0.1]])).status is Status.LPC


class TestVerdict:
    def test_decided_needs_criterion(self):
        with pytest.raises(ValueError):
            ConvexityVerdict(Status.LPC)

    def test_round_trip(self):
        v = weinstock_pair_check(rotation(2))
        assert ConvexityVerdict.from_dict(v.to_dict()) == v


class TestDecider:
    def test_real_spectra_case(self):
        v = three_plane_decider(*family_matrices(2.0))
        assert v.status is Status.LPC and v.criterion == "three-plane-real-spectra"

    def test_product_case(self):
        t = 1.2
        assert (15 - math.sqrt(33)) / 8 < t * t < 2 and 4 * t**4 - 15 * t**2 + 12 < 0
        v = three_plane_decider(*family_matrices(t))
        assert v.status is Status.LPC and v.criterion == "negative-det-product"

    def test_singular_det_case(self):
        v = three_plane_decider(*family_matrices(math.sqrt(3)))
        assert v.status is Status.LPC and v.criterion == "singular-det-sum-of-squares"

    def test_elliptic_parameter_unknown(self):
        v = three_plane_decider(*family_matrices(0.5))
        assert v.status is Status.UNKNOWN
        assert all(m is None or m <= 0 for m in v.witness["margins"].values())

    def test_failing_pair(self):
        v = three_plane_decider(rotation(2), np.diag([1.0, 2.0]))
        assert v.status is Status.NOT_LPC and v.criterion == "pairwise"

    def test_stitched_coverage_above_threshold(self):
        ts = np.linspace(STAR + 1e-6, 10, 200)
        for t in ts:
            assert three_plane_decider(*family_matrices(t)).status is Status.LPC, t

    @settings(max_examples=200, deadline=None)
    @given(matrices, matrices)
    def test_failing_first_pair_never_convex(self, a1, a2):
        if weinstock_pair_check(a1).status is Status.NOT_LPC:
            assert three_plane_decider(a1, a2).status is not Status.LPC

    @settings(max_examples=300, deadline=None)
    @given(matrices, matrices)
    def test_swap_consistency(self, a1, a2):
        v, w = three_plane_decider(a1, a2), three_plane_decider(a2, a1)
        if v.status.decided and w.status.decided:
            assert v.status is w.status


class TestClassify:
    @pytest.mark.parametrize(
        "t, status",
        [(0.5, Status.HULL_BALL), (0.95, Status.HULL_DISCS), (1.0, Status.LPC), (1.1, Status.LPC), (1.03, Status.UNKNOWN)],
    )
    def test_cubic_bands(self, t, status):
        c = classify_cubic_surface(t)
        assert c.verdict.status is status and c.surface_kind is SurfaceKind.EXACT_CUBIC

    @pytest.mark.parametrize("t, status", [(0.3, Status.HULL_BALL), (1.0, Status.UNKNOWN), (2.0, Status.LPC)])
    def test_perturbed_bands(self, t, status):
        assert classify_perturbed_surface(t).verdict.status is status

    def test_endpoints(self):
        assert classify_cubic_surface(SQRT3_OVER_2).verdict.status is Status.HULL_DISCS
        at_star = classify_cubic_surface(STAR).verdict
        assert at_star.status is Status.LPC and at_star.witness["at_threshold"]

    def test_maslov(self):
        assert classify_cubic_surface(0.5).maslov_index == 2
        assert classify_cubic_surface(2.0).maslov_index == -2
        parabolic = classify_cubic_surface(1.0)
        assert parabolic.maslov_index is None and not parabolic.maslov_defined

    def test_thresholds_embedded(self):
        d = classify_cubic_surface(1.5).to_dict()
        assert d["thresholds"] == {"sqrt3_over_2": SQRT3_OVER_2, "star": STAR}
        assert FamilyClassification.from_dict(d) == classify_cubic_surface(1.5)

    @pytest.mark.parametrize("t", [0, -1, float("nan"), float("inf")])
    def test_invalid(self, t):
        with pytest.raises(InvalidParameter):
            classify_cubic_surface(t)
        with pytest.raises(InvalidParameter):
            classify_perturbed_surface(t)

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0.01, 20))
    def test_surfaces_agree_outside_gap(self, t):
        cubic = classify_cubic_surface(t).verdict.status
        perturbed = classify_perturbed_surface(t).verdict.status
        if 1 - 1e-12 <= t < STAR - 1e-12:
            assert RANK[perturbed] <= RANK[cubic]
        else:
            assert cubic is perturbed


class TestBishop:
    @pytest.mark.parametrize("gamma, t, kind", [(0.5, 1.0, "parabolic"), (0, 0.0, "elliptic"), (1, 2.0, "hyperbolic")])
    def test_examples(self, gamma, t, kind):
        assert bishop_t(gamma) == (t, kind)

    def test_negative(self):
        with pytest.raises(InvalidParameter):
            bishop_t(-0.1)
