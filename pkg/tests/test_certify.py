import math

import numpy as np
import pytest

from polyconvex.certify import (
    SEPARATING_POLYNOMIAL,
    KallinCase,
    default_instance,
    kallin_verify,
    linear_image_cone,
    quadratic_image_cone,
)
from polyconvex.errors import HypothesisViolated, InvalidParameter
from polyconvex.planes import family_matrices

CASES = list(KallinCase)


def line_direction(region):
    nx, ny = region.normals[0]
    return complex(-ny, nx)


def same_line(u: complex, v: complex) -> bool:
    return abs((u * v.conjugate()).imag) <= 1e-12 * abs(u) * abs(v)


class TestImageCones:
    def test_real_plane_sum_of_squares_is_a_ray(self):
        r = quadratic_image_cone(np.eye(2, dtype=complex))
        assert r.kind == "ray"
        assert np.max(r.violation(np.array([1.0, 2.0, 0.5]))) <= 1e-15
        assert np.min(r.violation(np.array([-1.0, 1j, -1j]))) > 0.5

    def test_linear_real_map(self):
        r = linear_image_cone(np.array([1, 1], dtype=complex))
        assert r.kind == "line" and same_line(line_direction(r), 1)

    def test_linear_complex_map_fills_plane(self):
        assert linear_image_cone(np.array([1, 1j], dtype=complex)).kind == "plane"


class TestKallin:
    @pytest.mark.parametrize("case", CASES)
    def test_default_instances_pass(self, case):
        r = kallin_verify(case, samples=10_000)
        assert r.max_violation <= 1e-9
        assert r.zero_fiber_ok and r.separation_ok and r.passed

    def test_singular_example(self):
        r = kallin_verify("sos-singular", (np.diag([0.0, 1.0]), np.array([[1.0, 1.0], [1.0, 1.0]])))
        assert r.passed

    def test_linear_images_are_the_three_lines(self):
        r = kallin_verify("linear")
        want = [1, 1 - 1j * math.sqrt(3), 1 + 1j * math.sqrt(3)]
        got = [line_direction(region) for region in r.regions]
        assert all(region.kind == "line" for region in r.regions)
        for w in want:
            assert sum(same_line(w, g) for g in got) == 1

    def test_linear_planes_share_a_line(self):
        r = kallin_verify("linear")
        assert set(r.hypotheses["pair_intersections"].values()) == {"line"}

    def test_family_singular_parameter(self):
        assert kallin_verify("sos-singular", family_matrices(math.sqrt(3))).passed

    def test_singular_gate(self):
        with pytest.raises(HypothesisViolated):
            kallin_verify("sos-singular", family_matrices(2.5))

    def test_unit_negative_det(self):
        # det A_j = -1 exactly at t^2 = 3/2; the zero fiber becomes two lines
        r = kallin_verify("sos-negative", family_matrices(math.sqrt(1.5)))
        assert r.passed

    def test_product_gate(self):
        with pytest.raises(HypothesisViolated, match="beta-bound"):
            kallin_verify("product", family_matrices(1.07))
        with pytest.raises(HypothesisViolated):
            kallin_verify("product", family_matrices(2.0))

    def test_sum_of_squares_gate(self):
        with pytest.raises(HypothesisViolated):
            kallin_verify("sos-negative", family_matrices(2.0))

    def test_invalid_arguments(self):
        with pytest.raises(InvalidParameter):
            kallin_verify("product", samples=0)
        with pytest.raises(ValueError):
            kallin_verify("no-such-case")

    @pytest.mark.parametrize("case", CASES)
    def test_radius_invariance(self, case):
        verdicts = {kallin_verify(case, samples=2000, ball_radius=r).passed for r in (0.5, 1.0, 2.0)}
        assert verdicts == {True}

    @pytest.mark.parametrize("case", CASES)
    def test_more_samples_keep_passing(self, case):
        assert kallin_verify(case, samples=1000).passed
        assert kallin_verify(case, samples=2000).passed

    def test_json(self):
        d = kallin_verify("product", samples=500).to_dict()
        assert d["separating_polynomial"] == SEPARATING_POLYNOMIAL[KallinCase.PRODUCT] == "z w"
        assert d["passed"] is True and d["seed"] == 42

    def test_default_instance_with_t(self):
        a1, a2 = default_instance("product", 1.3)
        np.testing.assert_allclose(a1, family_matrices(1.3)[0])
