"""
Unit tests for the model-plane comparison kernels
"""

import math

import pytest

from geometry.comparison_kernels import (
    arccosh_clamped, c_a, comparison_triangle, cot_a, curvature_value, f_comparison, inverse_law_of_cosines,
    law_of_cosines,
)
from models.data_models import ComparisonTriangle, ModelCurvature
from models.errors import DomainError


class TestComparisonFunctions:

    def test_c_a_closed_form(self):
        """C_1(1) equals cosh(1) - 1"""
        assert c_a(1.0, 1.0) == pytest.approx(0.5430806348152437, rel=1e-15)

    def test_c_a_flat_branch(self):
        """C_0(s) = s^2/2"""
        assert c_a(0.0, 3.0) == 4.5

    def test_c_a_small_argument_series(self):
        """Series branch matches the direct formula across the switch"""
        assert c_a(1.0, 1e-5) == pytest.approx(0.5e-10, rel=1e-9)
        assert c_a(1.0, 1e-3) == pytest.approx(math.cosh(1e-3) - 1.0, rel=1e-9)

    def test_c_a_accepts_model_curvature(self):
        """ModelCurvature and float give the same value"""
        assert c_a(ModelCurvature(2.0), 0.7) == c_a(2.0, 0.7)

    def test_cot_a_values(self):
        """cot_1(1) = coth 1 and cot_0(s) = 1/s"""
        assert cot_a(1.0, 1.0) == pytest.approx(1.3130352854993312, rel=1e-14)
        assert cot_a(0.0, 2.0) == 0.5

    def test_cot_a_tends_to_a(self):
        """cot_a(s) approaches a for large s"""
        assert cot_a(2.0, 50.0) == pytest.approx(2.0, rel=1e-15)

    def test_cot_a_rejects_zero(self):
        """cot_a is undefined at s = 0"""
        with pytest.raises(DomainError):
            cot_a(1.0, 0.0)

    def test_negative_inputs_rejected(self):
        """Negative lengths and curvature constants raise DomainError"""
        with pytest.raises(DomainError):
            c_a(1.0, -0.1)
        with pytest.raises(DomainError):
            curvature_value(-1.0)


class TestLawOfCosines:

    def test_right_angle_hyperbolic(self):
        """cosh d = cosh^2 1 for a right angle with unit legs"""
        d = law_of_cosines(1.0, 1.0, 1.0, math.pi / 2)
        assert d == pytest.approx(math.acosh(math.cosh(1.0) ** 2), rel=1e-13)

    def test_euclidean_branch(self):
        """a = 0 is the Euclidean law of cosines"""
        assert law_of_cosines(0.0, 3.0, 4.0, math.pi / 2) == pytest.approx(5.0, rel=1e-15)

    def test_degenerate_angles(self):
        """alpha = 0 gives |r1 - r2| and alpha = pi gives r1 + r2"""
        assert law_of_cosines(1.0, 2.0, 0.5, 0.0) == pytest.approx(1.5, rel=1e-13)
        assert law_of_cosines(1.0, 2.0, 0.5, math.pi) == pytest.approx(2.5, rel=1e-13)

    def test_angle_out_of_range(self):
        """Angles outside [0, pi] raise DomainError"""
        with pytest.raises(DomainError):
            law_of_cosines(1.0, 1.0, 1.0, 4.0)

    @pytest.mark.parametrize("a,r1,r2,alpha", [(1.0, 1.0, 2.0, 0.3), (2.0, 0.4, 0.9, 2.5), (0.5, 5.0, 3.0, 1.2)])
    def test_inverse_recovers_angle(self, a, r1, r2, alpha):
        """inverse_law_of_cosines undoes law_of_cosines"""
        d = law_of_cosines(a, r1, r2, alpha)
        assert inverse_law_of_cosines(a, r1, r2, d) == pytest.approx(alpha, abs=1e-9)

    def test_inverse_rejects_impossible_triangle(self):
        """A side longer than the other two combined raises"""
        with pytest.raises(DomainError):
            inverse_law_of_cosines(1.0, 1.0, 1.0, 3.0)

    def test_comparison_triangle_hinge(self):
        """The model hinge carries the law-of-cosines side"""
        hinge = comparison_triangle(ModelCurvature(1.0), 1.0, 2.0, math.pi / 3)
        assert hinge.third_side == law_of_cosines(1.0, 1.0, 2.0, math.pi / 3)
        assert 1.0 <= hinge.third_side <= 3.0

    def test_hinge_rejects_impossible_side(self):
        """A third side longer than r1 + r2 is not a triangle"""
        with pytest.raises(DomainError, match="triangle inequality"):
            ComparisonTriangle(r1=1.0, r2=1.0, alpha=1.0, third_side=2.5)


class TestComparisonRatio:

    def test_flat_ratio(self):
        """F_0 = 1/theta^2"""
        assert f_comparison(0.0, 1.0, 2.0, 0.7, 0.5) == pytest.approx(4.0)

    def test_ratio_matches_definition(self):
        """F_a is C_a of the far side over C_a of the near side"""
        a, r1, r2, alpha, theta = 1.0, 1.5, 2.0, 1.0, 0.25
        far = c_a(a, law_of_cosines(a, r1, r2, alpha))
        near = c_a(a, law_of_cosines(a, theta * r1, theta * r2, alpha))
        assert f_comparison(a, r1, r2, alpha, theta) == pytest.approx(far / near, rel=1e-10)

    def test_ratio_exceeds_flat_value(self):
        """Negative curvature makes F_a larger than the Euclidean ratio"""
        assert f_comparison(1.0, 2.0, 2.0, 1.0, 0.5) > 4.0

    def test_coincident_sides_limit(self):
        """Equal sides at zero angle use the limiting ratio"""
        value = f_comparison(1.0, 1.0, 1.0, 0.0, 0.5)
        assert value == pytest.approx(math.sinh(1.0) ** 2 / math.sinh(0.5) ** 2, rel=1e-12)

    @pytest.mark.parametrize("theta", [0.0, 1.0, -0.2])
    def test_theta_domain(self, theta):
        """theta must lie strictly between 0 and 1"""
        with pytest.raises(DomainError):
            f_comparison(1.0, 1.0, 1.0, 1.0, theta)


class TestArccoshClamped:

    def test_clamp_near_one(self):
        """Arguments within 1e-12 below 1 map to 0"""
        assert arccosh_clamped(1.0 - 5e-13) == 0.0

    def test_regular_value(self):
        """Ordinary arguments pass through to arccosh"""
        assert arccosh_clamped(math.cosh(2.0)) == pytest.approx(2.0, rel=1e-14)

    def test_below_slack_raises(self):
        """Arguments clearly below 1 raise DomainError"""
        with pytest.raises(DomainError):
            arccosh_clamped(0.99)
