"""
Unit tests for the expression mini-grammar
"""

import math

import numpy as np
import pytest
import sympy as sp

from models.errors import ConfigurationError, ExpressionError
from utils.expression_parser import parse_expression


class TestParsing:

    def test_precedence(self):
        """Multiplication binds tighter than addition"""
        assert parse_expression("1 + 2*3")(0.0) == 7.0

    def test_power_is_right_associative(self):
        """2^3^2 = 2^9"""
        assert parse_expression("2^3^2")(0.0) == 512.0

    def test_unary_minus_below_power(self):
        """-2^2 = -4"""
        assert parse_expression("-2^2")(0.0) == -4.0

    def test_double_star_power(self):
        """** is accepted as a power operator"""
        assert parse_expression("t**2", 't')(3.0) == 9.0

    def test_functions_and_constants(self):
        """Named functions and constants evaluate"""
        f = parse_expression("sinh(r) + cos(pi) + e", 'r')
        assert f(1.0) == pytest.approx(math.sinh(1.0) - 1.0 + math.e)

    def test_vectorized_evaluation(self):
        """Expressions evaluate elementwise on numpy arrays"""
        f = parse_expression("1 + 3*tanh(t)^2")
        grid = np.linspace(-2.0, 2.0, 5)
        np.testing.assert_allclose(f(grid), 1.0 + 3.0 * np.tanh(grid) ** 2)

    def test_constant_broadcasts(self):
        """A constant expression returns an array for array input"""
        f = parse_expression("2.25")
        assert f.is_constant
        assert f(np.zeros(3)).shape == (3,)

    def test_decimal_literals_are_exact(self):
        """Decimal literals evaluate to the nearest double"""
        assert parse_expression("0.1")(0.0) == 0.1
        assert parse_expression("2.5e-3")(0.0) == 2.5e-3

    def test_builds_sympy_expression(self):
        """The parsed tree is a sympy expression in a real symbol"""
        f = parse_expression("sinh(r)^2", 'r')
        r = sp.Symbol('r', real=True)
        assert sp.simplify(f.expr - sp.sinh(r) ** 2) == 0


class TestErrors:

    @pytest.mark.parametrize("source", ["", "1 +", "sin 1", "(1 + 2", "t $ 2", "foo(t)", "1 2"])
    def test_rejected(self, source):
        """Malformed expressions raise ExpressionError"""
        with pytest.raises(ExpressionError):
            parse_expression(source)

    def test_wrong_variable(self):
        """Only the declared variable is allowed"""
        with pytest.raises(ExpressionError):
            parse_expression("sinh(t)", 'r')

    def test_is_configuration_error(self):
        """Grammar errors are configuration errors"""
        with pytest.raises(ConfigurationError):
            parse_expression("1 +* 2")

    def test_position_reported(self):
        """The error carries the offending position"""
        with pytest.raises(ExpressionError) as excinfo:
            parse_expression("1+$")
        assert excinfo.value.position == 2

    def test_non_string_rejected(self):
        """Non-string input is rejected"""
        with pytest.raises(ExpressionError):
            parse_expression(3.0)


class TestDerivative:

    @pytest.mark.parametrize("source,expected", [
        ("sinh(r)", math.cosh),
        ("sinh(2*r)/2", lambda r: math.cosh(2 * r)),
        ("r^3", lambda r: 3 * r * r),
        ("exp(-r^2)", lambda r: -2 * r * math.exp(-r * r)),
        ("tanh(r)", lambda r: 1 - math.tanh(r) ** 2),
        ("log(1 + r)", lambda r: 1 / (1 + r)),
        ("sqrt(r)", lambda r: 0.5 / math.sqrt(r)),
    ])
    def test_symbolic_derivative(self, source, expected):
        """Symbolic derivatives agree with hand-computed ones"""
        f = parse_expression(source, 'r')
        for r in (0.3, 1.0, 2.5):
            assert f.derivative()(r) == pytest.approx(expected(r), rel=1e-12)

    def test_second_derivative(self):
        """f'' of sinh is sinh"""
        f = parse_expression("sinh(r)", 'r')
        assert f.derivative().derivative()(1.2) == pytest.approx(math.sinh(1.2), rel=1e-14)

    def test_constant_derivative_is_zero(self):
        """Derivative of a constant is identically zero"""
        assert parse_expression("3 + pi").derivative()(5.0) == 0.0

    def test_third_derivative_matches_sympy(self):
        """Repeated derivatives agree with sympy.diff of the parsed tree"""
        f = parse_expression("sinh(r)*exp(-r/2)", 'r')
        third = f.derivative().derivative().derivative()
        r = sp.Symbol('r', real=True)
        expected = sp.lambdify(r, sp.diff(sp.sinh(r) * sp.exp(-r / 2), r, 3), "numpy")
        assert third(0.7) == pytest.approx(expected(0.7), rel=1e-13)

    def test_abs_derivative_is_sign(self):
        """The derivative of abs is the sign away from zero"""
        df = parse_expression("abs(t)").derivative()
        assert df(-2.0) == -1.0
        assert df(3.0) == 1.0
