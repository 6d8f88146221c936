"""
Closed-form scalar geometry of the model planes of curvature -a^2

Comparison functions C_a and cot_a, the hyperbolic law of cosines and the
comparison ratio F_a. Every function accepts the curvature constant either as
a ModelCurvature or as a plain float; a = 0 selects the Euclidean branch.
"""

import math
from typing import Union

import numpy as np

from models.data_models import ComparisonTriangle, ModelCurvature
from models.errors import DomainError

Curvature = Union[ModelCurvature, float]

SERIES_THRESHOLD = 1e-4
ARCCOSH_SLACK = 1e-12
ANGLE_SLACK = 1e-12


def curvature_value(a: Curvature) -> float:
    """Plain float curvature constant, validated"""
    if isinstance(a, ModelCurvature):
        return a.a
    return ModelCurvature(float(a)).a


def _check_length(name: str, value: float, strict: bool = False):
    if not math.isfinite(value) or value < 0 or (strict and value == 0):
        bound = "> 0" if strict else ">= 0"
        raise DomainError(f"{name} must be {bound}, got {value}")


def _check_angle(alpha: float) -> float:
    if not math.isfinite(alpha) or alpha < -ANGLE_SLACK or alpha > math.pi + ANGLE_SLACK:
        raise DomainError(f"angle must lie in [0, pi], got {alpha}")
    return min(max(alpha, 0.0), math.pi)


def arccosh_clamped(x: float) -> float:
    """arccosh treating arguments in [1 - 1e-12, 1] as exactly 1"""
    if x < 1.0:
        if x >= 1.0 - ARCCOSH_SLACK:
            return 0.0
        raise DomainError(f"arccosh argument below 1: {x}")
    return float(np.arccosh(x))


def c_a(a: Curvature, s: float) -> float:
    """C_a(s) = (cosh(as) - 1)/a^2, and s^2/2 when a = 0"""
    a = curvature_value(a)
    _check_length("s", s)
    x = a * s
    if x < SERIES_THRESHOLD:
        # (cosh x - 1)/x^2 = 1/2 + x^2/24 + x^4/720
        return 0.5 * s * s * (1.0 + x * x / 12.0 + x ** 4 / 360.0)
    return 2.0 * math.sinh(0.5 * x) ** 2 / (a * a)


def cot_a(a: Curvature, s: float) -> float:
    """cot_a(s) = a coth(as), and 1/s when a = 0"""
    a = curvature_value(a)
    _check_length("s", s, strict=True)
    x = a * s
    if x < SERIES_THRESHOLD:
        # x coth x = 1 + x^2/3 - x^4/45
        return (1.0 + x * x / 3.0 - x ** 4 / 45.0) / s
    return a / math.tanh(x)


def _half_cosh_gap(a: float, r1: float, r2: float, alpha: float) -> float:
    """(cosh(a d) - 1)/2 for the model triangle, in a cancellation-free form"""
    if a == 0.0:
        return 0.25 * ((r1 - r2) ** 2 + 4.0 * r1 * r2 * math.sin(0.5 * alpha) ** 2)
    return math.sinh(0.5 * a * (r1 - r2)) ** 2 + \
        math.sinh(a * r1) * math.sinh(a * r2) * math.sin(0.5 * alpha) ** 2


def law_of_cosines(a: Curvature, r1: float, r2: float, alpha: float) -> float:
    """Third side of the model triangle with sides r1, r2 enclosing angle alpha"""
    a = curvature_value(a)
    _check_length("r1", r1)
    _check_length("r2", r2)
    alpha = _check_angle(alpha)
    gap = _half_cosh_gap(a, r1, r2, alpha)
    if a == 0.0:
        return 2.0 * math.sqrt(gap)
    # cosh(ad) - 1 = 2 sinh^2(ad/2)
    return 2.0 * math.asinh(math.sqrt(gap)) / a


def comparison_triangle(a: Curvature, r1: float, r2: float, alpha: float) -> ComparisonTriangle:
    """Model hinge with sides r1, r2 and angle alpha in the plane of curvature -a^2"""
    return ComparisonTriangle(r1=r1, r2=r2, alpha=_check_angle(alpha),
                              third_side=law_of_cosines(a, r1, r2, alpha))


def inverse_law_of_cosines(a: Curvature, r1: float, r2: float, d: float) -> float:
    """Angle between the sides r1 and r2 of the model triangle with third side d"""
    a = curvature_value(a)
    _check_length("r1", r1, strict=True)
    _check_length("r2", r2, strict=True)
    _check_length("d", d)
    if a == 0.0:
        half_sin_sq = (d * d - (r1 - r2) ** 2) / (4.0 * r1 * r2)
    else:
        half_sin_sq = (math.sinh(0.5 * a * d) ** 2 - math.sinh(0.5 * a * (r1 - r2)) ** 2) / \
            (math.sinh(a * r1) * math.sinh(a * r2))
    if half_sin_sq < -ANGLE_SLACK or half_sin_sq > 1.0 + ANGLE_SLACK:
        raise DomainError(f"sides ({r1}, {r2}, {d}) violate the triangle inequality")
    half_sin_sq = min(max(half_sin_sq, 0.0), 1.0)
    return 2.0 * math.asin(math.sqrt(half_sin_sq))


def f_comparison(a: Curvature, r1: float, r2: float, alpha: float, theta: float) -> float:
    """F_a(r1, r2, alpha, theta) = C_a(d(y,z)) / C_a(d(p,q)) in the model plane

    p and q sit at parameter theta on the sides of lengths r1 and r2.
    """
    a = curvature_value(a)
    if not 0.0 < theta < 1.0:
        raise DomainError(f"theta must lie in (0, 1), got {theta}")
    _check_length("r1", r1, strict=True)
    _check_length("r2", r2, strict=True)
    alpha = _check_angle(alpha)
    if a == 0.0:
        return 1.0 / (theta * theta)

    numerator = _half_cosh_gap(a, r1, r2, alpha)
    denominator = _half_cosh_gap(a, theta * r1, theta * r2, alpha)
    if denominator == 0.0:
        # r1 == r2 and alpha == 0: limit alpha -> 0 of the ratio
        return (math.sinh(a * r1) * math.sinh(a * r2)) / \
            (math.sinh(a * theta * r1) * math.sinh(a * theta * r2))
    return numerator / denominator
