"""
Curvature operators R(t) along a unit-speed geodesic in a parallel frame

Profiles are diagonal in a fixed parallel frame: constant curvature, the rank
one symmetric spaces, and synthetic diagonal profiles whose entries are given
as callables or as expression strings of the mini-grammar (variable t).
Diagonal entries are the curvature magnitudes k_i(t), so R(t) = -diag(k(t)).
"""

import math
from typing import Callable, Optional, Sequence, Union

import numpy as np

from models.data_models import CurvatureProfile, ManifoldParams, ModelCurvature, RossFamily, RossProfile
from models.errors import ConfigurationError, PinchingViolationError
from utils.expression_parser import Expression, parse_expression

Entry = Union[str, float, Callable[[float], float]]

SAMPLE_SPAN = 50.0
SAMPLE_COUNT = 1000
PINCH_SLACK = 1e-12


def profile_at(p: CurvatureProfile, t: float) -> np.ndarray:
    """R(t) of the profile; deterministic in t"""
    return p.at(t)


def _diagonal_profile(n: int, kappas: Callable[[float], np.ndarray], a: float, b: float,
                      name: str, constant: bool, description: str = "",
                      ross: Optional[RossProfile] = None) -> CurvatureProfile:
    def operator(t: float) -> np.ndarray:
        return -np.diag(kappas(t))

    return CurvatureProfile(
        dim_n=n,
        operator=operator,
        lower_pinch=ModelCurvature(a),
        upper_pinch=ModelCurvature(b),
        name=name,
        diagonal=True,
        constant=constant,
        description=description,
        ross=ross,
    )


def constant_profile(n: int, a: float, name: Optional[str] = None) -> CurvatureProfile:
    """Real hyperbolic space of curvature -a^2 and dimension n + 1"""
    if n < 1:
        raise ConfigurationError(f"dimension n must be >= 1, got {n}", key="n")
    values = np.full(n, float(a) ** 2)
    return _diagonal_profile(n, lambda t: values, a, a, name or f"constant-n{n}-a{a:g}",
                             constant=True, description=f"constant curvature -{a:g}^2, dimension {n + 1}")


def flat_profile(n: int) -> CurvatureProfile:
    """Euclidean space of dimension n + 1"""
    values = np.zeros(n)
    return _diagonal_profile(n, lambda t: values, 0.0, 0.0, f"flat-n{n}", constant=True,
                             description=f"flat, dimension {n + 1}")


def ross_eigenvalues(ross: RossProfile) -> np.ndarray:
    """Curvature magnitudes: a^2 with multiplicity n - d, then 4a^2 with multiplicity d"""
    a2 = ross.scale ** 2
    return np.array([a2] * (ross.n - ross.d) + [4.0 * a2] * ross.d)


def ross_profile(ross: RossProfile, name: Optional[str] = None) -> CurvatureProfile:
    values = ross_eigenvalues(ross)
    b = 2.0 * ross.scale if ross.d else ross.scale
    label = name or f"ross-{ross.family.value}-{ross.real_dimension}"
    return _diagonal_profile(ross.n, lambda t: values, ross.scale, b, label, constant=True,
                             description=f"{ross.family.value} hyperbolic space, real dimension "
                                         f"{ross.real_dimension}, scale {ross.scale:g}",
                             ross=ross)


def _as_callable(entry: Entry) -> Callable[[float], float]:
    if isinstance(entry, str):
        return parse_expression(entry, 't')
    if isinstance(entry, (int, float)):
        value = float(entry)
        return lambda t: value
    if callable(entry):
        return entry
    raise ConfigurationError(f"profile entry must be an expression, number or callable, got {entry!r}")


def _sample(f: Callable, grid: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(f(grid), dtype=float)
    except TypeError:
        # scalar-only callables
        values = np.array([float(f(t)) for t in grid])
    return values * np.ones_like(grid)


def _is_constant_entry(entry: Entry) -> bool:
    if isinstance(entry, (int, float)):
        return True
    if isinstance(entry, Expression):
        return entry.is_constant
    if isinstance(entry, str):
        return parse_expression(entry, 't').is_constant
    return False


def synthetic_profile(n: int, entries: Sequence[Entry], a: float, b: float,
                      name: str = "synthetic", description: str = "",
                      span: float = SAMPLE_SPAN, samples: int = SAMPLE_COUNT) -> CurvatureProfile:
    """Diagonal profile with declared pinching a <= sqrt(k_i(t)) <= b

    Every entry is sampled on [-span, span]; the first sample outside
    [a^2, b^2] raises PinchingViolationError with the offending t.
    """
    if len(entries) != n:
        raise ConfigurationError(f"expected {n} entries, got {len(entries)}", key="entries")
    if not 0 <= a <= b:
        raise ConfigurationError(f"need 0 <= a <= b, got a={a}, b={b}", key="pinch")

    funcs = [_as_callable(e) for e in entries]
    grid = np.linspace(-span, span, samples)
    lo, hi = a * a, b * b
    for f in funcs:
        values = _sample(f, grid)
        bad = np.flatnonzero(~np.isfinite(values) | (values < lo - PINCH_SLACK) | (values > hi + PINCH_SLACK))
        if bad.size:
            t_bad = float(grid[bad[0]])
            raise PinchingViolationError(
                f"entry of profile '{name}' takes value {values[bad[0]]:.6g} outside [{lo:g}, {hi:g}]", t_bad)

    constant = all(_is_constant_entry(e) for e in entries)

    def kappas(t: float) -> np.ndarray:
        return np.array([float(f(t)) for f in funcs])

    return _diagonal_profile(n, kappas, a, b, name, constant=constant, description=description)


def shifted_profile(p: CurvatureProfile, t0: float) -> CurvatureProfile:
    """Profile t -> R(t + t0), the same geodesic seen from gamma(t0)"""
    return CurvatureProfile(
        dim_n=p.dim_n, operator=lambda t: p.at(t + t0),
        lower_pinch=p.lower_pinch, upper_pinch=p.upper_pinch,
        name=f"{p.name}@{t0:g}", diagonal=p.diagonal, constant=p.constant,
        description=p.description, ross=p.ross,
    )


def reversed_profile(p: CurvatureProfile) -> CurvatureProfile:
    """Profile t -> R(-t), the geodesic run backwards"""
    return CurvatureProfile(
        dim_n=p.dim_n, operator=lambda t: p.at(-t),
        lower_pinch=p.lower_pinch, upper_pinch=p.upper_pinch,
        name=f"{p.name}~reversed", diagonal=p.diagonal, constant=p.constant,
        description=p.description, ross=p.ross,
    )


def _sample_times(span: float = SAMPLE_SPAN, samples: int = SAMPLE_COUNT) -> np.ndarray:
    return np.linspace(-span, span, samples)


def pinching_residual(p: CurvatureProfile, times: Optional[np.ndarray] = None) -> float:
    """Largest violation of a^2 <= eig(-R(t)) <= b^2 over sampled t (<= 0 means pinched)"""
    times = _sample_times() if times is None else times
    lo, hi = p.a ** 2, p.b ** 2
    worst = -math.inf
    for t in times:
        R = p.at(t)
        eig = np.diag(-R) if p.diagonal else np.linalg.eigvalsh(-R)
        worst = max(worst, float(np.max(lo - eig)), float(np.max(eig - hi)))
    return worst


def _is_symmetric(p: CurvatureProfile, times: Optional[np.ndarray] = None, tol: float = 1e-12) -> bool:
    times = _sample_times(samples=50) if times is None else times
    return all(np.allclose(p.at(t), p.at(t).T, atol=tol, rtol=0) for t in times)


def is_even(p: CurvatureProfile, times: Optional[np.ndarray] = None, tol: float = 1e-12) -> bool:
    """R(t) == R(-t) on the sampled grid"""
    times = _sample_times(samples=101) if times is None else times
    return all(np.allclose(p.at(t), p.at(-t), atol=tol, rtol=0) for t in times)


def is_constant_curvature(p: CurvatureProfile, times: Optional[np.ndarray] = None,
                          tol: float = 1e-12) -> bool:
    """All sectional curvatures along the geodesic equal one constant"""
    times = _sample_times(samples=101) if times is None else times
    reference = p.at(float(times[0]))
    value = reference[0, 0]
    target = value * np.eye(p.dim_n)
    return all(np.allclose(p.at(t), target, atol=tol, rtol=0) for t in times)


def manifold_params(p: CurvatureProfile, r_max: Optional[float] = None) -> ManifoldParams:
    """(n, a, b, h, E) with h from the horosphere shape operator and E = nh"""
    from geometry.jacobi_riccati import horosphere_shape_operator

    A = horosphere_shape_operator(p, r_max)
    h = A.trace / p.dim_n
    if not p.a - 1e-9 <= h <= p.b + 1e-9:
        raise ConfigurationError(f"horosphere mean curvature {h:.12g} outside [{p.a:g}, {p.b:g}] "
                                 f"for profile {p.name}")
    return ManifoldParams(n=p.dim_n, a=p.lower_pinch, b=p.upper_pinch, h=h, E=p.dim_n * h)


def ross_from_spec(family: str, real_dimension: int, scale: float = 1.0) -> RossProfile:
    try:
        fam = RossFamily(family)
    except ValueError:
        raise ConfigurationError(f"unknown ROSS family {family!r}", key="family")
    return RossProfile(fam, int(real_dimension), float(scale))

