"""
Volume growth, entropy, isoperimetric and Margulis computations from theta
"""

import math
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import gammaln, logsumexp

from geometry.curvature_profiles import ross_profile
from geometry.jacobi_riccati import (
    default_radius, epsilon_bound, horosphere_shape_operator, sphere_flow, sphere_shape_operators,
    tau_from_tensors,
)
from models.data_models import (
    CheckRecord, CurvatureProfile, ManifoldParams, MargulisValue, Report, RossProfile, Table, VolumeCurve,
)
from models.errors import ConvergenceError, DomainError
from utils.logger import setup_logger

logger = setup_logger("Asymptotics")

DirectionRule = List[Tuple[CurvatureProfile, float]]
ProfileInput = Union[CurvatureProfile, DirectionRule]


def log_sphere_constant(n: int) -> float:
    """log vol(S^n) = log(2 pi^{(n+1)/2} / Gamma((n+1)/2))"""
    return math.log(2.0) + 0.5 * (n + 1) * math.log(math.pi) - float(gammaln(0.5 * (n + 1)))


def sphere_constant(n: int) -> float:
    return math.exp(log_sphere_constant(n))


def trapezoidal_direction_quadrature(profiles: Sequence[CurvatureProfile]) -> DirectionRule:
    """Equal weights over the direction sphere, summing to vol(S^n)"""
    if not profiles:
        raise DomainError("direction quadrature needs at least one direction")
    n = profiles[0].dim_n
    if any(p.dim_n != n for p in profiles):
        raise DomainError("all directions must share the dimension")
    weight = sphere_constant(n) / len(profiles)
    return [(p, weight) for p in profiles]


def _directions(p: ProfileInput) -> DirectionRule:
    if isinstance(p, CurvatureProfile):
        return [(p, sphere_constant(p.dim_n))]
    rule = list(p)
    if not rule:
        raise DomainError("empty direction quadrature")
    return rule


def volume_curve(p: ProfileInput, radii: Sequence[float]) -> VolumeCurve:
    """Sphere volumes vol(S^n) theta(r) (or a direction quadrature of theta) and their running integral"""
    rule = _directions(p)
    n = rule[0][0].dim_n
    for profile, weight in rule:
        if profile.a <= 0:
            raise DomainError(f"volume curves need a > 0; profile {profile.name} has a = {profile.a:g}")
        if not weight > 0:
            raise DomainError(f"quadrature weights must be positive, got {weight}")

    flows = [sphere_flow(profile, radii) for profile, _ in rule]
    log_weights = np.array([math.log(w) for _, w in rule])[:, None]
    log_sphere = logsumexp(log_weights + np.vstack([f.log_theta for f in flows]), axis=0)
    log_ball = logsumexp(log_weights + np.vstack([f.log_ball for f in flows]), axis=0)
    return VolumeCurve(radii=flows[0].radii, log_sphere_vol=log_sphere, log_ball_vol=log_ball, dim_n=n)


def entropy_estimate(vc: VolumeCurve, window: Tuple[float, float]) -> Tuple[float, float]:
    """(slope, rms residual) of the least-squares line through log V(r) on the window"""
    lo, hi = window
    if hi - lo < 10.0 - 1e-12:
        raise DomainError(f"entropy window must span at least 10, got [{lo:g}, {hi:g}]")
    if lo < vc.radii[0] - 1e-12 or hi > vc.radii[-1] + 1e-12:
        raise DomainError(f"window [{lo:g}, {hi:g}] outside the grid [{vc.radii[0]:g}, {vc.radii[-1]:g}]")
    mask = (vc.radii >= lo - 1e-12) & (vc.radii <= hi + 1e-12)
    if np.count_nonzero(mask) < 3:
        raise DomainError("entropy window holds fewer than three grid radii")
    r = vc.radii[mask]
    log_v = vc.log_ball_vol[mask]
    slope, intercept = np.polyfit(r, log_v, 1)
    residual = float(np.sqrt(np.mean((log_v - (slope * r + intercept)) ** 2)))
    return float(slope), residual


def default_entropy_window(a: float) -> Tuple[float, float]:
    return 10.0 / a, 30.0 / a


def spectrum_bottom(params: ManifoldParams) -> float:
    """n^2 h^2 / 4"""
    return (params.n * params.h) ** 2 / 4.0


def isoperimetric_check(vc: VolumeCurve, h: float, slack: float = 1e-8) -> Report:
    """nh V(r) <= V'(r) = vol(S(r)) at every grid radius, and V(r)e^{-nhr} nondecreasing"""
    nh = vc.dim_n * h
    report = Report(name="isoperimetric", kind="entropy")
    # ratio nh V / V' in logs
    log_ratio = math.log(nh) + vc.log_ball_vol - vc.log_sphere_vol
    for r, lr in zip(vc.radii, log_ratio):
        relative = -math.expm1(lr)
        report.add(CheckRecord(name=f"nh V({r:.4g}) <= V'({r:.4g})", group="isoperimetric",
                               computed=math.exp(lr), oracle=1.0, residual=relative, bound=-slack,
                               passed=relative >= -slack))
    normalized = vc.normalized_ball(nh)
    decrease = -np.diff(normalized) / normalized[1:]
    worst = float(np.max(decrease)) if decrease.size else 0.0
    report.add(CheckRecord(name="V(r)exp(-nhr) nondecreasing", group="isoperimetric", computed=worst,
                           oracle=0.0, residual=-worst, bound=-slack, passed=worst <= slack))
    return report


def margulis(p: ProfileInput, h: float, r_max: Optional[float] = None,
             direction_quadrature: Optional[DirectionRule] = None, count: int = 161) -> MargulisValue:
    """m = lim vol(S(r))e^{-nhr}, cross-checked against the integral of tau over directions"""
    rule = direction_quadrature or _directions(p)
    base = rule[0][0]
    n, a = base.dim_n, min(profile.a for profile, _ in rule)
    r_max = r_max or default_radius(base)
    radii = np.linspace(min(1.0, 0.5 * r_max), r_max, count)

    vc = volume_curve(rule, radii)
    m_limit = float(vc.normalized(n * h)[-1])
    limit_certificate = epsilon_bound(a, n, r_max) * m_limit

    densities = [tau_from_tensors(profile, r_max) for profile, _ in rule]
    m_quadrature = float(sum(w * d.tau for (_, w), d in zip(rule, densities)))
    quadrature_certificate = float(sum(w * d.error_bound for (_, w), d in zip(rule, densities)))

    gap = abs(m_limit - m_quadrature)
    allowed = limit_certificate + quadrature_certificate + 1e-10 * m_quadrature
    logger.debug(f"Margulis on {base.name}: limit {m_limit:.15g}, quadrature {m_quadrature:.15g}, gap {gap:.3e}")
    if gap > allowed:
        raise ConvergenceError(f"Margulis limit and tau quadrature disagree on {base.name}", gap)
    return MargulisValue(m=m_limit, ball_limit=m_limit / (n * h),
                         certificate=limit_certificate + quadrature_certificate, m_quadrature=m_quadrature)


def margulis_rate_check(vc: VolumeCurve, h: float, m: float, a: float, slack: float = 1e-10) -> Report:
    """|v(r)e^{-nhr} - m| <= m eps(r) for every grid radius r >= 1"""
    report = Report(name="margulis-rate", kind="margulis")
    n = vc.dim_n
    normalized = vc.normalized(n * h)
    rows = []
    for r, value in zip(vc.radii, normalized):
        if r < 1.0:
            continue
        eps = epsilon_bound(a, n, float(r))
        gap = abs(value - m)
        rows.append([float(r), float(value), gap, m * eps])
        report.add(CheckRecord(name=f"|v({r:.4g})e^(-nhr) - m| <= m eps", group="rate", computed=float(value),
                               oracle=m, residual=m * eps - gap, bound=-slack * m, certificate=eps,
                               passed=m * eps - gap >= -slack * m))
    report.tables.append(Table("margulis_rate", ["r", "normalized_sphere_vol", "gap", "m_eps"], rows))
    return report


def horosphere_growth_exponent(p: Union[RossProfile, CurvatureProfile],
                               r_max: Optional[float] = None) -> Tuple[float, int]:
    """(nh/a, (n-d) + 2d) for a rank one symmetric space"""
    if isinstance(p, CurvatureProfile):
        if p.ross is None:
            raise DomainError(f"growth exponent identity is only defined for ROSS profiles, got {p.name}")
        ross, profile = p.ross, p
    else:
        ross, profile = p, ross_profile(p)
    h = horosphere_shape_operator(profile, r_max).trace / ross.n
    bound = ross.n * h / ross.scale
    actual = (ross.n - ross.d) + 2 * ross.d
    return bound, actual


def horosphere_lower_exponent(params: ManifoldParams) -> float:
    """nh/b, the growth degree forced by K >= -b^2"""
    return params.n * params.h / params.b.a


def mean_curvature_bounds(p: CurvatureProfile, h: float, radii: Sequence[float], tol: float = 1e-7) -> Report:
    """h <= tr A_sphere(r)/n <= h + 1/r on the grid, and sup_{r >= R}|tr A - nh| <= n/R"""
    report = Report(name=f"mean-curvature-{p.name}", kind="tau")
    n = p.dim_n
    operators = sphere_shape_operators(p, radii)
    traces = np.array([op.trace for op in operators])
    radii = np.asarray([op.t for op in operators])
    rows = []
    for r, tr in zip(radii, traces):
        mean = tr / n
        rows.append([float(r), mean, mean - h])
        report.add(CheckRecord(name=f"{p.name}: h <= h_x({r:.4g})", group="mean-curvature", computed=mean,
                               oracle=h, residual=mean - h, bound=-tol, passed=mean - h >= -tol))
        report.add(CheckRecord(name=f"{p.name}: h_x({r:.4g}) <= h + 1/r", group="mean-curvature",
                               computed=mean, oracle=h + 1.0 / r, residual=h + 1.0 / r - mean, bound=-tol,
                               passed=h + 1.0 / r - mean >= -tol))

    # tail suprema of |tr A - nh| from the right
    deviation = np.abs(traces - n * h)
    tail = np.maximum.accumulate(deviation[::-1])[::-1]
    worst = float(np.max(tail - n / radii))
    report.add(CheckRecord(name=f"{p.name}: sup_(r>=R)|Delta r - nh| <= n/R", group="mean-curvature",
                           computed=worst, oracle=0.0, residual=-worst, bound=-tol, passed=worst <= tol))
    report.tables.append(Table(f"mean_curvature_{p.name}", ["r", "h_x", "excess"], rows))
    return report
