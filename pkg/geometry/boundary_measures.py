"""
Busemann functions and boundary measures on H^{n+1}(-a^2), ball model

Points carry n+1 ball coordinates. Distances far out along a ray (t = 30)
are evaluated on the hyperboloid, where they stay well conditioned.
"""

import math
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from config.settings import Config
from geometry.comparison_kernels import Curvature, arccosh_clamped, curvature_value, inverse_law_of_cosines
from models.data_models import BallPoint, BoundaryPoint, CheckRecord, DensityRatio, Report, Table
from models.errors import DomainError, NumericalError
from utils.logger import setup_logger

logger = setup_logger("BoundaryMeasures")

DEFAULT_SCHEDULE = tuple(2.0 ** j for j in range(11))


def _positive(a: Curvature) -> float:
    a = curvature_value(a)
    if a <= 0:
        raise DomainError("boundary measures need a > 0")
    return a


def _dimension_n(x: BallPoint, xi: BoundaryPoint) -> int:
    if len(x.coords) != len(xi.coords):
        raise DomainError(f"dimension mismatch: {len(x.coords)} vs {len(xi.coords)} coordinates")
    return len(x.coords) - 1


def hyperboloid_lift(x: BallPoint) -> np.ndarray:
    """Ball point as a point of the unit hyperboloid <X, X> = -1"""
    v = x.vector
    s = float(v @ v)
    return np.concatenate([[1.0 + s], 2.0 * v]) / (1.0 - s)


def minkowski(X: np.ndarray, Y: np.ndarray) -> float:
    return float(-X[0] * Y[0] + X[1:] @ Y[1:])


def ball_distance(a: Curvature, x: BallPoint, y: BallPoint) -> float:
    """Distance in H^{n+1}(-a^2): sinh(a d / 2) = |x - y| / sqrt((1-|x|^2)(1-|y|^2))"""
    a = _positive(a)
    u, v = x.vector, y.vector
    gap = float(np.linalg.norm(u - v))
    return 2.0 * math.asinh(gap / math.sqrt((1.0 - u @ u) * (1.0 - v @ v))) / a


def busemann(a: Curvature, x: BallPoint, xi: BoundaryPoint) -> float:
    """b_xi(x) = (1/a) log(|xi - x|^2 / (1 - |x|^2)), zero at the origin"""
    a = _positive(a)
    _dimension_n(x, xi)
    v = x.vector
    gap = xi.vector - v
    return math.log(float(gap @ gap) / (1.0 - float(v @ v))) / a


def ray_point(a: Curvature, xi: BoundaryPoint, t: float) -> BallPoint:
    """Point at distance t from the origin on the ray to xi"""
    a = _positive(a)
    return BallPoint(tuple(math.tanh(0.5 * a * t) * xi.vector))


def busemann_limit(a: Curvature, x: BallPoint, xi: BoundaryPoint, t: float) -> float:
    """d(x, gamma(t)) - t for the ray gamma from the origin to xi"""
    a = _positive(a)
    _dimension_n(x, xi)
    t1 = a * t
    ray = np.concatenate([[math.cosh(t1)], math.sinh(t1) * xi.vector])
    d1 = arccosh_clamped(-minkowski(hyperboloid_lift(x), ray))
    return (d1 - t1) / a


def busemann_gradient_norm(a: Curvature, x: BallPoint, xi: BoundaryPoint, step: float = 1e-6) -> float:
    """Riemannian norm of the central-difference gradient of b_xi at x"""
    a = _positive(a)
    v = x.vector
    grad = np.zeros_like(v)
    for i in range(v.size):
        e = np.zeros_like(v)
        e[i] = step
        grad[i] = (busemann(a, BallPoint(tuple(v + e)), xi) - busemann(a, BallPoint(tuple(v - e)), xi)) / (2 * step)
    # metric (4/a^2)|dx|^2/(1-|x|^2)^2
    return float(np.linalg.norm(grad)) * a * (1.0 - float(v @ v)) / 2.0


def poisson_kernel(x: BallPoint, xi: BoundaryPoint) -> float:
    """(1 - |x|^2) / |x - xi|^2; its n-th power is the harmonic measure density"""
    v = x.vector
    gap = v - xi.vector
    return (1.0 - float(v @ v)) / float(gap @ gap)


def harmonic_density_ratio(a: Curvature, x: BallPoint, y: BallPoint, xi: BoundaryPoint) -> float:
    """d(mu_x)/d(mu_y)(xi) = exp(-n a (b_xi(x) - b_xi(y)))"""
    a = _positive(a)
    n = _dimension_n(x, xi)
    return math.exp(-n * a * (busemann(a, x, xi) - busemann(a, y, xi)))


def poisson_ratio(x: BallPoint, y: BallPoint, xi: BoundaryPoint) -> float:
    """(P(x, xi) / P(y, xi))^n"""
    n = _dimension_n(x, xi)
    return (poisson_kernel(x, xi) / poisson_kernel(y, xi)) ** n


def visual_density_ratio_numeric(a: Curvature, x: BallPoint, y: BallPoint, xi: BoundaryPoint,
                                 t: float) -> float:
    """Jacobian ratio of the radial projections from x and y at the point of S_x(t) towards xi

    theta(d_y)/theta(t) over the cosine of the angle between the two radial
    gradients, with theta(r) = sinh^n(r) in unit curvature.
    """
    a = _positive(a)
    n = _dimension_n(x, xi)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    t1 = a * t
    X, Y = hyperboloid_lift(x), hyperboloid_lift(y)
    null = np.concatenate([[1.0], xi.vector])
    c = -minkowski(X, null)
    point = math.exp(-t1) * X + (math.sinh(t1) / c) * null
    d_y = arccosh_clamped(-minkowski(Y, point))
    d_xy = arccosh_clamped(-minkowski(X, Y))
    if d_xy == 0.0:
        return 1.0
    if d_y == 0.0:
        raise DomainError("y lies on the sphere S_x(t) in the direction of xi")
    gamma = inverse_law_of_cosines(1.0, t1, d_y, d_xy)
    cos_gamma = math.cos(gamma)
    if cos_gamma <= 0:
        raise DomainError(f"t = {t:g} too small: radial gradients make an obtuse angle")
    growth = n * (d_y - t1) + n * (math.log1p(-math.exp(-2 * d_y)) - math.log1p(-math.exp(-2 * t1)))
    return math.exp(growth) / cos_gamma


def mobius_to_origin(x: BallPoint, z: np.ndarray) -> np.ndarray:
    """Ball isometry sending x to the origin with derivative a positive multiple of the identity at x"""
    v = x.vector
    z = np.asarray(z, dtype=float)
    s = float(v @ v)
    diff = z - v
    numerator = (1.0 - s) * diff - float(diff @ diff) * v
    denominator = 1.0 - 2.0 * float(z @ v) + float(z @ z) * s
    return numerator / denominator


def direction_to_boundary(x: BallPoint, xi: BoundaryPoint) -> BoundaryPoint:
    """Unit direction at x of the ray to xi"""
    _dimension_n(x, xi)
    w = mobius_to_origin(x, xi.vector)
    return BoundaryPoint(tuple(w / np.linalg.norm(w)))


def visual_density_ratio(a: Curvature, x: BallPoint, y: BallPoint, xi: BoundaryPoint,
                         tau: Optional[Callable[[np.ndarray], float]] = None) -> DensityRatio:
    """Visual density ratio tau(u_y)/tau(u_x) * harmonic ratio, u_* the directions towards xi"""
    harmonic = harmonic_density_ratio(a, x, y, xi)
    if tau is None:
        return DensityRatio(visual=harmonic, harmonic=harmonic)
    tau_x = float(tau(direction_to_boundary(x, xi).vector))
    tau_y = float(tau(direction_to_boundary(y, xi).vector))
    if not (tau_x > 0 and tau_y > 0):
        raise DomainError("tau must be positive on unit directions")
    return DensityRatio(visual=tau_y / tau_x * harmonic, harmonic=harmonic)


def random_ball_point(rng: np.random.Generator, n: int, max_radius: float = 0.9) -> BallPoint:
    direction = rng.normal(size=n + 1)
    direction /= np.linalg.norm(direction)
    return BallPoint(tuple(max_radius * rng.uniform() ** (1.0 / (n + 1)) * direction))


def random_boundary_point(rng: np.random.Generator, n: int) -> BoundaryPoint:
    direction = rng.normal(size=n + 1)
    return BoundaryPoint(tuple(direction / np.linalg.norm(direction)))


class HorocycleMeans:
    """Means of the Poisson extension F of f over arcs of horocycles in H^2(-a^2)

    The disc is mapped to the upper half plane with xi at infinity, where the
    horocycles about xi are the lines Im z = y. Boundary point s of the half
    plane sits at disc angle phi_xi - 2 atan2(1, s). The base horocycle passes
    through the point corresponding to the disc centre (y = 1) and an arc of
    intrinsic radius r on it is |Re z| <= a r.
    """

    def __init__(self, a: Curvature, xi_angle: float, boundary_function: Callable[[np.ndarray], np.ndarray],
                 epsrel: Optional[float] = None):
        self.a = _positive(a)
        self.xi_angle = float(xi_angle)
        self.f = boundary_function
        self.f_xi = float(boundary_function(np.array(self.xi_angle)))
        self.epsrel = epsrel or Config.QUAD_EPSREL
        self.logger = setup_logger("BoundaryMeasures")

    def boundary_angle(self, s: float) -> float:
        return self.xi_angle - 2.0 * math.atan2(1.0, s)

    def _excess(self, s: float) -> float:
        return float(self.f(np.array(self.boundary_angle(s)))) - self.f_xi

    def _integrate(self, g: Callable[[float], float], lo: float, hi: float, points=None) -> float:
        value, error = quad(g, lo, hi, points=points, epsabs=1e-14, epsrel=self.epsrel, limit=400)
        if not math.isfinite(value):
            raise NumericalError("horocycle mean quadrature returned a non-finite value")
        return value

    def mean(self, half_width: float, y: float = 1.0) -> float:
        """Mean of F over Re z in [-L, L] at height y"""
        L = half_width

        def weighted(s: float) -> float:
            kernel = (math.atan((L - s) / y) + math.atan((L + s) / y)) / math.pi
            return self._excess(s) * kernel

        edge = L + 50.0 * y
        inner = sorted({-L, -min(L, 8.0), 0.0, min(L, 8.0), L})
        total = self._integrate(weighted, -edge, edge, points=inner)
        total += self._integrate(weighted, edge, math.inf)
        total += self._integrate(weighted, -math.inf, -edge)
        return self.f_xi + total / (2.0 * L)

    def ball_mean(self, radius: float) -> float:
        """Mean over the horocycle ball of intrinsic radius `radius` about the base point"""
        return self.mean(self.a * radius)

    def flowed_mean(self, radius: float, t: float) -> float:
        """g(t): mean over the ball flowed a distance t along the Busemann gradient, volume e^{at} Vol"""
        return self.mean(self.a * radius, math.exp(-self.a * t))

    def ode_residual(self, radius: float, times: Sequence[float], step: float = 0.1) -> float:
        """max |g'' - a g'| on the grid by central differences (n h = a on H^2)"""
        worst = 0.0
        for t in times:
            g_minus = self.flowed_mean(radius, t - step)
            g_zero = self.flowed_mean(radius, t)
            g_plus = self.flowed_mean(radius, t + step)
            second = (g_plus - 2.0 * g_zero + g_minus) / (step * step)
            first = (g_plus - g_minus) / (2.0 * step)
            worst = max(worst, abs(second - self.a * first))
        return worst


def mean_value_experiment(a: Curvature, xi_angle: float, boundary_function: Callable[[np.ndarray], np.ndarray],
                          radius_schedule: Sequence[float] = DEFAULT_SCHEDULE, name: str = "f",
                          deviation_tol: float = 5e-2, times: Optional[Sequence[float]] = None) -> Report:
    """Horocycle-ball means of the Poisson extension against F(xi) along a radius schedule

    The best radius of the schedule is checked, not the last one: only a
    subsequence of radii is known to converge. The residual of g'' - a g' must
    decrease across the last three radius doublings.
    """
    means = HorocycleMeans(a, xi_angle, boundary_function)
    a = means.a
    schedule = sorted(float(r) for r in radius_schedule)
    if len(schedule) < 3 or any(r <= 0 for r in schedule):
        raise DomainError("radius schedule needs at least three positive radii")
    times = list(times) if times is not None else [k * 0.5 / a for k in range(1, 5)]

    report = Report(name=f"meanvalue-{name}", kind="meanvalue")
    rows = []
    deviations = []
    residuals = []
    for r in schedule:
        mean = means.ball_mean(r)
        deviation = abs(mean - means.f_xi)
        residual = means.ode_residual(r, times)
        deviations.append(deviation)
        residuals.append(residual)
        rows.append([r, a * r, mean, deviation, residual])
        logger.debug(f"mean value {name}: r={r:g} mean={mean:.12g} deviation={deviation:.3e} "
                     f"residual={residual:.3e}")

    best = int(np.argmin(deviations))
    report.add(CheckRecord(name=f"{name}: best-radius deviation |mean - F(xi)|", group="meanvalue",
                           computed=schedule[best], oracle=means.f_xi, residual=deviations[best],
                           bound=deviation_tol, passed=deviations[best] <= deviation_tol))
    report.add(CheckRecord(name=f"{name}: deviation at the last radius", group="meanvalue",
                           computed=schedule[-1], oracle=means.f_xi, residual=deviations[-1],
                           bound=None, passed=True))
    tail = residuals[-3:]
    decreasing = all(later < earlier for earlier, later in zip(tail, tail[1:]))
    report.add(CheckRecord(name=f"{name}: |g'' - nh g'| decreasing over the last three doublings",
                           group="meanvalue", computed=tail[-1], oracle=0.0, residual=tail[-1],
                           bound=tail[0], passed=decreasing))
    report.tables.append(Table(f"meanvalue_{name}", ["r", "half_width", "mean", "deviation", "g_residual"], rows))
    return report


def boundary_identity_checks(a: Curvature, n: int, samples: int, seed: int, visual_t: float = 30.0,
                             tol: float = 1e-10, visual_tol: float = 1e-4, cocycle_tol: float = 1e-12,
                             convergence_times: Sequence[float] = (10.0, 15.0, 20.0, 25.0, 30.0)) -> Report:
    """Busemann, Poisson, cocycle and visual-Jacobian checks at random points"""
    a = _positive(a)
    rng = np.random.default_rng(seed)
    report = Report(name=f"measures-n{n}-a{a:g}", kind="measures")
    rows = []
    for trial in range(samples):
        x, y, z = (random_ball_point(rng, n) for _ in range(3))
        xi = random_boundary_point(rng, n)
        label = f"sample {trial}"

        limit = busemann_limit(a, x, xi, visual_t)
        closed = busemann(a, x, xi)
        report.add(CheckRecord(name=f"{label}: Busemann closed form vs limit at t={visual_t:g}", group="busemann",
                               computed=closed, oracle=limit, residual=abs(closed - limit), bound=1e-8,
                               passed=abs(closed - limit) <= 1e-8))
        norm = busemann_gradient_norm(a, x, xi)
        report.add(CheckRecord(name=f"{label}: |grad b| = 1", group="busemann", computed=norm, oracle=1.0,
                               residual=abs(norm - 1.0), bound=1e-6, passed=abs(norm - 1.0) <= 1e-6))

        harmonic = harmonic_density_ratio(a, x, y, xi)
        poisson = poisson_ratio(x, y, xi)
        rel = abs(harmonic / poisson - 1.0)
        report.add(CheckRecord(name=f"{label}: harmonic ratio = Poisson ratio", group="harmonic",
                               computed=harmonic, oracle=poisson, residual=rel, bound=tol, passed=rel <= tol))

        chained = harmonic * harmonic_density_ratio(a, y, z, xi)
        direct = harmonic_density_ratio(a, x, z, xi)
        rel = abs(chained / direct - 1.0)
        report.add(CheckRecord(name=f"{label}: harmonic cocycle", group="cocycle", computed=chained,
                               oracle=direct, residual=rel, bound=cocycle_tol, passed=rel <= cocycle_tol))

        visual_xy = visual_density_ratio_numeric(a, x, y, xi, visual_t)
        rel = abs(visual_xy / harmonic - 1.0)
        report.add(CheckRecord(name=f"{label}: visual Jacobian ratio at t={visual_t:g}", group="visual",
                               computed=visual_xy, oracle=harmonic, residual=rel, bound=visual_tol,
                               passed=rel <= visual_tol))
        chained = visual_density_ratio(a, x, y, xi).visual * visual_density_ratio(a, y, z, xi).visual
        direct = visual_density_ratio(a, x, z, xi).visual
        rel = abs(chained / direct - 1.0)
        report.add(CheckRecord(name=f"{label}: visual cocycle", group="cocycle", computed=chained,
                               oracle=direct, residual=rel, bound=cocycle_tol, passed=rel <= cocycle_tol))

        # convergence in t is recorded, not asserted
        for t in convergence_times:
            value = visual_density_ratio_numeric(a, x, y, xi, t)
            rows.append([trial, t, value, harmonic, abs(value / harmonic - 1.0)])

    report.tables.append(Table("visual_convergence", ["sample", "t", "visual_numeric", "harmonic", "residual"], rows))
    logger.info(f"Boundary checks n={n}, a={a:g}: {report.summary['passed']}/{report.summary['total']} passed")
    return report
