"""
Jacobi tensor and Riccati flows along a geodesic

The Jacobi path (J'' + R J = 0, linear) is authoritative; the Riccati path
(A' + A^2 + R = 0) is used for cross-validation. Volume densities are carried
as logarithms because theta overflows a double on the octonionic plane.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from config.settings import Config
from geometry.comparison_kernels import Curvature, curvature_value
from geometry.curvature_profiles import is_constant_curvature, shifted_profile
from models.data_models import (
    AsymptoticDensity, CheckRecord, CurvatureProfile, JacobiTensor, JacobiTrajectory,
    Report, ShapeOperator, SphereFlow,
)
from models.errors import (
    ConvergenceError, DomainError, IntegrationError, NumericalError, RiccatiBlowUpError,
)
from utils.logger import setup_logger

logger = setup_logger("JacobiRiccati")

ODE_METHOD = "DOP853"


def default_radius(p: CurvatureProfile) -> float:
    """r_max = 40/a"""
    if p.a <= 0:
        raise DomainError(f"profile {p.name} has no negative upper curvature bound; a > 0 required")
    return Config.RADIUS_FACTOR / p.a


def _solve(rhs, t0: float, t1: float, y0: np.ndarray, tol: Optional[float],
           t_eval: Optional[np.ndarray] = None, events=None, atol=None):
    sol = solve_ivp(rhs, (t0, t1), y0, method=ODE_METHOD,
                    rtol=tol or Config.ODE_RTOL,
                    atol=Config.ODE_ATOL if atol is None else atol,
                    t_eval=t_eval, events=events)
    if sol.status == -1:
        raise IntegrationError(f"integration from {t0:g} to {t1:g} failed: {sol.message}")
    if not np.all(np.isfinite(sol.y)):
        raise IntegrationError(f"non-finite state while integrating from {t0:g} to {t1:g}")
    logger.debug(f"{ODE_METHOD} [{t0:g}, {t1:g}]: {sol.nfev} evaluations, status {sol.status}")
    return sol


def _jacobi_rhs(p: CurvatureProfile):
    n2 = p.dim_n * p.dim_n
    n = p.dim_n

    def rhs(t, y):
        J = y[:n2].reshape(n, n)
        return np.concatenate([y[n2:2 * n2], -p.apply(t, J).ravel()])

    return rhs


def _shape(J: np.ndarray, Jp: np.ndarray) -> np.ndarray:
    """J' J^{-1}, symmetrized"""
    # scales spread like exp(2bt), so test invertibility rather than conditioning
    sign, _ = np.linalg.slogdet(J)
    if sign == 0:
        raise NumericalError("Jacobi tensor is numerically singular")
    A = np.linalg.solve(J.T, Jp.T).T
    if not np.all(np.isfinite(A)):
        raise NumericalError("shape operator is not finite")
    return 0.5 * (A + A.T)


def _relative_drift(tensors: Sequence[JacobiTensor]) -> float:
    W0 = tensors[0].wronskian
    drift = 0.0
    for tensor in tensors:
        scale = np.linalg.norm(tensor.J) * np.linalg.norm(tensor.Jprime)
        if scale > 0:
            drift = max(drift, float(np.linalg.norm(tensor.wronskian - W0) / scale))
    return drift


def integrate_jacobi(p: CurvatureProfile, J0: np.ndarray, J0p: np.ndarray, t0: float, t1: float,
                     tol: Optional[float] = None, t_eval: Optional[Sequence[float]] = None) -> JacobiTrajectory:
    """Solve J'' + R J = 0 from (J0, J0p) at t0 to t1 (either direction)"""
    n = p.dim_n
    J0 = np.asarray(J0, dtype=float).reshape(n, n)
    J0p = np.asarray(J0p, dtype=float).reshape(n, n)
    if tol is not None and tol <= 0:
        raise DomainError(f"tolerance must be positive, got {tol}")
    start = JacobiTensor(t0, J0.copy(), J0p.copy())
    if t0 == t1:
        return JacobiTrajectory([start], 0.0)

    if t_eval is None:
        t_eval = np.linspace(t0, t1, 41)
    t_eval = np.asarray(t_eval, dtype=float)

    sol = _solve(_jacobi_rhs(p), t0, t1, np.concatenate([J0.ravel(), J0p.ravel()]), tol, t_eval)
    n2 = n * n
    tensors = [JacobiTensor(float(t), sol.y[:n2, i].reshape(n, n), sol.y[n2:, i].reshape(n, n))
               for i, t in enumerate(sol.t)]
    if not tensors or tensors[0].t != t0:
        tensors.insert(0, start)
    return JacobiTrajectory(tensors, _relative_drift(tensors))


def sphere_initial_tensor(p: CurvatureProfile, r0: float = None) -> JacobiTensor:
    """Sphere tensor at small r0: J = r0 I - R r0^3/6, J' = I - R r0^2/2"""
    r0 = r0 or Config.SPHERE_START_RADIUS
    R = p.at(0.0)
    I = np.eye(p.dim_n)
    return JacobiTensor(r0, r0 * I - R * r0 ** 3 / 6.0, I - R * r0 ** 2 / 2.0)


def sphere_flow(p: CurvatureProfile, radii: Sequence[float], tol: Optional[float] = None) -> SphereFlow:
    """Sphere Jacobi tensor (J(0)=0, J'(0)=I) with log theta and log of the radial volume integral

    log_ball is log of the integral of theta from 0 to r (no factor vol(S^n)).
    """
    radii = np.asarray(radii, dtype=float)
    if radii.ndim != 1 or radii.size == 0 or np.any(radii <= 0) or np.any(np.diff(radii) <= 0):
        raise DomainError("radii must be positive and strictly increasing")

    n = p.dim_n
    n2 = n * n
    r0 = Config.SPHERE_START_RADIUS
    initial = sphere_initial_tensor(p, r0)
    log_ball0 = (n + 1) * math.log(r0) - math.log(n + 1)

    def rhs(t, y):
        J = y[:n2].reshape(n, n)
        _, logdet = np.linalg.slogdet(J)
        return np.concatenate([y[n2:2 * n2], -p.apply(t, J).ravel(), [math.exp(logdet - y[-1])]])

    small = radii[radii <= r0]
    large = radii[radii > r0]

    log_theta: List[float] = []
    log_ball: List[float] = []
    tensors: List[JacobiTensor] = []
    for r in small:
        tensor = sphere_initial_tensor(p, r)
        tensors.append(tensor)
        log_theta.append(float(np.linalg.slogdet(tensor.J)[1]))
        log_ball.append((n + 1) * math.log(r) - math.log(n + 1))

    if large.size:
        y0 = np.concatenate([initial.J.ravel(), initial.Jprime.ravel(), [log_ball0]])
        sol = _solve(rhs, r0, float(large[-1]), y0, tol, t_eval=large)
        for i, r in enumerate(sol.t):
            J = sol.y[:n2, i].reshape(n, n)
            sign, logdet = np.linalg.slogdet(J)
            if sign <= 0:
                raise NumericalError(f"sphere Jacobi tensor lost invertibility at r={r:g}")
            tensors.append(JacobiTensor(float(r), J, sol.y[n2:2 * n2, i].reshape(n, n)))
            log_theta.append(float(logdet))
            log_ball.append(float(sol.y[-1, i]))

    drift = _relative_drift([initial] + tensors[len(small):]) if large.size else 0.0
    return SphereFlow(radii=radii, log_theta=np.array(log_theta), log_ball=np.array(log_ball),
                      tensors=tensors, wronskian_drift=drift)


def log_theta(p: CurvatureProfile, r: float) -> float:
    """log det J(r) of the sphere tensor"""
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    return float(sphere_flow(p, [r]).log_theta[0])


def theta(p: CurvatureProfile, r: float) -> float:
    """Volume density theta(v, r) = det J_v(r)"""
    return math.exp(log_theta(p, r))


def sphere_shape_operator(p: CurvatureProfile, r: float) -> ShapeOperator:
    """A(r) = J'(r) J(r)^{-1} of the sphere of radius r about gamma(0)"""
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    tensor = sphere_flow(p, [r]).tensors[0]
    return ShapeOperator(r, _shape(tensor.J, tensor.Jprime))


def sphere_shape_operators(p: CurvatureProfile, radii: Sequence[float]) -> List[ShapeOperator]:
    """Sphere shape operators on a radius grid from a single integration"""
    flow = sphere_flow(p, radii)
    return [ShapeOperator(tensor.t, _shape(tensor.J, tensor.Jprime)) for tensor in flow.tensors]


def _blowup_scale(p: CurvatureProfile, factor: float) -> Tuple[float, float]:
    b = p.b
    return factor * (b if b > 0 else 1.0), b


def _time_to_blowup(c: float, b: float) -> float:
    """Upper bound on the time for u' <= -u^2 + b^2 to reach -inf from u = -c, c > b"""
    if b == 0:
        return 1.0 / c
    return math.log((c + b) / (c - b)) / (2.0 * b)


def riccati_integrate(p: CurvatureProfile, A0: ShapeOperator, t0: float, t1: float,
                      tol: Optional[float] = None, t_eval: Optional[Sequence[float]] = None,
                      blowup_factor: float = 2.0) -> List[ShapeOperator]:
    """Solve A' + A^2 + R = 0 from A0 at t0 to t1

    Forward in time an eigenvalue below -blowup_factor*b forces blow-up to -inf;
    backward in time the mirror condition applies to the largest eigenvalue.
    """
    n = p.dim_n
    A_init = np.asarray(A0.A, dtype=float)
    if not np.allclose(A_init, A_init.T, atol=1e-10, rtol=1e-10):
        raise DomainError("initial shape operator must be symmetric")
    forward = t1 >= t0
    c, b = _blowup_scale(p, blowup_factor)

    def guard(A: np.ndarray) -> float:
        eig = np.linalg.eigvalsh(0.5 * (A + A.T))
        return eig[0] + c if forward else c - eig[-1]

    if guard(A_init) < 0:
        estimate = t0 + (1 if forward else -1) * _time_to_blowup(max(c, b * (1 + 1e-12) + 1e-300), b)
        raise RiccatiBlowUpError("initial shape operator already beyond the blow-up threshold", estimate)

    def rhs(t, y):
        A = y.reshape(n, n)
        return (-A @ A - p.at(t)).ravel()

    def event(t, y):
        return guard(y.reshape(n, n))

    event.terminal = True
    event.direction = -1

    if t_eval is None:
        t_eval = np.linspace(t0, t1, 41)
    sol = _solve(rhs, t0, t1, A_init.ravel(), tol, t_eval=np.asarray(t_eval, dtype=float), events=event)
    if sol.status == 1 and sol.t_events[0].size:
        t_hit = float(sol.t_events[0][0])
        estimate = t_hit + (1 if forward else -1) * _time_to_blowup(c, b)
        logger.warning(f"Riccati blow-up detected on {p.name} at t={t_hit:.6g}")
        raise RiccatiBlowUpError(f"Riccati solution on {p.name} left the bounded regime", estimate)

    out = []
    for i, t in enumerate(sol.t):
        A = sol.y[:, i].reshape(n, n)
        out.append(ShapeOperator(float(t), 0.5 * (A + A.T)))
    return out


def _end_derivative(p: CurvatureProfile, start: float, initial_slope: float, tol: Optional[float]) -> np.ndarray:
    """J'(0) J(0)^{-1} for the tensor with J(start) = 0, J'(start) = initial_slope * I"""
    n = p.dim_n
    y0 = np.concatenate([np.zeros(n * n), (initial_slope * np.eye(n)).ravel()])
    sol = _solve(_jacobi_rhs(p), start, 0.0, y0, tol, t_eval=[0.0])
    J = sol.y[:n * n, -1].reshape(n, n)
    Jp = sol.y[n * n:, -1].reshape(n, n)
    return _shape(J, Jp)


def unstable_derivative(p: CurvatureProfile, r: float, tol: Optional[float] = None) -> np.ndarray:
    """U'_{v,r}(0) with U(-r) = 0"""
    return _end_derivative(p, -r, 1.0, tol)


def stable_derivative(p: CurvatureProfile, r: float, tol: Optional[float] = None) -> np.ndarray:
    """S'_{v,r}(0) with S(r) = 0"""
    return _end_derivative(p, r, -1.0, tol)


def _limit_operator(p: CurvatureProfile, r_max: Optional[float], tol: Optional[float],
                    side, label: str) -> ShapeOperator:
    r_max = r_max or default_radius(p)
    tol = tol or Config.CONVERGENCE_TOL
    half = side(p, 0.5 * r_max)
    full = side(p, r_max)
    certificate = float(np.linalg.norm(full - half, 2))
    logger.debug(f"{label} operator on {p.name}: certificate {certificate:.3e} at r_max={r_max:g}")
    if certificate > tol:
        raise ConvergenceError(f"{label} operator on {p.name} not converged at r_max={r_max:g}", certificate)
    return ShapeOperator(0.0, full, certificate)


def horosphere_shape_operator(p: CurvatureProfile, r_max: Optional[float] = None,
                              tol: Optional[float] = None) -> ShapeOperator:
    """U'(0): shape operator at gamma(0) of the horosphere centred at gamma(-inf)"""
    return _limit_operator(p, r_max, tol, unstable_derivative, "horosphere")


def stable_shape_operator(p: CurvatureProfile, r_max: Optional[float] = None,
                          tol: Optional[float] = None) -> ShapeOperator:
    """S'(0); its negative is the horosphere operator for the centre gamma(+inf)"""
    return _limit_operator(p, r_max, tol, stable_derivative, "stable")


def tau_from_tensors(p: CurvatureProfile, r_max: Optional[float] = None) -> AsymptoticDensity:
    """tau = 1 / det(U'(0) - S'(0))"""
    if p.a <= 0:
        raise DomainError(f"tau requires a > 0; profile {p.name} has a = {p.a:g}")
    r_max = r_max or default_radius(p)
    U = horosphere_shape_operator(p, r_max)
    S = stable_shape_operator(p, r_max)
    D = U.A - S.A
    eig = np.linalg.eigvalsh(D)
    if eig[0] <= 0:
        raise NumericalError(f"U'(0) - S'(0) is not positive definite on {p.name} (min eigenvalue {eig[0]:.3e})")
    tau = math.exp(-float(np.sum(np.log(eig))))
    relative = p.dim_n * (U.certificate + S.certificate) / eig[0]
    return AsymptoticDensity(tau=tau, radius_used=r_max, error_bound=tau * relative)


def epsilon_bound(a: Curvature, n: int, r: float) -> float:
    """epsilon(r) = (1 - exp(-2ar))^{-n} - 1"""
    a = curvature_value(a)
    if a <= 0:
        raise DomainError("epsilon bound requires a > 0")
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    x = math.exp(-2.0 * a * r)
    return math.expm1(-n * math.log1p(-x))


def normalized_density(p: CurvatureProfile, h: float, radii: Sequence[float]) -> Tuple[np.ndarray, SphereFlow]:
    """theta(r) exp(-n h r) on the grid"""
    flow = sphere_flow(p, radii)
    return np.exp(flow.log_theta - p.dim_n * h * flow.radii), flow


def tau_from_limit(p: CurvatureProfile, h: float, r_max: Optional[float] = None,
                   count: int = 161, monotone_tol: float = 1e-10) -> AsymptoticDensity:
    """tau = lim theta(r) exp(-n h r), certified by epsilon(r_max)"""
    if p.a <= 0:
        raise DomainError(f"tau requires a > 0; profile {p.name} has a = {p.a:g}")
    r_max = r_max or default_radius(p)
    radii = np.linspace(min(1.0, 0.5 * r_max), r_max, count)
    seq, _ = normalized_density(p, h, radii)

    decrease = -np.diff(seq) / seq[1:]
    worst = float(np.max(decrease)) if decrease.size else 0.0
    if worst > monotone_tol:
        raise ConvergenceError(f"theta(r)exp(-nhr) decreases on {p.name}; h={h:.12g} does not match the profile",
                               worst)
    tau = float(seq[-1])
    return AsymptoticDensity(tau=tau, radius_used=r_max,
                             error_bound=epsilon_bound(p.a, p.dim_n, r_max) * tau)


def finite_radius_identity(p: CurvatureProfile, r: float, h: Optional[float] = None) -> Tuple[float, float]:
    """(theta(r) exp(-n h r), 1/det(U'(0) - S'_r(0))); equal on asymptotically harmonic profiles"""
    if h is None:
        h = horosphere_shape_operator(p).trace / p.dim_n
    lhs = math.exp(log_theta(p, r) - p.dim_n * h * r)
    D = horosphere_shape_operator(p).A - stable_derivative(p, r)
    sign, logdet = np.linalg.slogdet(D)
    if sign <= 0:
        raise NumericalError(f"U'(0) - S'_r(0) not positive on {p.name} at r={r:g}")
    return lhs, math.exp(-logdet)


def mean_curvature_along(p: CurvatureProfile, r: float) -> float:
    """h_x(r) = tr A_sphere(r) / n"""
    return sphere_shape_operator(p, r).trace / p.dim_n


def horosphere_gap(p: CurvatureProfile, r: float, r_max: Optional[float] = None) -> np.ndarray:
    """Eigenvalues of A_sphere(r) - A_horosphere at gamma(r)

    The horosphere is the one through gamma(r) centred at gamma(-inf),
    tangent to the sphere of radius r about gamma(0).
    """
    sphere = sphere_shape_operator(p, r).A
    horo = horosphere_shape_operator(shifted_profile(p, r), r_max).A
    return np.linalg.eigvalsh(sphere - horo)


def ricci_and_norm_checks(p: CurvatureProfile, tol: float = 1e-8, equality_tol: float = 1e-9) -> Report:
    """Ricci lower bound, second fundamental form bound, |A|^2 + Ric = 0 and the h = a rigidity flag"""
    report = Report(name=f"ricci-{p.name}", kind="rigidity")
    n, a = p.dim_n, p.a
    U = horosphere_shape_operator(p)
    h = U.trace / n
    # R(t) carries the sectional curvatures, so Ric(u,u) is its trace
    ricci = float(np.trace(p.at(0.0)))
    norm_sq = float(np.sum(U.A * U.A))
    ceiling = n * n * h * h - n * (n - 1) * a * a
    scale = max(1.0, abs(ricci))

    report.add(CheckRecord(
        name=f"{p.name}: Ric(u,u) >= -n^2h^2 + n(n-1)a^2", group="ricci",
        computed=ricci, oracle=-ceiling, residual=ricci + ceiling, bound=-tol * scale,
        passed=ricci + ceiling >= -tol * scale))
    report.add(CheckRecord(
        name=f"{p.name}: |A|^2 <= n^2h^2 - n(n-1)a^2", group="ricci",
        computed=norm_sq, oracle=ceiling, residual=ceiling - norm_sq, bound=-tol * scale,
        passed=ceiling - norm_sq >= -tol * scale, certificate=U.certificate))
    report.add(CheckRecord(
        name=f"{p.name}: |A|^2 + Ric(u,u) = 0", group="ricci",
        computed=norm_sq + ricci, oracle=0.0, residual=abs(norm_sq + ricci), bound=tol * scale,
        passed=abs(norm_sq + ricci) <= tol * scale, certificate=U.certificate))

    at_equality = abs(h - a) <= equality_tol
    constant = is_constant_curvature(p)
    report.add(CheckRecord(
        name=f"{p.name}: h = a exactly on constant curvature", group="rigidity",
        computed=h, oracle=a, residual=abs(h - a), bound=equality_tol,
        passed=at_equality == constant))
    logger.info(f"Ricci checks on {p.name}: h={h:.12g}, Ric={ricci:.12g}, |A|^2={norm_sq:.12g}")
    return report
