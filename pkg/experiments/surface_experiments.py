"""
Experiments on warped surfaces: triangle comparison, tangent circles and the horocycle exhibit
"""

import math

import numpy as np

from config.builtins import resolve_profile, resolve_surface
from experiments.base_experiment import BaseExperiment, param
from geometry.curvature_profiles import shifted_profile
from geometry.jacobi_riccati import horosphere_shape_operator
from geometry.surface_lab import (
    WarpedSurface, geodesic_curvature_profile, horocurvature_profile, verify_tangent_circles,
    verify_triangle_comparison,
)
from models.data_models import CheckRecord, ExperimentConfig, ExperimentKind, Report, Table
from models.errors import ConfigurationError

DEFAULT_ROSS = ['rh3-a1', 'ch2', 'hh2', 'oh2']


def _surface(config: ExperimentConfig) -> WarpedSurface:
    if config.surface is None:
        raise ConfigurationError(f"{config.kind.value} experiments need a surface", key="surface")
    return resolve_surface(config.surface)


class ComparisonExperiment(BaseExperiment):
    """Triangle comparison on a surface, optionally with the horocycle curvature exhibit"""

    kinds = (ExperimentKind.COMPARISON,)

    def __init__(self):
        super().__init__("comparison")

    def build_report(self, config: ExperimentConfig) -> Report:
        s = _surface(config)
        equality = bool(param(config, 'equality', False))
        report = verify_triangle_comparison(
            s, trials=int(param(config, 'trials', 200)), seed=self.seed(config),
            thetas=[float(t) for t in param(config, 'thetas', [0.25, 0.5, 0.75])],
            slack=config.tolerance('slack', 1e-6),
            equality_tol=config.tolerance('equality', 1e-8) if equality else None)
        if param(config, 'exhibit', False):
            report.extend(self.horocycle_exhibit(s, config))
        return report

    def horocycle_exhibit(self, s: WarpedSurface, config: ExperimentConfig) -> Report:
        """Horocycle curvature varies along a geodesic of a non-constant surface but not on a ROSS"""
        report = Report(name=f"exhibit-{s.name}", kind="comparison")
        spread_min = config.tolerance('exhibit_spread', 1e-2)
        ross_tol = config.tolerance('ross_constant', 1e-9)
        agreement = config.tolerance('profile_agreement', 1e-2)

        # tangential start at r = 1 keeps the geodesic off the pole
        start = s.state(float(param(config, 'exhibit_radius', 1.0)), 0.0, math.pi / 2)
        times = np.linspace(-3.0, 3.0, 31)
        profile = horocurvature_profile(s, start, times)
        values = [h for _, h in profile]
        spread = max(values) - min(values)
        self.logger.info(f"Horocycle curvature along a geodesic of '{s.name}' spans {spread:.6g}")
        report.add(CheckRecord(name=f"{s.name}: horocycle curvature varies along a geodesic", group="exhibit",
                               computed=spread, oracle=spread_min, residual=spread - spread_min, bound=0.0,
                               passed=spread > spread_min))

        # same quantity through the curvature profile along the geodesic
        length = float(param(config, 'profile_length', 40.0 / s.a))
        along = geodesic_curvature_profile(s, start, length)
        k0 = horosphere_shape_operator(along, r_max=length).trace
        h0 = float(np.interp(0.0, times, values))
        report.add(CheckRecord(name=f"{s.name}: horocycle curvature via the geodesic curvature profile",
                               group="exhibit", computed=k0, oracle=h0, residual=abs(k0 - h0), bound=agreement,
                               passed=abs(k0 - h0) <= agreement))

        rows = [[t, h] for t, h in profile]
        for name in param(config, 'ross_profiles', DEFAULT_ROSS):
            p = resolve_profile(name)
            means = [horosphere_shape_operator(shifted_profile(p, t)).trace / p.dim_n for t in (0.0, 2.5, 5.0)]
            ross_spread = max(means) - min(means)
            report.add(CheckRecord(name=f"{p.name}: horosphere mean curvature constant along the geodesic",
                                   group="exhibit", computed=ross_spread, oracle=0.0, residual=ross_spread,
                                   bound=ross_tol, passed=ross_spread <= ross_tol))
        report.tables.append(Table("horocycle_curvature", ["t", "k_xi"], rows))
        return report


class TangencyExperiment(BaseExperiment):
    """Curvature gaps of internally tangent circles and of circles against horocycles"""

    kinds = (ExperimentKind.TANGENCY,)

    def __init__(self):
        super().__init__("tangency")

    def build_report(self, config: ExperimentConfig) -> Report:
        s = _surface(config)
        equality = bool(param(config, 'equality', False))
        return verify_tangent_circles(
            s, trials=int(param(config, 'trials', 100)), seed=self.seed(config),
            slack=config.tolerance('slack', 1e-6),
            equality_tol=config.tolerance('equality', 1e-8) if equality else None)
