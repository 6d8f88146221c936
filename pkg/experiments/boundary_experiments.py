"""
Boundary measure experiments on real hyperbolic space
"""

from config.builtins import resolve_boundary_function
from experiments.base_experiment import BaseExperiment, param, tag_tables
from geometry.boundary_measures import DEFAULT_SCHEDULE, boundary_identity_checks, mean_value_experiment
from models.data_models import ExperimentConfig, ExperimentKind, Report
from models.errors import ConfigurationError


class MeasuresExperiment(BaseExperiment):
    """Busemann, harmonic and visual density identities at random points"""

    kinds = (ExperimentKind.MEASURES,)

    def __init__(self):
        super().__init__("measures")

    def build_report(self, config: ExperimentConfig) -> Report:
        report = Report(name=config.name, kind=config.kind.value)
        a = float(param(config, 'a', 1.0))
        dimensions = param(config, 'dimensions', [1, 2])
        if not dimensions or any(not isinstance(n, int) or n < 1 for n in dimensions):
            raise ConfigurationError("must list integers n >= 1", key="params.dimensions")
        for n in dimensions:
            checks = boundary_identity_checks(
                a, n, samples=int(param(config, 'samples', 100)), seed=self.seed(config) + n,
                visual_t=float(param(config, 'visual_t', 30.0)),
                tol=config.tolerance('harmonic', 1e-10), visual_tol=config.tolerance('visual', 1e-4),
                cocycle_tol=config.tolerance('cocycle', 1e-12))
            report.extend(tag_tables(checks, f"n{n}"))
        return report


class MeanValueExperiment(BaseExperiment):
    """Horocycle-ball means of Poisson extensions on the hyperbolic plane"""

    kinds = (ExperimentKind.MEANVALUE,)

    def __init__(self):
        super().__init__("meanvalue")

    def build_report(self, config: ExperimentConfig) -> Report:
        report = Report(name=config.name, kind=config.kind.value)
        a = float(param(config, 'a', 1.0))
        xi_angle = float(param(config, 'xi_angle', 0.0))
        schedule = [float(r) for r in param(config, 'radius_schedule', DEFAULT_SCHEDULE)]
        functions = param(config, 'functions', [])
        if not functions:
            raise ConfigurationError("at least one boundary function is required", key="params.functions")
        for entry in functions:
            name, f = resolve_boundary_function(entry)
            report.extend(mean_value_experiment(a, xi_angle, f, schedule, name=name,
                                                deviation_tol=config.tolerance('deviation', 5e-2)))
        return report
