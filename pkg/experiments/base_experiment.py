"""
Base experiment class for the geometry lab
"""

import asyncio
import time
from abc import ABC, abstractmethod
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List, Optional

import numpy as np

from config.builtins import resolve_profile
from config.settings import Config
from models.data_models import CurvatureProfile, ExperimentConfig, ExperimentKind, ExperimentResponse, Report
from models.errors import ConfigurationError, DomainError, NumericalError
from utils.logger import setup_logger


def error_category(error: Exception) -> str:
    """Category used by the CLI to choose an exit code"""
    if isinstance(error, (ConfigurationError, DomainError)):
        return "configuration"
    if isinstance(error, NumericalError):
        return "numerical"
    return "internal"


class BaseExperiment(ABC):
    """Base class for all experiment runners

    build_report is synchronous numeric work; execute runs it in a worker
    thread and turns exceptions into a failed ExperimentResponse.
    """

    kinds: Iterable[ExperimentKind] = ()

    def __init__(self, name: str):
        self.name = name
        self.logger = setup_logger(f"Experiment_{name}")
        self.is_busy = False
        self.last_activity = datetime.now()
        self.runs = 0

    @abstractmethod
    def build_report(self, config: ExperimentConfig) -> Report:
        """Run every check of the experiment and return the assembled report"""
        pass

    def resolve_profiles(self, config: ExperimentConfig) -> List[CurvatureProfile]:
        if not config.profiles:
            raise ConfigurationError(f"{config.kind.value} experiments need at least one profile", key="profiles")
        return [resolve_profile(entry) for entry in config.profiles]

    def seed(self, config: ExperimentConfig) -> int:
        return config.seed if config.seed is not None else Config.DEFAULT_SEED

    def provenance(self, config: ExperimentConfig) -> Dict[str, Any]:
        provenance = {
            'seed': self.seed(config),
            'version': Config.VERSION,
            'runner': self.name,
            'ode_rtol': Config.ODE_RTOL,
            'ode_atol': Config.ODE_ATOL,
            'convergence_tol': Config.CONVERGENCE_TOL,
        }
        if Config.REPORT_TIMESTAMPS:
            provenance['timestamp'] = datetime.now(timezone.utc).isoformat()
        return provenance

    def _run(self, config: ExperimentConfig) -> Report:
        report = self.build_report(config)
        report.name = config.name
        report.kind = config.kind.value
        report.config = config.to_dict()
        report.provenance = self.provenance(config)
        return report

    async def execute(self, config: ExperimentConfig) -> ExperimentResponse:
        """Execute the experiment, never raising"""
        start_time = time.time()
        self.logger.info(f"Executing {config.kind.value} experiment '{config.name}'")
        self.is_busy = True
        try:
            report = await asyncio.to_thread(self._run, config)
            execution_time = time.time() - start_time
            summary = report.summary
            if report.passed:
                self.logger.info(f"Successfully completed '{config.name}' in {execution_time:.2f}s: "
                                 f"{summary['passed']}/{summary['total']} checks passed")
            else:
                self.logger.warning(f"'{config.name}' finished in {execution_time:.2f}s with "
                                    f"{summary['failed']} failed checks (worst: {summary['worst_check']})")
            return ExperimentResponse(success=True, report=report, execution_time=execution_time,
                                      kind=config.kind)
        except Exception as e:
            category = error_category(e)
            self.logger.error(f"Error in '{config.name}' ({category}): {str(e)}")
            return ExperimentResponse(success=False, error=str(e), error_category=category,
                                      execution_time=time.time() - start_time, kind=config.kind)
        finally:
            self.is_busy = False
            self.runs += 1
            self.last_activity = datetime.now()

    def get_status(self) -> Dict[str, Any]:
        """Get current runner status"""
        return {
            "runner": self.name,
            "kinds": [k.value for k in self.kinds],
            "is_busy": self.is_busy,
            "runs": self.runs,
            "last_activity": self.last_activity.isoformat()
        }


def grid_radii(config: ExperimentConfig, r_min: float, r_max: float, count: int) -> List[float]:
    """Radii from grid.radii, or linspace(grid.r_min, grid.r_max, grid.count) with the given defaults"""
    grid = config.grid
    if 'radii' in grid:
        return [float(r) for r in grid['radii']]
    lo = float(grid.get('r_min', r_min))
    hi = float(grid.get('r_max', r_max))
    n = int(grid.get('count', count))
    return [float(r) for r in np.linspace(lo, hi, n)]


def param(config: ExperimentConfig, key: str, default: Optional[Any] = None) -> Any:
    return config.params.get(key, default)


def tag_tables(report: Report, tag: str) -> Report:
    """Suffix table names so several sub-reports can share one output directory"""
    for table in report.tables:
        table.name = f"{table.name}_{tag}"
    return report
