"""
Experiment Orchestrator - routes configurations to runners and runs suites concurrently
"""

import asyncio
import json
import uuid
from collections import deque
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Deque, Dict, List, Optional, Sequence, Union

from config.builtins import ACCEPTANCE_SUITE
from config.settings import Config
from experiments.base_experiment import BaseExperiment, error_category
from experiments.boundary_experiments import MeanValueExperiment, MeasuresExperiment
from experiments.model_space_experiments import RiccatiCrosscheckExperiment, RigidityExperiment, TauExperiment
from experiments.surface_experiments import ComparisonExperiment, TangencyExperiment
from experiments.volume_experiments import EntropyExperiment, MargulisExperiment
from models.data_models import ExperimentConfig, ExperimentKind, ExperimentResponse, Report
from models.errors import ConfigurationError
from utils.logger import setup_logger


class RunStatus(Enum):
    """Status of a single experiment run"""
    RUNNING = "running"
    PASSED = "passed"
    CHECKS_FAILED = "checks_failed"
    ERROR = "error"


RUN_HISTORY_LIMIT = 100


def load_config(path: Union[str, Path], seed: Optional[int] = None) -> ExperimentConfig:
    """Read and validate a JSON experiment configuration; seed overrides the file's seed"""
    path = Path(path)
    try:
        with path.open('r', encoding='utf-8') as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigurationError(f"configuration file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigurationError(f"invalid JSON in {path}: line {e.lineno}, column {e.colno}: {e.msg}")
    config = ExperimentConfig.from_dict(data)
    if seed is not None:
        config.seed = seed
    return config


def acceptance_configs(seed: Optional[int] = None) -> List[ExperimentConfig]:
    configs = [ExperimentConfig.from_dict(entry) for entry in ACCEPTANCE_SUITE]
    if seed is not None:
        for config in configs:
            config.seed = seed
    return configs


class ExperimentOrchestrator:
    """Runs experiment configurations through the registered runners"""

    def __init__(self, runners: Optional[Sequence[BaseExperiment]] = None):
        self.logger = setup_logger("ExperimentOrchestrator")

        runners = runners if runners is not None else [
            TauExperiment(), RiccatiCrosscheckExperiment(), RigidityExperiment(),
            EntropyExperiment(), MargulisExperiment(),
            ComparisonExperiment(), TangencyExperiment(),
            MeasuresExperiment(), MeanValueExperiment(),
        ]
        # Runner registry
        self.runners: Dict[ExperimentKind, BaseExperiment] = {}
        for runner in runners:
            for kind in runner.kinds:
                self.runners[kind] = runner

        # Run tracking
        self.active_runs: Dict[str, Dict[str, Any]] = {}
        self.run_history: Deque[Dict[str, Any]] = deque(maxlen=RUN_HISTORY_LIMIT)
        self.total_runs = 0
        self.max_concurrent_experiments = Config.MAX_CONCURRENT_EXPERIMENTS

    async def run_experiment(self, config: ExperimentConfig) -> ExperimentResponse:
        """Run one configuration; failures come back as unsuccessful responses"""
        run_id = str(uuid.uuid4())
        runner = self.runners.get(config.kind)
        if runner is None:
            self.logger.error(f"No runner registered for kind {config.kind.value}")
            return ExperimentResponse(success=False, error=f"no runner for kind {config.kind.value}",
                                      error_category="configuration", kind=config.kind)

        run = {
            'run_id': run_id,
            'name': config.name,
            'kind': config.kind.value,
            'status': RunStatus.RUNNING,
            'created_at': datetime.now(),
        }
        self.active_runs[run_id] = run
        self.logger.info(f"Starting run {run_id} for '{config.name}'")
        try:
            response = await runner.execute(config)
        finally:
            del self.active_runs[run_id]

        if not response.success:
            run['status'] = RunStatus.ERROR
            run['error'] = response.error
        elif response.report.passed:
            run['status'] = RunStatus.PASSED
        else:
            run['status'] = RunStatus.CHECKS_FAILED
        run['completed_at'] = datetime.now()
        run['execution_time'] = response.execution_time
        self.run_history.append(run)
        self.total_runs += 1
        return response

    async def run_suite(self, configs: Sequence[ExperimentConfig],
                        max_concurrent: Optional[int] = None) -> List[ExperimentResponse]:
        """Run configurations concurrently; responses come back in configuration order"""
        suite_id = str(uuid.uuid4())
        self.logger.info(f"Starting suite {suite_id} with {len(configs)} experiments")
        semaphore = asyncio.Semaphore(max_concurrent or self.max_concurrent_experiments)

        async def run_single(config: ExperimentConfig) -> ExperimentResponse:
            async with semaphore:
                return await self.run_experiment(config)

        results = await asyncio.gather(*(run_single(c) for c in configs), return_exceptions=True)

        responses = []
        for config, result in zip(configs, results):
            if isinstance(result, Exception):
                self.logger.error(f"Experiment '{config.name}' raised: {str(result)}")
                result = ExperimentResponse(success=False, error=str(result),
                                            error_category=error_category(result), kind=config.kind)
            responses.append(result)

        passed = sum(1 for r in responses if r.success and r.report.passed)
        self.logger.info(f"Suite {suite_id} finished: {passed}/{len(responses)} experiments passed")
        return responses

    @staticmethod
    def merge_reports(name: str, responses: Sequence[ExperimentResponse]) -> Report:
        """Suite report: records of every successful response, in configuration order

        Tables stay with the per-experiment reports.
        """
        merged = Report(name=name, kind="suite")
        for response in responses:
            if response.success:
                merged.records.extend(response.report.records)
        merged.provenance = {
            'version': Config.VERSION,
            'experiments': [r.report.name for r in responses if r.success],
            'errors': [r.error for r in responses if not r.success],
        }
        return merged

    def get_system_status(self) -> Dict[str, Any]:
        """Get overall runner status and statistics"""
        return {
            'active_runs': len(self.active_runs),
            'max_concurrent_experiments': self.max_concurrent_experiments,
            'total_runs_processed': self.total_runs,
            'runner_status': {
                kind.value: runner.get_status() for kind, runner in self.runners.items()
            },
            'recent_runs': [
                {
                    'run_id': r['run_id'],
                    'name': r['name'],
                    'status': r['status'].value,
                    'execution_time': r.get('execution_time'),
                }
                for r in list(self.run_history)[-10:]
            ]
        }


EXIT_PASSED = 0
EXIT_CHECKS_FAILED = 1
EXIT_CONFIGURATION_ERROR = 2
EXIT_NUMERICAL_ERROR = 3


def exit_code(responses: Sequence[ExperimentResponse]) -> int:
    """Configuration errors outrank numerical errors, which outrank failed checks"""
    categories = {r.error_category for r in responses if not r.success}
    if "configuration" in categories:
        return EXIT_CONFIGURATION_ERROR
    if categories:
        return EXIT_NUMERICAL_ERROR
    if not all(r.report.passed for r in responses):
        return EXIT_CHECKS_FAILED
    return EXIT_PASSED
