"""
Unit tests for the Experiment Orchestrator
"""

import json

import pytest
from unittest.mock import AsyncMock

from config.settings import Config
from experiments.base_experiment import BaseExperiment
from experiments.orchestrator import (
    EXIT_CHECKS_FAILED, EXIT_CONFIGURATION_ERROR, EXIT_NUMERICAL_ERROR, EXIT_PASSED, ExperimentOrchestrator,
    RUN_HISTORY_LIMIT, RunStatus, acceptance_configs, exit_code, load_config,
)
from models.data_models import CheckRecord, ExperimentConfig, ExperimentKind, ExperimentResponse, Report
from models.errors import ConfigurationError, IntegrationError


def make_report(name: str, passed: bool = True) -> Report:
    report = Report(name=name, kind="tau")
    report.add(CheckRecord(name=f"{name}: check", computed=1.0, oracle=1.0, residual=0.0, bound=1e-8,
                           passed=passed))
    return report


class StubExperiment(BaseExperiment):
    """Runner returning a fixed report, or raising the configured error"""
    kinds = (ExperimentKind.TAU, ExperimentKind.ENTROPY)

    def __init__(self, passed: bool = True, error: Exception = None):
        super().__init__("stub")
        self.passed = passed
        self.error = error

    def build_report(self, config: ExperimentConfig) -> Report:
        if self.error is not None:
            raise self.error
        return make_report(config.name, self.passed)


def tau_config(name: str = "tau-test") -> ExperimentConfig:
    return ExperimentConfig.from_dict({'name': name, 'kind': 'tau', 'profiles': ['rh3-a1']})


def ok(name: str, passed: bool = True) -> ExperimentResponse:
    return ExperimentResponse(success=True, report=make_report(name, passed), kind=ExperimentKind.TAU)


def failed(category: str) -> ExperimentResponse:
    return ExperimentResponse(success=False, error=f"{category} trouble", error_category=category)


class TestExperimentOrchestrator:

    @pytest.fixture
    def orchestrator(self):
        return ExperimentOrchestrator(runners=[StubExperiment()])

    def test_default_registry_covers_every_kind(self):
        """The default orchestrator has a runner for each experiment kind"""
        assert set(ExperimentOrchestrator().runners) == set(ExperimentKind)

    @pytest.mark.asyncio
    async def test_run_experiment_success(self, orchestrator):
        """A passing run is recorded in the history"""
        response = await orchestrator.run_experiment(tau_config())

        assert response.success is True
        assert response.report.name == "tau-test"
        assert response.report.provenance['runner'] == "stub"
        assert orchestrator.run_history[-1]['status'] == RunStatus.PASSED
        assert orchestrator.active_runs == {}

    @pytest.mark.asyncio
    async def test_run_experiment_failed_checks(self):
        """Failed checks are a successful run with a failing report"""
        orchestrator = ExperimentOrchestrator(runners=[StubExperiment(passed=False)])
        response = await orchestrator.run_experiment(tau_config())

        assert response.success is True
        assert response.report.passed is False
        assert orchestrator.run_history[-1]['status'] == RunStatus.CHECKS_FAILED

    @pytest.mark.asyncio
    @pytest.mark.parametrize("error,category", [
        (ConfigurationError("bad profile", key="profiles"), "configuration"),
        (IntegrationError("step size underflow"), "numerical"),
        (ZeroDivisionError("oops"), "internal"),
    ])
    async def test_runner_errors_are_categorized(self, error, category):
        """Runner exceptions become unsuccessful responses with a category"""
        orchestrator = ExperimentOrchestrator(runners=[StubExperiment(error=error)])
        response = await orchestrator.run_experiment(tau_config())

        assert response.success is False
        assert response.error_category == category
        assert orchestrator.run_history[-1]['status'] == RunStatus.ERROR

    @pytest.mark.asyncio
    async def test_unknown_kind(self, orchestrator):
        """Kinds without a runner are configuration errors"""
        config = ExperimentConfig.from_dict({'name': 'm', 'kind': 'margulis', 'profiles': ['rh3-a1']})
        response = await orchestrator.run_experiment(config)

        assert response.success is False
        assert response.error_category == "configuration"
        assert len(orchestrator.run_history) == 0

    @pytest.mark.asyncio
    async def test_run_suite_keeps_order(self, orchestrator):
        """Suite responses come back in configuration order"""
        configs = [tau_config(f"tau-{i}") for i in range(6)]
        responses = await orchestrator.run_suite(configs, max_concurrent=2)

        assert [r.report.name for r in responses] == [c.name for c in configs]
        assert orchestrator.get_system_status()['total_runs_processed'] == 6

    @pytest.mark.asyncio
    async def test_run_history_is_bounded(self, orchestrator):
        """Old runs fall out of the history while the total keeps counting"""
        count = RUN_HISTORY_LIMIT + 5
        await orchestrator.run_suite([tau_config(f"tau-{i}") for i in range(count)], max_concurrent=1)

        status = orchestrator.get_system_status()
        assert len(orchestrator.run_history) == RUN_HISTORY_LIMIT
        assert orchestrator.run_history[0]['name'] == "tau-5"
        assert status['total_runs_processed'] == count
        assert [r['name'] for r in status['recent_runs']] == [f"tau-{i}" for i in range(count - 10, count)]

    @pytest.mark.asyncio
    async def test_run_suite_maps_exceptions(self, orchestrator):
        """Exceptions escaping a runner become internal error responses"""
        orchestrator.runners[ExperimentKind.TAU].execute = AsyncMock(side_effect=RuntimeError("crashed"))
        responses = await orchestrator.run_suite([tau_config()])

        assert responses[0].success is False
        assert responses[0].error == "crashed"
        assert responses[0].error_category == "internal"

    def test_merge_reports(self):
        """The suite report holds the records of every successful response"""
        merged = ExperimentOrchestrator.merge_reports("suite", [ok("a"), failed("numerical"), ok("b", False)])

        assert merged.kind == "suite"
        assert [r.name for r in merged.records] == ["a: check", "b: check"]
        assert merged.provenance['experiments'] == ["a", "b"]
        assert merged.provenance['errors'] == ["numerical trouble"]
        assert merged.passed is False

    def test_get_system_status(self, orchestrator):
        """Status lists each registered kind"""
        status = orchestrator.get_system_status()

        assert status['active_runs'] == 0
        assert set(status['runner_status']) == {'tau', 'entropy'}
        assert status['runner_status']['tau']['runner'] == "stub"
        assert status['recent_runs'] == []


class TestExitCode:

    @pytest.mark.parametrize("responses,expected", [
        ([ok("a")], EXIT_PASSED),
        ([ok("a"), ok("b", False)], EXIT_CHECKS_FAILED),
        ([ok("a", False), failed("numerical")], EXIT_NUMERICAL_ERROR),
        ([failed("internal")], EXIT_NUMERICAL_ERROR),
        ([failed("numerical"), failed("configuration")], EXIT_CONFIGURATION_ERROR),
    ])
    def test_precedence(self, responses, expected):
        """Configuration errors outrank numerical errors, which outrank failed checks"""
        assert exit_code(responses) == expected


class TestLoadConfig:

    def test_loads_and_overrides_seed(self, tmp_path):
        """The seed argument replaces the file's seed"""
        path = tmp_path / "exp.json"
        path.write_text(json.dumps({'name': 'x', 'kind': 'tau', 'profiles': ['ch2'], 'seed': 3}))

        assert load_config(path).seed == 3
        assert load_config(path, seed=99).seed == 99

    def test_missing_file(self, tmp_path):
        """Missing files are configuration errors"""
        with pytest.raises(ConfigurationError, match="not found"):
            load_config(tmp_path / "nope.json")

    def test_malformed_json(self, tmp_path):
        """Malformed JSON is a configuration error naming the position"""
        path = tmp_path / "bad.json"
        path.write_text('{"name": "x",')
        with pytest.raises(ConfigurationError, match="invalid JSON"):
            load_config(path)

    def test_acceptance_configs_seed(self):
        """The seed override applies to every acceptance experiment"""
        configs = acceptance_configs(seed=123)
        assert configs
        assert all(c.seed == 123 for c in configs)


class TestDeterminism:

    @pytest.mark.asyncio
    async def test_acceptance_suite_reports_repeat(self, monkeypatch):
        """Two runs of the acceptance suite with one seed give identical reports"""
        monkeypatch.setattr(Config, "REPORT_TIMESTAMPS", False)

        async def run_once():
            responses = await ExperimentOrchestrator().run_suite(acceptance_configs(seed=11))
            return [json.dumps(r.report.to_dict(), sort_keys=True) if r.success else r.error for r in responses]

        first = await run_once()
        second = await run_once()
        assert first == second
