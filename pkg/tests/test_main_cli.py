"""
Unit tests for the command-line entry point
"""

import json

import pytest
from unittest.mock import AsyncMock, Mock, patch

from experiments.base_experiment import BaseExperiment
from experiments.orchestrator import EXIT_NUMERICAL_ERROR, ExperimentOrchestrator
from main import HorolabApp, build_parser, create_sample, main
from models.data_models import CheckRecord, ExperimentConfig, ExperimentKind, ExperimentResponse, Report
from models.errors import RiccatiBlowUpError


def response_for(name: str, passed: bool) -> ExperimentResponse:
    report = Report(name=name, kind="tau")
    report.add(CheckRecord(name="rh3-a1: tau", computed=0.25, oracle=0.25, residual=0.0, bound=1e-8,
                           passed=passed))
    return ExperimentResponse(success=True, report=report, kind=ExperimentKind.TAU)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "exp.json"
    path.write_text(json.dumps({'name': 'cli-tau', 'kind': 'tau', 'profiles': ['rh3-a1']}))
    return path


def mock_orchestrator(response: ExperimentResponse) -> Mock:
    orchestrator = Mock()
    orchestrator.run_experiment = AsyncMock(return_value=response)
    return orchestrator


class BlowUpExperiment(BaseExperiment):
    """Tau runner whose Riccati integration blows up"""
    kinds = (ExperimentKind.TAU,)

    def __init__(self):
        super().__init__("blowup")

    def build_report(self, config: ExperimentConfig) -> Report:
        raise RiccatiBlowUpError("trace left the a-priori bound", 1.25)


class TestParser:

    def test_subcommands(self):
        """Every subcommand parses its options"""
        parser = build_parser()
        args = parser.parse_args(['run', 'exp.json', '--seed', '5', '--out', 'o', '--json'])
        assert (args.command, args.config, args.seed, args.out, args.json) == ('run', 'exp.json', 5, 'o', True)
        assert parser.parse_args(['verify-all']).seed is None
        assert parser.parse_args(['create-sample']).path == 'sample_experiment.json'

    def test_command_required(self):
        """A subcommand is mandatory"""
        with pytest.raises(SystemExit):
            build_parser().parse_args([])


class TestRun:

    @pytest.mark.asyncio
    async def test_malformed_config_exits_2(self, tmp_path, capsys):
        """Malformed JSON exits 2 and writes nothing"""
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        out = tmp_path / "out"

        assert await main(['run', str(bad), '--out', str(out)]) == 2
        assert not out.exists()
        assert "Configuration error" in capsys.readouterr().err

    @pytest.mark.asyncio
    async def test_invalid_config_exits_2(self, tmp_path):
        """Validation failures exit 2"""
        path = tmp_path / "exp.json"
        path.write_text(json.dumps({'name': 'x', 'kind': 'tau', 'grid': {'count': 1}}))
        assert await main(['run', str(path), '--out', str(tmp_path / "out")]) == 2

    @pytest.mark.asyncio
    async def test_passing_run(self, tmp_path, config_file):
        """All checks passing exits 0 and writes the report"""
        app = HorolabApp(orchestrator=mock_orchestrator(response_for("cli-tau", True)))
        code = await app.run(str(config_file), out=str(tmp_path / "out"))

        assert code == 0
        assert (tmp_path / "out" / "cli-tau.report.json").exists()

    @pytest.mark.asyncio
    async def test_failed_checks(self, tmp_path, config_file, capsys):
        """A failing check exits 1 and still writes the report"""
        app = HorolabApp(orchestrator=mock_orchestrator(response_for("cli-tau", False)))
        code = await app.run(str(config_file), out=str(tmp_path / "out"), as_json=True)

        assert code == 1
        printed = json.loads(capsys.readouterr().out)
        assert printed['summary']['failed'] == 1

    @pytest.mark.asyncio
    async def test_numerical_error(self, tmp_path, config_file):
        """Numerical failures exit 3 without a report"""
        response = ExperimentResponse(success=False, error="step size underflow", error_category="numerical")
        app = HorolabApp(orchestrator=mock_orchestrator(response))
        code = await app.run(str(config_file), out=str(tmp_path / "out"))

        assert code == 3
        assert not (tmp_path / "out").exists()

    @pytest.mark.asyncio
    async def test_riccati_blowup_exits_3(self, tmp_path, config_file, capsys):
        """A runner raising RiccatiBlowUpError goes through the real orchestrator to exit 3"""
        app = HorolabApp(orchestrator=ExperimentOrchestrator(runners=[BlowUpExperiment()]))
        code = await app.run(str(config_file), out=str(tmp_path / "out"))

        assert code == EXIT_NUMERICAL_ERROR
        assert not (tmp_path / "out").exists()
        assert "blow-up at t=1.25" in capsys.readouterr().err

    @pytest.mark.asyncio
    async def test_seed_override(self, tmp_path, config_file):
        """--seed reaches the orchestrator"""
        orchestrator = mock_orchestrator(response_for("cli-tau", True))
        with patch('main.ExperimentOrchestrator', return_value=orchestrator):
            await main(['run', str(config_file), '--seed', '42', '--out', str(tmp_path / "out")])

        config = orchestrator.run_experiment.call_args.args[0]
        assert config.seed == 42


class TestOtherCommands:

    @pytest.mark.asyncio
    async def test_list_builtins_json(self, capsys):
        """The catalog prints as JSON"""
        assert await main(['list-builtins', '--json']) == 0
        entries = json.loads(capsys.readouterr().out)
        assert 'ch2' in [p['name'] for p in entries['profiles']]

    @pytest.mark.asyncio
    async def test_create_sample(self, tmp_path):
        """The sample configuration is written and valid"""
        target = tmp_path / "sample.json"
        assert await main(['create-sample', str(target)]) == 0
        data = json.loads(target.read_text(encoding="utf-8"))
        assert data['kind'] == 'tau'

    def test_sample_runs_through_loader(self, tmp_path):
        """The sample passes configuration validation"""
        from experiments.orchestrator import load_config
        path = create_sample(str(tmp_path / "s.json"))
        assert load_config(path).name == "sample-tau"

    @pytest.mark.asyncio
    async def test_verify_all_writes_suite_report(self, tmp_path):
        """verify-all writes per-experiment reports and the merged suite report"""
        orchestrator = Mock()
        orchestrator.run_suite = AsyncMock(side_effect=lambda configs: [
            response_for(c.name, True) for c in configs
        ])
        app = HorolabApp(orchestrator=orchestrator)
        code = await app.verify_all(out=str(tmp_path))

        assert code == 0
        suite = json.loads((tmp_path / "acceptance-suite.report.json").read_text(encoding="utf-8"))
        assert suite["summary"]["total"] == len(suite["provenance"]["experiments"])
        assert len(list(tmp_path.glob("*.report.json"))) == len(suite["provenance"]["experiments"]) + 1
