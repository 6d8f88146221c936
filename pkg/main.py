"""
Main application entry point for the horolab geometry laboratory
"""

import asyncio
import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from config.builtins import catalog
from config.settings import Config
from experiments.orchestrator import (
    EXIT_CONFIGURATION_ERROR, ExperimentOrchestrator, acceptance_configs, exit_code, load_config,
)
from models.data_models import ExperimentResponse, Report
from models.errors import ConfigurationError
from utils.logger import setup_logger
from utils.report_writer import ReportWriter


class HorolabApp:
    """Main application class for the geometry lab"""

    def __init__(self, orchestrator: Optional[ExperimentOrchestrator] = None):
        self.logger = setup_logger("HorolabApp")
        self.orchestrator = orchestrator or ExperimentOrchestrator()

    async def run(self, config_path: str, seed: Optional[int] = None, out: Optional[str] = None,
                  as_json: bool = False) -> int:
        """Run one configuration file and write its report; returns the exit status"""
        try:
            config = load_config(config_path, seed=seed)
        except ConfigurationError as e:
            print(f"❌ Configuration error: {str(e)}", file=sys.stderr)
            self.logger.error(f"Rejected {config_path}: {str(e)}")
            return EXIT_CONFIGURATION_ERROR

        if not as_json:
            print(f"🧪 Running {config.kind.value} experiment: {config.name}")
            print("-" * 50)

        response = await self.orchestrator.run_experiment(config)
        code = exit_code([response])
        if not response.success:
            print(f"❌ {response.error_category.capitalize()} error: {response.error}", file=sys.stderr)
            return code

        writer = ReportWriter(out or config.output_dir or Config.OUTPUT_DIR,
                              plots=config.plots or Config.PLOTS_ENABLED)
        paths = writer.write(response.report)
        if as_json:
            print(json.dumps(response.report.to_dict(), indent=2, sort_keys=True))
        else:
            self._display_report(response.report)
            print(f"💾 Report written to: {paths[0]}")
        return code

    async def verify_all(self, seed: Optional[int] = None, out: Optional[str] = None) -> int:
        """Run the acceptance suite and write every report plus a suite summary"""
        configs = acceptance_configs(seed=seed)
        print(f"📦 Running acceptance suite of {len(configs)} experiments")
        print("-" * 50)

        responses = await self.orchestrator.run_suite(configs)
        writer = ReportWriter(out or Config.OUTPUT_DIR, plots=Config.PLOTS_ENABLED)
        for response in responses:
            if response.success:
                writer.write(response.report)
        writer.write(ExperimentOrchestrator.merge_reports("acceptance-suite", responses))

        self._display_suite(configs, responses)
        return exit_code(responses)

    def list_builtins(self, as_json: bool = False):
        """Print built-in profiles, surfaces, boundary functions and experiments"""
        entries = catalog()
        if as_json:
            print(json.dumps(entries, indent=2))
            return

        icons = {'profiles': '📐', 'surfaces': '🌐', 'boundary_functions': '〰️ ', 'experiments': '🧪'}
        for section, items in entries.items():
            print(f"{icons[section]} {section.replace('_', ' ').capitalize()}:")
            for item in items:
                print(f"   {item['name']:<24} {item['description']}")
            print()

    def _display_report(self, report: Report):
        """Display check results in a formatted way"""
        summary = report.summary
        if report.passed:
            print("✅ All checks passed!")
        else:
            print(f"❌ {summary['failed']} of {summary['total']} checks failed")
            for record in report.records:
                if not record.passed:
                    print(f"   • {record.name}: computed {record.computed!r}, oracle {record.oracle!r}")
        print(f"📊 Checks passed: {summary['passed']}/{summary['total']}")
        if summary['worst_check'] is not None:
            print(f"📈 Worst residual: {summary['worst_residual']:.3e} ({summary['worst_check']})")
        print("-" * 50)

    def _display_suite(self, configs, responses: List[ExperimentResponse]):
        """Display suite results"""
        print("📊 Acceptance Suite Results")
        for config, response in zip(configs, responses):
            if not response.success:
                print(f"   ❌ {config.name}: {response.error_category} error: {response.error}")
                continue
            summary = response.report.summary
            mark = "✅" if response.report.passed else "❌"
            print(f"   {mark} {config.name}: {summary['passed']}/{summary['total']} "
                  f"({response.execution_time:.1f}s)")
        print("-" * 50)


def create_sample(path: str = "sample_experiment.json") -> Path:
    """Create a sample experiment configuration"""
    sample = {
        "name": "sample-tau",
        "kind": "tau",
        "profiles": [
            "rh3-a1",
            "ch2",
            {"name": "my-diagonal", "type": "synthetic", "n": 2, "entries": ["1", "4"], "a": 1.0, "b": 2.0},
        ],
        "tolerances": {"agreement": 1e-8, "oracle": 1e-8, "certificate_slack": 1e-10},
        "grid": {"r_min": 0.5, "r_max": 40.0, "count": 80},
        "seed": Config.DEFAULT_SEED,
        "output": {"dir": Config.OUTPUT_DIR, "plots": False},
    }
    target = Path(path)
    with target.open('w', encoding='utf-8') as f:
        json.dump(sample, f, indent=2)
        f.write("\n")
    print(f"📄 Created {target} with an example tau experiment")
    return target


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="horolab: asymptotically harmonic geometry laboratory")
    sub = parser.add_subparsers(dest='command', required=True)

    run = sub.add_parser('run', help='Run an experiment configuration file')
    run.add_argument('config', help='Path to a JSON experiment configuration')
    run.add_argument('--seed', type=int, help='Override the configuration seed')
    run.add_argument('--out', help='Output directory for reports')
    run.add_argument('--json', action='store_true', help='Print the report as JSON')

    builtins = sub.add_parser('list-builtins', help='List built-in profiles, surfaces and experiments')
    builtins.add_argument('--json', action='store_true', help='Machine-readable catalog')

    verify = sub.add_parser('verify-all', help='Run the full acceptance suite')
    verify.add_argument('--seed', type=int, help='Override every experiment seed')
    verify.add_argument('--out', help='Output directory for reports')

    sample = sub.add_parser('create-sample', help='Write a sample configuration file')
    sample.add_argument('path', nargs='?', default='sample_experiment.json')
    return parser


async def main(argv: Optional[List[str]] = None) -> int:
    """Main application entry point"""
    args = build_parser().parse_args(argv)

    if args.command == 'create-sample':
        create_sample(args.path)
        return 0

    app = HorolabApp()
    if args.command == 'list-builtins':
        app.list_builtins(as_json=args.json)
        return 0
    if args.command == 'run':
        return await app.run(args.config, seed=args.seed, out=args.out, as_json=args.json)
    return await app.verify_all(seed=args.seed, out=args.out)


if __name__ == "__main__":
    try:
        sys.exit(asyncio.run(main()))
    except KeyboardInterrupt:
        print("\n👋 Interrupted by user")
        sys.exit(130)
