"""
Script to run a handful of experiment configurations through the orchestrator
"""

import asyncio
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from experiments.orchestrator import ExperimentOrchestrator, exit_code, load_config
from utils.report_writer import ReportWriter

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


async def main():
    """Run every configuration under configs/ as one suite"""
    print("🚀 Starting horolab suite demo")

    orchestrator = ExperimentOrchestrator()
    paths = sorted(CONFIG_DIR.glob("*.json"))
    configs = [load_config(path) for path in paths]
    print(f"Running {len(configs)} configurations from {CONFIG_DIR}...")

    responses = await orchestrator.run_suite(configs)

    writer = ReportWriter("output/demo")
    for config, response in zip(configs, responses):
        if not response.success:
            print(f"✗ {config.name}: {response.error_category} error: {response.error}")
            continue
        writer.write(response.report)
        summary = response.report.summary
        mark = "✓" if response.report.passed else "⚠"
        print(f"{mark} {config.name}: {summary['passed']}/{summary['total']} checks "
              f"in {response.execution_time:.2f}s")

    print("\n--- System Status ---")
    status = orchestrator.get_system_status()
    print(f"Total processed: {status['total_runs_processed']}")
    for kind, runner_status in status['runner_status'].items():
        print(f"{kind}: {runner_status['runs']} runs")

    return exit_code(responses)

if __name__ == "__main__":
    sys.exit(asyncio.run(main()))
