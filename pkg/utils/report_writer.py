"""
Report output: JSON report, RFC-4180 CSV tables and optional SVG plots
"""

import csv
import json
import math
from pathlib import Path
from typing import Any, List, Optional

from models.data_models import Report, Table
from utils.logger import setup_logger


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ""
    return value


class ReportWriter:
    """Writes `<name>.report.json`, `<name>.<table>.csv` and `<name>.<table>.svg` into one directory"""

    def __init__(self, output_dir: str, plots: bool = False):
        self.output_dir = Path(output_dir)
        self.plots = plots
        self.logger = setup_logger("ReportWriter")

    def write(self, report: Report) -> List[Path]:
        """Write every artifact of the report, returning the paths in write order"""
        self.output_dir.mkdir(parents=True, exist_ok=True)
        paths = [self.write_json(report)]
        for table in report.tables:
            paths.append(self.write_csv(report.name, table))
            if self.plots:
                svg = self.write_plot(report.name, table)
                if svg is not None:
                    paths.append(svg)
        self.logger.info(f"Wrote {len(paths)} files for report '{report.name}' to {self.output_dir}")
        return paths

    def write_json(self, report: Report) -> Path:
        path = self.output_dir / f"{report.name}.report.json"
        payload = report.to_dict()
        payload['tables'] = [f"{report.name}.{t.name}.csv" for t in report.tables]
        with path.open('w', encoding='utf-8') as f:
            # allow_nan=False: non-finite values were already mapped to null
            json.dump(payload, f, indent=2, sort_keys=True, allow_nan=False)
            f.write("\n")
        return path

    def write_csv(self, report_name: str, table: Table) -> Path:
        path = self.output_dir / f"{report_name}.{table.name}.csv"
        with path.open('w', encoding='utf-8', newline='') as f:
            writer = csv.writer(f, lineterminator="\r\n")
            writer.writerow(table.columns)
            for row in table.rows:
                writer.writerow([_cell(v) for v in row])
        return path

    def write_plot(self, report_name: str, table: Table) -> Optional[Path]:
        """Numeric columns against the first column, log scale when every value is positive"""
        numeric = [i for i in range(1, len(table.columns))
                   if table.rows and all(isinstance(row[i], (int, float)) for row in table.rows)]
        if not numeric:
            return None

        import matplotlib
        matplotlib.use("Agg")
        # fixed ids and no date keep the SVG identical across reruns
        matplotlib.rcParams.update({'svg.hashsalt': 'horolab', 'font.family': 'DejaVu Sans',
                                    'axes.unicode_minus': False})
        import matplotlib.pyplot as plt

        xs = [row[0] for row in table.rows]
        fig, ax = plt.subplots(figsize=(7, 4), constrained_layout=True)
        positive = True
        for i in numeric:
            ys = [abs(float(row[i])) for row in table.rows]
            positive = positive and all(y > 0 for y in ys)
            ax.plot(xs, ys, marker=".", label=table.columns[i])
        if positive:
            ax.set_yscale('log')
        ax.set_xlabel(table.columns[0])
        ax.set_title(f"{report_name}: {table.name}")
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best", fontsize=8)

        path = self.output_dir / f"{report_name}.{table.name}.svg"
        fig.savefig(path, format='svg', metadata={'Date': None})
        plt.close(fig)
        return path
