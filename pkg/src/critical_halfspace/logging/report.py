from __future__ import annotations

import json
from datetime import datetime
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np

if TYPE_CHECKING:
    from critical_halfspace.config.loader import RunConfig
    from critical_halfspace.experiments.base import ExperimentReport


def _package_version() -> str:
    try:
        return version("critical-halfspace")
    except PackageNotFoundError:
        return "unknown"


def jsonable(value: Any) -> Any:
    """Plain JSON types for numpy scalars, arrays and tuples."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


class ReportWriter:
    """Writes ``<output_dir>/<subcommand>/`` with report.json, metadata.json and CSV dumps.

    report.json depends only on the configuration; the timestamp lives in metadata.json.
    """

    def __init__(self, config: RunConfig) -> None:
        self.config = config
        self.run_dir = Path(config.output_dir) / config.subcommand
        self.run_dir.mkdir(parents=True, exist_ok=True)

    def write(self, report: ExperimentReport) -> Path:
        payload = {
            "subcommand": self.config.subcommand,
            "config": self.config.model_dump(mode="json"),
            "metrics": jsonable(report.metrics),
            "pass": report.passed,
            "failures": list(report.failures),
        }
        path = self.run_dir / "report.json"
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

        metadata = {
            "timestamp": datetime.now().isoformat(timespec="seconds"),
            "version": _package_version(),
        }
        (self.run_dir / "metadata.json").write_text(json.dumps(metadata, indent=2) + "\n")

        if self.config.dump_csv:
            for name, (header, rows) in report.tables.items():
                self.write_csv(name, header, rows)
        return path

    def write_csv(self, name: str, header: list[str], rows: np.ndarray) -> Path:
        path = self.run_dir / f"{name}.csv"
        np.savetxt(path, np.asarray(rows, dtype=float), fmt="%.17g", delimiter=",",
                   header=",".join(header), comments="")
        return path


def point_table(points: np.ndarray, values: np.ndarray) -> tuple[list[str], np.ndarray]:
    n = points.shape[-1]
    header = [f"x{k + 1}" for k in range(n)] + ["value"]
    return header, np.column_stack([points, values])


def grid_table(r: np.ndarray, z: np.ndarray, values: np.ndarray) -> tuple[list[str], np.ndarray]:
    return ["r", "z", "value"], np.column_stack([r.ravel(), z.ravel(), values.ravel()])
