#!/usr/bin/python3

import csv
import json
import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import psutil

from boostrec._config import __version__
from boostrec.bench.metrics import PrcPoint
from boostrec.pipeline import STAGES

RESULTS_NAME = "results.csv"
STAGES_NAME = "stages.csv"
PARETO_NAME = "pareto.csv"
JSON_NAME = "report.json"

RESULT_COLUMNS = (
    "detector",
    "descriptor",
    "keypoints_lp",
    "keypoints_boost",
    "keypoints_pct",
    "time_lp",
    "time_boost",
    "time_pct",
    "auc_lp",
    "auc_boost",
    "auc_pct",
)


@dataclass(eq=False)
class ComboResult:

    """Averages over all scenes for one (detector, descriptor, pipeline) combination."""

    detector: str
    descriptor: str
    pipeline: str
    scenes: int
    keypoints: float
    points: float
    times: Dict[str, float]
    prc: List[PrcPoint]
    auc: float

    @property
    def total_time(self) -> float:
        return sum(self.times.values())

    def shares(self) -> Dict[str, float]:
        """Fraction of the total time spent in each stage."""
        total = self.total_time
        return {k: (v / total if total else 0.0) for k, v in self.times.items()}

    def as_dict(self) -> Dict[str, Any]:
        return {
            "detector": self.detector,
            "descriptor": self.descriptor,
            "pipeline": self.pipeline,
            "scenes": self.scenes,
            "keypoints": self.keypoints,
            "points": self.points,
            "times": dict(self.times),
            "total_time": self.total_time,
            "shares": self.shares(),
            "prc": [point._asdict() for point in self.prc],
            "auc": self.auc,
        }


def host_info() -> Dict[str, Any]:
    memory = psutil.virtual_memory()
    return {
        "platform": platform.platform(),
        "python": platform.python_version(),
        "cpu_logical": psutil.cpu_count(logical=True),
        "cpu_physical": psutil.cpu_count(logical=False),
        "memory_gb": round(memory.total / 2**30, 2),
    }


@dataclass(eq=False)
class EvalReport:

    """Benchmark results of every combination plus the run's context."""

    results: List[ComboResult] = field(default_factory=list)
    epsilon: float = 0.01
    iou_min: float = 0.25
    host: Dict[str, Any] = field(default_factory=host_info)

    def __len__(self) -> int:
        return len(self.results)

    def get(self, detector: str, descriptor: str, pipeline: str) -> Optional[ComboResult]:
        for result in self.results:
            if (result.detector, result.descriptor, result.pipeline) == (
                detector,
                descriptor,
                pipeline,
            ):
                return result
        return None

    def pairs(self) -> List[Tuple[str, str]]:
        """(detector, descriptor) combinations in the order they were run."""
        seen: List[Tuple[str, str]] = []
        for result in self.results:
            if (result.detector, result.descriptor) not in seen:
                seen.append((result.detector, result.descriptor))
        return seen

    def comparison_rows(self) -> List[Dict[str, Any]]:
        """
        One row per (detector, descriptor) comparing the LP and Boost pipelines,
        followed by an Average row of the percentage columns for each descriptor.
        Percentages are the relative change of Boost over LP.
        """
        rows = []
        for detector, descriptor in self.pairs():
            lp = self.get(detector, descriptor, "LP")
            boost = self.get(detector, descriptor, "Boost")
            row: Dict[str, Any] = {"detector": detector, "descriptor": descriptor}
            for name, getter in (
                ("keypoints", lambda r: r.keypoints),
                ("time", lambda r: r.total_time),
                ("auc", lambda r: r.auc),
            ):
                first = getter(lp) if lp else None
                second = getter(boost) if boost else None
                row[f"{name}_lp"] = first
                row[f"{name}_boost"] = second
                row[f"{name}_pct"] = percent_change(first, second)
            rows.append(row)

        for descriptor in dict.fromkeys(d for _, d in self.pairs()):
            average: Dict[str, Any] = {"detector": "Average", "descriptor": descriptor}
            for name in ("keypoints", "time", "auc"):
                values = [
                    r[f"{name}_pct"]
                    for r in rows
                    if r["descriptor"] == descriptor and r[f"{name}_pct"] is not None
                ]
                average[f"{name}_pct"] = sum(values) / len(values) if values else None
            rows.append(average)
        return rows

    def as_dict(self) -> Dict[str, Any]:
        return {
            "version": __version__,
            "epsilon": self.epsilon,
            "iou_min": self.iou_min,
            "host": self.host,
            "results": [result.as_dict() for result in self.results],
            "comparison": self.comparison_rows(),
        }


def percent_change(before: Optional[float], after: Optional[float]) -> Optional[float]:
    if before is None or after is None or before == 0:
        return None
    return 100.0 * (after - before) / before


def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return value


def _write_csv(path: Path, header: Any, rows: List[Dict[str, Any]]) -> Path:
    with path.open("w", newline="") as fp:
        writer = csv.DictWriter(fp, fieldnames=list(header), extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row.get(k)) for k in header})
    return path


def write_report(report: EvalReport, folder: Union[str, Path]) -> Dict[str, Path]:
    """
    Writes the report files into ``folder``: the LP/Boost comparison table, the
    per-stage timings and shares, the time/AUC pairs for pareto plots and the
    full JSON document. Returns the written paths keyed by kind.
    """
    folder = Path(folder)
    folder.mkdir(parents=True, exist_ok=True)

    stage_header = ["detector", "descriptor", "pipeline", "keypoints", "points"]
    stage_header += list(STAGES) + ["total"] + [f"share_{i}" for i in STAGES]
    stage_rows = []
    pareto_rows = []
    for result in report.results:
        row: Dict[str, Any] = {
            "detector": result.detector,
            "descriptor": result.descriptor,
            "pipeline": result.pipeline,
            "keypoints": result.keypoints,
            "points": result.points,
            "total": result.total_time,
        }
        row.update(result.times)
        row.update({f"share_{k}": v for k, v in result.shares().items()})
        stage_rows.append(row)
        pareto_rows.append(
            {
                "detector": result.detector,
                "descriptor": result.descriptor,
                "pipeline": result.pipeline,
                "time": result.total_time,
                "auc": result.auc,
            }
        )

    paths = {
        "results": _write_csv(
            folder.joinpath(RESULTS_NAME), RESULT_COLUMNS, report.comparison_rows()
        ),
        "stages": _write_csv(folder.joinpath(STAGES_NAME), stage_header, stage_rows),
        "pareto": _write_csv(
            folder.joinpath(PARETO_NAME),
            ("detector", "descriptor", "pipeline", "time", "auc"),
            pareto_rows,
        ),
    }
    json_path = folder.joinpath(JSON_NAME)
    json_path.write_text(json.dumps(report.as_dict(), indent=2, default=float))
    paths["json"] = json_path
    return paths
