"""Metric bundles and tabular emission (CSV + JSON)."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path


@dataclass
class MetricsReport:
    acc1: float
    acc5: float
    delta_eval: float
    delta_indep: float
    fid: float
    precision: float
    recall: float
    density: float
    coverage: float

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not math.isfinite(v):
                raise ValueError(f"metric {f.name} is non-finite: {v}")
        if self.acc1 > self.acc5 + 1e-12:
            raise ValueError(f"acc1 {self.acc1} exceeds acc5 {self.acc5}")
        if self.fid < -1e-6:
            raise ValueError(f"negative fid {self.fid}")
        for name in ("acc1", "acc5", "precision", "recall", "coverage"):
            v = getattr(self, name)
            if not -1e-12 <= v <= 1.0 + 1e-12:
                raise ValueError(f"metric {name} out of [0,1]: {v}")

    def as_dict(self) -> dict:
        return asdict(self)


METRIC_COLUMNS = [f.name for f in fields(MetricsReport)]


def write_report_csv(path, rows: list) -> None:
    """Write rows of {method, sigma, seed, **metrics} with stable columns."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    columns = ["method", "sigma", "seed"] + METRIC_COLUMNS
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def write_report_json(path, document: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(document, indent=2, sort_keys=True))


def read_report_csv(path) -> list:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))
