"""Shipped reference experimental datasets and their comparison gates.

One CSV per reference table, kept strictly transcription-only: nothing in
``data/`` is ever computed, so a drift between computed theory and the
shipped theory column is always a code regression, never a data edit.

Each row carries a ``kind`` that sets its comparison gate. Directly
counted probabilities get the base experimental spread of 0.05; rows that
aggregate or propagate probabilities get proportionally wider gates (a
marginal sums two counted rows; a squared Wasserstein-2 gap is 4x a
marginal difference; a variance 4p(1-p) has slope at most 4; the
correlation divides by two variances).
"""

from __future__ import annotations

import csv
import importlib.resources
import os
from dataclasses import dataclass
from pathlib import Path

from .errors import UnknownDataset

DATA_ENV_VAR = "ROI_LAB_DATA"

BASE_SPREAD = 0.05
KIND_GATES = {
    "probability": BASE_SPREAD,
    "marginal": 2 * BASE_SPREAD,
    "variance": 4 * BASE_SPREAD,
    "distance_sq": 4 * BASE_SPREAD,
    "distance_sq_sum": 8 * BASE_SPREAD,
    "uncertainty_sum": 8 * BASE_SPREAD,
    "correlation": 2 * BASE_SPREAD,
}

DATASET_IDS = (
    "gamma-0",
    "gamma-pi8",
    "gamma-pi4",
    "variance-pi8",
    "retrieving",
    "no-retrieving",
    "blw-state-sum",
    "correlation-pi8",
)


@dataclass(frozen=True)
class ReferenceRow:
    label: str
    kind: str
    theory: float
    experimental: float

    @property
    def gate(self) -> float:
        return KIND_GATES[self.kind]


def data_dir(override: str | os.PathLike | None = None) -> Path:
    """Resolve the dataset directory.

    ROI_LAB_DATA, when set, wins over an explicit --data-dir/override;
    otherwise the override, then the packaged copies.
    """
    env = os.environ.get(DATA_ENV_VAR)
    if env:
        return Path(env)
    if override is not None:
        return Path(override)
    return Path(importlib.resources.files("roilab") / "data")


def load_dataset(dataset_id: str, directory: str | os.PathLike | None = None) -> list[ReferenceRow]:
    if dataset_id not in DATASET_IDS:
        raise UnknownDataset(f"{dataset_id!r}; shipped: {', '.join(DATASET_IDS)}")
    path = data_dir(directory) / f"{dataset_id}.csv"
    if not path.is_file():
        raise UnknownDataset(f"dataset file missing: {path}")
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(line for line in fh if not line.startswith("#"))
        for rec in reader:
            kind = rec["kind"]
            if kind not in KIND_GATES:
                raise UnknownDataset(f"{path}: unknown row kind {kind!r}")
            rows.append(
                ReferenceRow(rec["label"], kind, float(rec["theory"]), float(rec["experimental"]))
            )
    return rows
