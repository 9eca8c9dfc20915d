"""Mixed-type dissimilarity between object profiles."""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .profiles import FeatureTable, ObjectProfile

__all__ = [
    "DistanceWeights",
    "DistanceMatrix",
    "levenshtein",
    "euclidean",
    "string_boolean",
    "profile_distance",
    "row_distance",
    "distance_matrix",
]


@dataclass(frozen=True)
class DistanceWeights:
    trace: float = 1.0
    numeric: float = 1.0
    categorical: float = 1.0

    def __post_init__(self):
        ws = (self.trace, self.numeric, self.categorical)
        if any(not math.isfinite(w) or w < 0 for w in ws):
            raise ValueError(f"distance weights must be finite and non-negative, got {ws}")
        if sum(ws) == 0:
            raise ValueError("at least one distance weight must be positive")

    @classmethod
    def parse(cls, text: str) -> "DistanceWeights":
        """Parse ``"trace,num,cat"``."""
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated weights, got {text!r}")
        return cls(*(float(p) for p in parts))


def levenshtein(s: Sequence[Hashable], t: Sequence[Hashable]) -> int:
    """Edit distance over activity sequences (unit-cost insert, delete, substitute)."""
    if len(s) < len(t):
        s, t = t, s
    prev = list(range(len(t) + 1))
    for i, a in enumerate(s, 1):
        cur = [i]
        for j, b in enumerate(t, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a != b)))
        prev = cur
    return prev[-1]


def euclidean(x: Sequence[float], y: Sequence[float]) -> float:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"vector length mismatch: {x.shape} vs {y.shape}")
    return float(np.sqrt(np.sum((x - y) ** 2)))


def string_boolean(a: str, b: str) -> int:
    return 0 if a == b else 1


def row_distance(table: FeatureTable, i: int, j: int, w: DistanceWeights = DistanceWeights()) -> float:
    """Weighted mix of the three component distances for rows ``i`` and ``j``, in [0, 1].

    Trace distance is Levenshtein over the longer trace length, numeric
    distance is Euclidean over the scaled columns divided by sqrt(dim), and
    categorical distance is the mean string-boolean mismatch.
    """
    s, t = table.traces[i], table.traces[j]
    d_trace = levenshtein(s, t) / max(len(s), len(t), 1)
    dim = table.numeric.shape[1]
    d_num = euclidean(table.numeric[i], table.numeric[j]) / math.sqrt(dim) if dim else 0.0
    cats = list(zip(table.categorical[i], table.categorical[j]))
    d_cat = sum(string_boolean(a, b) for a, b in cats) / len(cats) if cats else 0.0
    total = w.trace + w.numeric + w.categorical
    return (w.trace * d_trace + w.numeric * d_num + w.categorical * d_cat) / total


def profile_distance(p: ObjectProfile, q: ObjectProfile, w: DistanceWeights, table: FeatureTable) -> float:
    """Distance between two profiles that are rows of ``table``."""
    rows = []
    for prof in (p, q):
        if prof.object_id not in table.object_ids:
            raise ValueError(f"profile {prof.object_id!r} is not a row of the feature table")
        if set(prof.categorical) != set(table.categorical_columns) or not set(prof.numeric) <= set(
            table.numeric_columns
        ):
            raise ValueError(f"profile {prof.object_id!r} does not match the feature table schema")
        rows.append(table.row(prof.object_id))
    return row_distance(table, rows[0], rows[1], w)


@dataclass(frozen=True)
class DistanceMatrix:
    ids: tuple[str, ...]
    values: np.ndarray

    @property
    def n(self) -> int:
        return len(self.ids)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["", *self.ids])
        for oid, row in zip(self.ids, self.values):
            writer.writerow([oid, *(repr(float(v)) for v in row)])
        return buf.getvalue()


def distance_matrix(table: FeatureTable, w: DistanceWeights = DistanceWeights(), workers: int = 1) -> DistanceMatrix:
    """Pairwise :func:`row_distance` over all rows.

    Rows are independent, so ``workers > 1`` evaluates them on a thread pool;
    every cell is computed by the same scalar routine, so the result does not
    depend on scheduling.
    """
    n = len(table)
    if n < 2:
        raise ValueError(f"need at least 2 profiles for a distance matrix, got {n}")
    values = np.zeros((n, n))

    def fill_row(i: int) -> None:
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = row_distance(table, i, j, w)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(fill_row, range(n)))
    else:
        for i in range(n):
            fill_row(i)
    return DistanceMatrix(table.object_ids, values)
