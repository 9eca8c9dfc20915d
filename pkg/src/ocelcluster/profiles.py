"""Object profiles (trace, raw attributes, graph features) and their encoding."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from .ocel import OCEL, all_traces, flatten
from .tracegraph import FEATURE_NAMES, CentralityFeatures, Weighting, build_trace_graph, centrality_features

__all__ = [
    "MISSING",
    "ObjectProfile",
    "FeatureTable",
    "build_profiles",
    "encode",
    "profiles_to_records",
    "profiles_from_records",
    "profiles_csv",
]

MISSING = "⊥missing"
TRACE_SEP = ";"


@dataclass(frozen=True)
class ObjectProfile:
    object_id: str
    trace: tuple[str, ...]
    categorical: dict[str, str] = field(default_factory=dict)
    numeric: dict[str, float] = field(default_factory=dict)
    graph_features: CentralityFeatures = field(default_factory=CentralityFeatures)


def build_profiles(log: OCEL, otype: str, weight: Weighting = "freq") -> list[ObjectProfile]:
    """One profile per ``otype`` object occurring in the flattened log, by object id.

    String and boolean attributes become categorical; a categorical attribute
    an object lacks is filled with :data:`MISSING`. Missing numeric
    attributes are left out here and imputed by :func:`encode`.
    """
    traces = all_traces(flatten(log, otype))
    cat_names: set[str] = set()
    for oid in traces:
        for name in log.objects[oid].ovmap:
            if log.attribute_types.get(name, "string") in ("string", "boolean"):
                cat_names.add(name)

    profiles = []
    for oid, trace in traces.items():
        ovmap = log.objects[oid].ovmap
        categorical = {name: str(ovmap[name]) if name in ovmap else MISSING for name in sorted(cat_names)}
        numeric = {
            name: float(value)
            for name, value in sorted(ovmap.items())
            if log.attribute_types.get(name, "string") in ("integer", "float")
        }
        features = centrality_features(build_trace_graph(trace), weight)
        profiles.append(ObjectProfile(oid, trace.activities, categorical, numeric, features))
    return profiles


@dataclass(frozen=True)
class FeatureTable:
    """Column-partitioned view of a list of profiles.

    ``numeric`` holds min-max scaled values in [0, 1]; ``raw`` the values
    before scaling, with missing entries mean-imputed and flagged in
    ``imputed``. ``col_min``/``col_max`` allow undoing the scaling.
    """

    object_ids: tuple[str, ...]
    traces: tuple[tuple[str, ...], ...]
    categorical_columns: tuple[str, ...]
    categorical: tuple[tuple[str, ...], ...]
    numeric_columns: tuple[str, ...]
    numeric: np.ndarray
    raw: np.ndarray
    col_min: np.ndarray
    col_max: np.ndarray
    imputed: np.ndarray

    def __len__(self) -> int:
        return len(self.object_ids)

    @property
    def n_columns(self) -> int:
        return 1 + len(self.categorical_columns) + len(self.numeric_columns)

    def decode(self) -> np.ndarray:
        return self.col_min + self.numeric * (self.col_max - self.col_min)

    def row(self, object_id: str) -> int:
        return self.object_ids.index(object_id)


def encode(profiles: Sequence[ObjectProfile]) -> FeatureTable:
    if not profiles:
        raise ValueError("cannot encode an empty profile list")
    cat_cols = tuple(sorted(set().union(*(p.categorical for p in profiles))))
    raw_cols = sorted(set().union(*(p.numeric for p in profiles)))
    clash = set(raw_cols) & set(FEATURE_NAMES) | set(raw_cols) & set(cat_cols)
    if clash:
        raise ValueError(f"attribute names collide with other feature columns: {sorted(clash)}")
    num_cols = tuple(raw_cols) + FEATURE_NAMES

    n, m = len(profiles), len(num_cols)
    raw = np.full((n, m), np.nan)
    for i, p in enumerate(profiles):
        values = {**p.numeric, **p.graph_features.as_dict()}
        for j, col in enumerate(num_cols):
            if col not in values:
                continue
            if not math.isfinite(values[col]):
                raise ValueError(f"non-finite value {values[col]!r} for object {p.object_id!r}, column {col!r}")
            raw[i, j] = values[col]
    imputed = np.isnan(raw)
    for j in np.flatnonzero(imputed.any(axis=0)):
        # every raw column has at least one present value by construction
        raw[imputed[:, j], j] = raw[~imputed[:, j], j].mean()
    col_min = raw.min(axis=0)
    col_max = raw.max(axis=0)
    span = col_max - col_min
    scaled = np.where(span > 0, (raw - col_min) / np.where(span > 0, span, 1.0), 0.0)

    return FeatureTable(
        object_ids=tuple(p.object_id for p in profiles),
        traces=tuple(tuple(p.trace) for p in profiles),
        categorical_columns=cat_cols,
        categorical=tuple(tuple(p.categorical.get(c, MISSING) for c in cat_cols) for p in profiles),
        numeric_columns=num_cols,
        numeric=scaled,
        raw=raw,
        col_min=col_min,
        col_max=col_max,
        imputed=imputed,
    )


def profiles_to_records(profiles: Sequence[ObjectProfile]) -> list[dict[str, Any]]:
    return [
        {
            "object_id": p.object_id,
            "trace": list(p.trace),
            "categorical": dict(p.categorical),
            "numeric": dict(p.numeric),
            "graph_features": p.graph_features.as_dict(),
        }
        for p in profiles
    ]


def profiles_from_records(records: Sequence[dict[str, Any]]) -> list[ObjectProfile]:
    return [
        ObjectProfile(
            r["object_id"],
            tuple(r["trace"]),
            dict(r.get("categorical", {})),
            {k: float(v) for k, v in r.get("numeric", {}).items()},
            CentralityFeatures(**r.get("graph_features", {})),
        )
        for r in records
    ]


def profiles_csv(profiles: Sequence[ObjectProfile], comment: str | None = None) -> str:
    """One row per object; the trace is the ``;``-joined activity list."""
    cat_cols = sorted(set().union(*(p.categorical for p in profiles))) if profiles else []
    num_cols = sorted(set().union(*(p.numeric for p in profiles))) if profiles else []
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["object_id", "trace", *cat_cols, *num_cols, *FEATURE_NAMES])
    for p in profiles:
        gf = p.graph_features.as_dict()
        writer.writerow(
            [
                p.object_id,
                TRACE_SEP.join(p.trace),
                *(p.categorical.get(c, MISSING) for c in cat_cols),
                *(repr(p.numeric[c]) if c in p.numeric else "" for c in num_cols),
                *(repr(gf[c]) for c in FEATURE_NAMES),
            ]
        )
    return buf.getvalue()
