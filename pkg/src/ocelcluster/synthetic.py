"""Synthetic logs and profile sets for tests and experiment scripts."""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from typing import Any, Sequence

import numpy as np

from .profiles import ObjectProfile
from .tracegraph import build_trace_graph, centrality_features

__all__ = ["random_ocel_doc", "blob_profiles", "b2b_ocel_doc"]

_EPOCH = datetime(2020, 4, 1, tzinfo=timezone(timedelta(hours=1)))


def _ts(minutes: float) -> str:
    return (_EPOCH + timedelta(minutes=float(minutes))).isoformat(sep=" ", timespec="milliseconds")


def random_ocel_doc(
    rng: np.random.Generator,
    max_events: int = 50,
    max_objects: int = 20,
    n_types: Sequence[int] = (2, 3),
    n_activities: int = 5,
    max_omap: int = 4,
) -> dict[str, Any]:
    """A small random JSON-OCEL document.

    Timestamps are drawn from a narrow range so ties are common, and event
    ids are shuffled relative to time so the input order is not the log order.
    """
    types = [f"t{i}" for i in range(int(rng.integers(n_types[0], n_types[-1] + 1)))]
    n_obj = int(rng.integers(len(types), max_objects + 1))
    otypes = [types[i % len(types)] for i in range(n_obj)]
    rng.shuffle(otypes)
    objects = {
        f"o{i}": {"ocel:type": t, "ocel:ovmap": {"size": float(rng.integers(0, 5)), "color": str(rng.choice(["r", "g"]))}}
        for i, t in enumerate(otypes)
    }
    n_ev = int(rng.integers(0, max_events + 1))
    ids = [f"e{i:02d}" for i in range(n_ev)]
    rng.shuffle(ids)
    events = {}
    for eid in ids:
        k = int(rng.integers(0, min(max_omap, n_obj) + 1))
        omap = sorted(rng.choice(list(objects), size=k, replace=False).tolist()) if k else []
        events[eid] = {
            "ocel:activity": f"act{int(rng.integers(n_activities))}",
            "ocel:timestamp": _ts(int(rng.integers(0, 30))),
            "ocel:omap": omap,
            "ocel:vmap": {},
        }
    return {"ocel:global-log": {"ocel:object-types": types}, "ocel:events": events, "ocel:objects": objects}


def blob_profiles(
    rng: np.random.Generator, centers: Sequence[Sequence[float]], per_blob: int = 10, spread: float = 0.05
) -> tuple[list[ObjectProfile], list[int]]:
    """Profiles whose only varying features are 2-D points around ``centers``.

    All profiles share one trace and categorical value, so the blob structure
    is the only signal. Returns the profiles and their true blob labels.
    """
    trace = ("a", "b", "c")
    features = centrality_features(build_trace_graph(trace))
    profiles, labels = [], []
    for b, (cx, cy) in enumerate(centers):
        for i in range(per_blob):
            x, y = rng.normal((cx, cy), spread)
            oid = f"p{b}_{i:02d}"
            profiles.append(ObjectProfile(oid, trace, {"kind": "x"}, {"x": float(x), "y": float(y)}, features))
            labels.append(b)
    order = sorted(range(len(profiles)), key=lambda i: profiles[i].object_id)
    return [profiles[i] for i in order], [labels[i] for i in order]


# treatment routes of the B2B-like generator: (name, activity path, share)
_ROUTES = (
    ("coating", ["loading", "degreasing", "golden layer", "surface securing", "drying", "unloading"], 0.4),
    ("oiling", ["loading", "oil removing", "rinsing", "drying", "unloading"], 0.3),
    ("small parts", ["hanging pieces", "dipping", "lubricate", "unhanging pieces"], 0.2),
    ("rework", ["inspection", "stripping", "loading", "polishing", "unloading"], 0.1),
)


def b2b_ocel_doc(seed: int = 0, n_orders: int = 40, max_batches: int = 4) -> dict[str, Any]:
    """A surface-treatment style log with customer, order and batch objects.

    Each order is created for a customer, split into batches that all follow
    one treatment route, then packed and shipped. Rework orders skip order
    creation. Routes differ in their activity sets, so batch clusters that
    separate routes yield visibly simpler per-cluster models.
    """
    rng = np.random.default_rng(seed)
    shares = np.array([r[2] for r in _ROUTES])
    objects: dict[str, Any] = {}
    events: dict[str, Any] = {}
    counter = 0

    def emit(activity: str, t: float, omap: list[str], **vmap: Any) -> None:
        nonlocal counter
        events[f"e{counter:05d}"] = {"ocel:activity": activity, "ocel:timestamp": _ts(t), "ocel:omap": omap, "ocel:vmap": vmap}
        counter += 1

    n_customers = max(1, n_orders // 4)
    for c in range(n_customers):
        objects[f"c{c}"] = {"ocel:type": "customer", "ocel:ovmap": {"region": str(rng.choice(["north", "south"]))}}
    for o in range(n_orders):
        route_idx = int(rng.choice(len(_ROUTES), p=shares / shares.sum()))
        route_name, path, _ = _ROUTES[route_idx]
        cust = f"c{int(rng.integers(n_customers))}"
        oid = f"o{o}"
        objects[oid] = {"ocel:type": "order", "ocel:ovmap": {"priority": str(rng.choice(["normal", "express"]))}}
        t = float(o * 600 + rng.integers(0, 60))
        price = round(float(rng.uniform(100, 400)), 2)
        if route_name != "rework":
            emit("order creation", t, [oid, cust], **{"net price": price})
            t += float(rng.integers(10, 120))
        batches = [f"b{o}_{j}" for j in range(int(rng.integers(1, max_batches + 1)))]
        for b in batches:
            objects[b] = {
                "ocel:type": "batch",
                "ocel:ovmap": {
                    "treatment": route_name,
                    "workplace": f"plant {1 + route_idx % 2}",
                    "weight": round(float(rng.normal(10 + 5 * route_idx, 1.0)), 2),
                },
            }
        emit("print of production order", t, [oid, cust, *batches])
        for b in batches:
            tb = t
            for act in path:
                tb += float(rng.integers(5, 90))
                emit(act, tb, [b])
        t += 100 * len(path) + float(rng.integers(0, 60))
        emit("packing", t, [oid, *batches])
        emit("last delivery ticket", t + float(rng.integers(10, 60)), [oid, cust])
    return {
        "ocel:global-log": {"ocel:object-types": ["batch", "customer", "order"]},
        "ocel:events": events,
        "ocel:objects": objects,
    }
