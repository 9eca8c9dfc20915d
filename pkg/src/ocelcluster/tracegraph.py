"""Weighted directed graph of a trace and its centrality aggregates."""

from __future__ import annotations

import heapq
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

from .ocel import Trace

__all__ = [
    "TraceGraph",
    "CentralityFeatures",
    "CENTRALITIES",
    "FEATURE_NAMES",
    "build_trace_graph",
    "shortest_path_cost",
    "shortest_path_costs",
    "node_centralities",
    "centrality_features",
]

CENTRALITIES = ("in_degree", "out_degree", "closeness", "harmonic")
AGGREGATES = ("mean", "var", "std")
FEATURE_NAMES = tuple(f"{c}_{a}" for c in CENTRALITIES for a in AGGREGATES)

Weighting = Literal["freq", "hops"]


@dataclass(frozen=True)
class TraceGraph:
    nodes: tuple[str, ...]
    freq: dict[tuple[str, str], int]

    @property
    def edges(self) -> frozenset[tuple[str, str]]:
        return frozenset(self.freq)


def build_trace_graph(trace: Trace | Sequence[str]) -> TraceGraph:
    """Nodes are the distinct activities; edges the distinct adjacent pairs.

    Adjacent repeats (``a, a``) are dropped since edges join distinct
    vertices. Edge weight is the number of times the pair occurs.
    """
    acts = trace.activities if isinstance(trace, Trace) else tuple(trace)
    nodes = tuple(dict.fromkeys(acts))
    freq = Counter((x, y) for x, y in zip(acts, acts[1:]) if x != y)
    return TraceGraph(nodes, dict(sorted(freq.items())))


def _weights(g: TraceGraph, weight: Weighting) -> dict[str, list[tuple[str, int]]]:
    adj: dict[str, list[tuple[str, int]]] = {v: [] for v in g.nodes}
    for (x, y), w in g.freq.items():
        adj[x].append((y, w if weight == "freq" else 1))
    return adj


def _dijkstra(adj: dict[str, list[tuple[str, float]]], source: str) -> dict[str, float]:
    dist = {source: 0}
    heap = [(0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if d > dist[v]:
            continue
        for y, w in adj[v]:
            nd = d + w
            if nd < dist.get(y, math.inf):
                dist[y] = nd
                heapq.heappush(heap, (nd, y))
    return dist


def shortest_path_costs(g: TraceGraph, source: str, weight: Weighting = "freq") -> dict[str, float]:
    """Costs from ``source`` to every reachable node (including itself at 0)."""
    if source not in g.nodes:
        raise KeyError(f"node {source!r} not in graph")
    return _dijkstra(_weights(g, weight), source)


def shortest_path_cost(g: TraceGraph, source: str, target: str, weight: Weighting = "freq") -> float:
    """Minimal summed edge weight from ``source`` to ``target``; ``math.inf`` if unreachable."""
    if target not in g.nodes:
        raise KeyError(f"node {target!r} not in graph")
    return shortest_path_costs(g, source, weight).get(target, math.inf)


def node_centralities(g: TraceGraph, weight: Weighting = "freq") -> dict[str, list[float]]:
    """Per-node centrality vectors, in ``g.nodes`` order.

    Unreachable targets are skipped: they add nothing to harmonic centrality
    and are left out of the closeness sum. A node reaching no other node has
    closeness 0.
    """
    n = len(g.nodes)
    in_deg = Counter(y for _, y in g.freq)
    out_deg = Counter(x for x, _ in g.freq)
    adj = _weights(g, weight)
    closeness, harmonic = [], []
    for v in g.nodes:
        dist = _dijkstra(adj, v)
        others = [d for y, d in dist.items() if y != v]
        total = sum(others)
        closeness.append((n - 1) / total if total > 0 else 0.0)
        harmonic.append(sum((n - 1) / d for d in others))
    return {
        "in_degree": [float(in_deg[v]) for v in g.nodes],
        "out_degree": [float(out_deg[v]) for v in g.nodes],
        "closeness": closeness,
        "harmonic": harmonic,
    }


def _aggregate(values: Iterable[float]) -> tuple[float, float, float]:
    vals = list(values)
    if not vals:
        return 0.0, 0.0, 0.0
    mean = sum(vals) / len(vals)
    var = sum((x - mean) ** 2 for x in vals) / len(vals)
    return mean, var, math.sqrt(var)


@dataclass(frozen=True)
class CentralityFeatures:
    """Mean, population variance and std of each centrality vector."""

    in_degree_mean: float = 0.0
    in_degree_var: float = 0.0
    in_degree_std: float = 0.0
    out_degree_mean: float = 0.0
    out_degree_var: float = 0.0
    out_degree_std: float = 0.0
    closeness_mean: float = 0.0
    closeness_var: float = 0.0
    closeness_std: float = 0.0
    harmonic_mean: float = 0.0
    harmonic_var: float = 0.0
    harmonic_std: float = 0.0

    def as_dict(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in FEATURE_NAMES}


def centrality_features(g: TraceGraph, weight: Weighting = "freq") -> CentralityFeatures:
    vectors = node_centralities(g, weight)
    values = {}
    for name in CENTRALITIES:
        for agg, x in zip(AGGREGATES, _aggregate(vectors[name])):
            values[f"{name}_{agg}"] = x
    return CentralityFeatures(**values)
