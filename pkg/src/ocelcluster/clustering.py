"""Partitioning objects: K-means, agglomerative, k-medoids, and k selection."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any, Callable, Literal, Sequence

import numpy as np

from .distance import DistanceMatrix, DistanceWeights, distance_matrix
from .profiles import FeatureTable

__all__ = [
    "ClusteringError",
    "Clustering",
    "Merge",
    "SweepEntry",
    "vectorize",
    "lloyd",
    "kmeans",
    "merge_sequence",
    "cut_merges",
    "agglomerative",
    "kmedoids",
    "ch_score",
    "calinski_harabasz",
    "sweep_k",
]

Algorithm = Literal["kmeans", "agglomerative", "kmedoids"]
Linkage = Literal["average", "single", "complete"]
MAX_ITER = 300


class ClusteringError(ValueError):
    pass


@dataclass(frozen=True)
class Merge:
    """One dendrogram step: clusters keyed by their smallest row index."""

    left: int
    right: int
    distance: float
    size: int


@dataclass(frozen=True)
class Clustering:
    otype: str
    clusters: tuple[tuple[str, ...], ...]
    method: str
    k: int
    seed: int | None = None
    linkage: str | None = None
    merges: tuple[Merge, ...] = ()
    wcss_history: tuple[float, ...] = ()

    @property
    def assignment(self) -> dict[str, int]:
        return {oid: c for c, members in enumerate(self.clusters) for oid in members}

    def labels(self, ids: Sequence[str]) -> np.ndarray:
        assign = self.assignment
        return np.array([assign[oid] for oid in ids])

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "otype": self.otype,
            "method": self.method,
            "k": self.k,
            "seed": self.seed,
            "clusters": [list(c) for c in self.clusters],
        }
        if self.linkage is not None:
            out["linkage"] = self.linkage
        if self.merges:
            out["merges"] = [[m.left, m.right, m.distance, m.size] for m in self.merges]
        return out

    @classmethod
    def from_json(cls, doc: dict[str, Any]) -> "Clustering":
        return cls(
            otype=doc["otype"],
            clusters=tuple(tuple(c) for c in doc["clusters"]),
            method=doc["method"],
            k=int(doc["k"]),
            seed=doc.get("seed"),
            linkage=doc.get("linkage"),
            merges=tuple(Merge(int(a), int(b), float(d), int(s)) for a, b, d, s in doc.get("merges", ())),
        )

    def check(self, ids: Sequence[str] | None = None) -> None:
        seen: set[str] = set()
        for members in self.clusters:
            if not members:
                raise ClusteringError("empty cluster")
            if seen & set(members):
                raise ClusteringError(f"clusters overlap on {sorted(seen & set(members))}")
            seen.update(members)
        if ids is not None and seen != set(ids):
            raise ClusteringError("clusters do not cover the clustered objects exactly")


def _from_labels(ids: Sequence[str], labels: np.ndarray, **meta) -> Clustering:
    # clusters ordered by their first member in row order
    order: dict[int, list[str]] = {}
    for oid, lab in zip(ids, labels):
        order.setdefault(int(lab), []).append(oid)
    clusters = tuple(tuple(sorted(m)) for m in order.values())
    return Clustering(clusters=clusters, k=len(clusters), **meta)


def vectorize(table: FeatureTable) -> np.ndarray:
    """Numeric embedding of a feature table for centroid-based methods.

    Trace: relative frequency of each activity in the log alphabet.
    Categorical: one-hot. Numeric: the min-max scaled columns.
    """
    alphabet = sorted(set().union(*table.traces)) if table.traces else []
    pos = {a: i for i, a in enumerate(alphabet)}
    trace_part = np.zeros((len(table), len(alphabet)))
    for r, trace in enumerate(table.traces):
        for a in trace:
            trace_part[r, pos[a]] += 1.0 / len(trace)
    onehot = []
    for c in range(len(table.categorical_columns)):
        values = sorted({row[c] for row in table.categorical})
        col = np.array([[row[c] == v for v in values] for row in table.categorical], dtype=float)
        onehot.append(col)
    return np.hstack([trace_part, *onehot, table.numeric]) if len(table) else np.zeros((0, 0))


def _farthest_first(dist_to: Callable[[int], np.ndarray], n: int, k: int, first: int) -> list[int]:
    chosen = [first]
    nearest = dist_to(first).astype(float)
    while len(chosen) < k:
        masked = nearest.copy()
        masked[chosen] = -np.inf
        nxt = int(np.argmax(masked))
        chosen.append(nxt)
        nearest = np.minimum(nearest, dist_to(nxt))
    return chosen


def _wcss(X: np.ndarray, labels: np.ndarray, centers: np.ndarray) -> float:
    return float(((X - centers[labels]) ** 2).sum())


def lloyd(
    X: np.ndarray, k: int, seed: int = 0, max_iter: int = MAX_ITER, first: int | None = None
) -> tuple[np.ndarray, np.ndarray, list[float]]:
    """Lloyd iterations with farthest-point seeding.

    The first center is drawn from ``np.random.default_rng(seed)`` unless
    ``first`` is given. Returns labels, centers and the WCSS after every
    iteration.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if n == 0:
        raise ClusteringError("cannot cluster an empty table")
    if not 1 <= k <= n:
        raise ClusteringError(f"k must be in [1, {n}], got {k}")
    if first is None:
        first = int(np.random.default_rng(seed).integers(n))
    seeds = _farthest_first(lambda i: ((X - X[i]) ** 2).sum(axis=1), n, k, first)
    centers = X[seeds].copy()
    labels = None
    history: list[float] = []
    for _ in range(max_iter):
        d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new = d2.argmin(axis=1)
        counts = np.bincount(new, minlength=k)
        for c in np.flatnonzero(counts == 0):
            # reseed with the farthest point that is not alone in its cluster
            own = d2[np.arange(n), new]
            own[counts[new] <= 1] = -np.inf
            i = int(np.argmax(own))
            counts[new[i]] -= 1
            new[i] = c
            counts[c] = 1
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        centers = np.array([X[labels == c].mean(axis=0) for c in range(k)])
        history.append(_wcss(X, labels, centers))
    return labels, centers, history


def kmeans(table: FeatureTable, k: int, seed: int = 0, otype: str = "") -> Clustering:
    if len(table) == 0:
        raise ClusteringError("cannot cluster an empty table")
    if k > len(table):
        raise ClusteringError(f"k={k} exceeds the number of objects ({len(table)})")
    labels, _, history = lloyd(vectorize(table), k, seed)
    clustering = _from_labels(table.object_ids, labels, otype=otype, method="kmeans", seed=seed)
    return replace(clustering, wcss_history=tuple(history))


def merge_sequence(matrix: DistanceMatrix, linkage: Linkage = "average") -> list[Merge]:
    """Full agglomerative merge sequence (n - 1 merges).

    At each step the closest pair of clusters merges; ties go to the pair
    with the smallest (left id, right id), where a cluster's id is its
    smallest row index.
    """
    if linkage not in ("average", "single", "complete"):
        raise ClusteringError(f"unknown linkage {linkage!r}")
    n = matrix.n
    D = np.array(matrix.values, dtype=float)
    np.fill_diagonal(D, np.inf)
    size = np.ones(n)
    merges = []
    for _ in range(n - 1):
        flat = int(np.argmin(D))
        i, j = divmod(flat, n)
        i, j = min(i, j), max(i, j)
        dist = float(D[i, j])
        if linkage == "average":
            row = (size[i] * D[i] + size[j] * D[j]) / (size[i] + size[j])
        elif linkage == "single":
            row = np.minimum(D[i], D[j])
        else:
            row = np.maximum(D[i], D[j])
        D[i, :] = row
        D[:, i] = row
        D[j, :] = np.inf
        D[:, j] = np.inf
        D[i, i] = np.inf
        size[i] += size[j]
        merges.append(Merge(i, j, dist, int(size[i])))
    return merges


def cut_merges(n: int, merges: Sequence[Merge], k: int) -> np.ndarray:
    """Labels (by cluster id) after applying the first ``n - k`` merges."""
    if not 1 <= k <= n:
        raise ClusteringError(f"k must be in [1, {n}], got {k}")
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m in merges[: n - k]:
        parent[find(m.right)] = find(m.left)
    return np.array([find(i) for i in range(n)])


def agglomerative(matrix: DistanceMatrix, k: int, linkage: Linkage = "average", otype: str = "") -> Clustering:
    if not 1 <= k <= matrix.n:
        raise ClusteringError(f"k must be in [1, {matrix.n}], got {k}")
    merges = merge_sequence(matrix, linkage)
    labels = cut_merges(matrix.n, merges, k)
    clustering = _from_labels(matrix.ids, labels, otype=otype, method="agglomerative", linkage=linkage)
    return replace(clustering, merges=tuple(merges))


def kmedoids(matrix: DistanceMatrix, k: int, seed: int = 0, otype: str = "", max_iter: int = MAX_ITER) -> Clustering:
    """Alternating k-medoids directly on the mixed distance matrix."""
    n = matrix.n
    if not 1 <= k <= n:
        raise ClusteringError(f"k must be in [1, {n}], got {k}")
    D = matrix.values
    first = int(np.random.default_rng(seed).integers(n))
    medoids = _farthest_first(lambda i: D[i], n, k, first)
    for _ in range(max_iter):
        labels = D[:, medoids].argmin(axis=1)
        labels[medoids] = np.arange(k)
        updated = []
        for c in range(k):
            members = np.flatnonzero(labels == c)
            cost = D[np.ix_(members, members)].sum(axis=1)
            updated.append(int(members[np.argmin(cost)]))
        if updated == medoids:
            break
        medoids = updated
    labels = D[:, medoids].argmin(axis=1)
    labels[medoids] = np.arange(k)
    return _from_labels(matrix.ids, labels, otype=otype, method="kmedoids", seed=seed)


def ch_score(X: np.ndarray, labels: Sequence[int]) -> float:
    """Calinski-Harabasz index; ``math.inf`` when the within dispersion is 0."""
    X = np.asarray(X, dtype=float)
    labels = np.asarray(labels)
    n = X.shape[0]
    groups = np.unique(labels)
    k = len(groups)
    if not 2 <= k < n:
        raise ClusteringError(f"Calinski-Harabasz needs 2 <= k < n, got k={k}, n={n}")
    overall = X.mean(axis=0)
    between = within = 0.0
    for g in groups:
        pts = X[labels == g]
        centroid = pts.mean(axis=0)
        between += len(pts) * float(((centroid - overall) ** 2).sum())
        within += float(((pts - centroid) ** 2).sum())
    if within == 0:
        return math.inf
    return (between / (k - 1)) / (within / (n - k))


def calinski_harabasz(table: FeatureTable, clustering: Clustering) -> float:
    return ch_score(vectorize(table), clustering.labels(table.object_ids))


@dataclass(frozen=True)
class SweepEntry:
    k: int
    score: float
    clustering: Clustering
    best: bool = False


def sweep_k(
    table: FeatureTable,
    k_range: Sequence[int],
    method: Algorithm = "kmeans",
    seed: int = 0,
    linkage: Linkage = "average",
    weights: DistanceWeights = DistanceWeights(),
    otype: str = "",
    matrix: DistanceMatrix | None = None,
) -> list[SweepEntry]:
    """Cluster for every k in ``k_range`` and score each by Calinski-Harabasz.

    The entry with the highest score is flagged ``best`` (smallest k on ties).
    """
    ks = list(k_range)
    if not ks:
        raise ClusteringError("empty k range")
    if method != "kmeans" and matrix is None:
        matrix = distance_matrix(table, weights)
    X = vectorize(table)
    entries = []
    for k in ks:
        if method == "kmeans":
            cl = kmeans(table, k, seed, otype=otype)
        elif method == "agglomerative":
            cl = agglomerative(matrix, k, linkage, otype=otype)
        elif method == "kmedoids":
            cl = kmedoids(matrix, k, seed, otype=otype)
        else:
            raise ClusteringError(f"unknown clustering method {method!r}")
        entries.append(SweepEntry(k, ch_score(X, cl.labels(table.object_ids)), cl))
    best = max(range(len(entries)), key=lambda i: (entries[i].score, -entries[i].k))
    entries[best] = replace(entries[best], best=True)
    return entries
