import itertools
import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ocelcluster.clustering import (
    Clustering,
    ClusteringError,
    agglomerative,
    calinski_harabasz,
    ch_score,
    cut_merges,
    kmeans,
    kmedoids,
    lloyd,
    merge_sequence,
    sweep_k,
    vectorize,
)
from ocelcluster.distance import DistanceMatrix, distance_matrix
from ocelcluster.profiles import encode
from ocelcluster.synthetic import blob_profiles
from oracles import ch_naive, wcss

TWO = [(0.0, 0.0), (1.0, 1.0)]
THREE = [(0.0, 0.0), (1.0, 0.0), (0.5, 1.0)]


def _sets(clustering):
    return {frozenset(c) for c in clustering.clusters}


def _truth(profiles, labels):
    groups = {}
    for p, lab in zip(profiles, labels):
        groups.setdefault(lab, set()).add(p.object_id)
    return {frozenset(g) for g in groups.values()}


def _random_matrix(rng, n):
    pts = rng.normal(size=(n, 3))
    values = np.sqrt(((pts[:, None] - pts[None]) ** 2).sum(axis=2))
    return DistanceMatrix(tuple(f"o{i}" for i in range(n)), values)


def test_k_equals_n_zero_wcss(rng):
    X = rng.normal(size=(7, 3))
    labels, centers, hist = lloyd(X, 7, seed=1)
    assert sorted(labels.tolist()) == list(range(7))
    assert hist[-1] == 0.0


def test_k_one(rng):
    profiles, _ = blob_profiles(rng, TWO, per_blob=5)
    cl = kmeans(encode(profiles), 1)
    assert cl.k == 1 and len(cl.clusters[0]) == 10


def test_two_blobs_recovered_and_optimal(rng):
    profiles, labels = blob_profiles(rng, TWO, per_blob=5)
    table = encode(profiles)
    cl = kmeans(table, 2, seed=3)
    assert _sets(cl) == _truth(profiles, labels)
    X = vectorize(table)
    got = wcss(X.tolist(), cl.labels(table.object_ids).tolist())
    best = min(
        wcss(X.tolist(), [0] + list(bits))
        for bits in itertools.product((0, 1), repeat=len(X) - 1)
        if any(bits)
    )
    assert got == pytest.approx(best, rel=1e-9, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 12), st.integers(1, 5))
def test_lloyd_monotone_and_fixpoint(seed, n, k):
    k = min(k, n)
    X = np.random.default_rng(seed).normal(size=(n, 2))
    labels, centers, hist = lloyd(X, k, seed)
    assert all(b <= a + 1e-12 for a, b in zip(hist, hist[1:]))
    assert len(set(labels.tolist())) == k
    # one more assignment step changes nothing
    d2 = ((X[:, None, :] - centers[None]) ** 2).sum(axis=2)
    assert np.all(d2[np.arange(n), labels] <= d2.min(axis=1) + 1e-12)
    assert wcss(X.tolist(), labels.tolist()) == pytest.approx(hist[-1], rel=1e-9, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 10), st.integers(1, 4))
def test_lloyd_permutation_equivariant(seed, n, k):
    k = min(k, n)
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, 2))
    perm = rng.permutation(n)
    a, _, _ = lloyd(X, k, first=0)
    b, _, _ = lloyd(X[perm], k, first=int(np.flatnonzero(perm == 0)[0]))
    part_a = {frozenset(np.flatnonzero(a == c).tolist()) for c in range(k)}
    part_b = {frozenset(perm[np.flatnonzero(b == c)].tolist()) for c in range(k)}
    assert part_a == part_b


def test_agglomerative_extremes(rng):
    m = _random_matrix(rng, 6)
    assert agglomerative(m, 6).k == 6
    assert agglomerative(m, 1).clusters == (tuple(m.ids),)


def test_agglomerative_close_pair_merges_first():
    values = np.full((5, 5), 0.5) + np.arange(25).reshape(5, 5) * 1e-3
    values = (values + values.T) / 2
    values[1, 3] = values[3, 1] = 0.01
    np.fill_diagonal(values, 0)
    m = DistanceMatrix(tuple("vwxyz"), values)
    cl = agglomerative(m, 4)
    assert _sets(cl) == {frozenset("wy"), frozenset("v"), frozenset("x"), frozenset("z")}


def test_agglomerative_tie_break():
    m = DistanceMatrix(tuple("abcd"), np.ones((4, 4)) - np.eye(4))
    first = merge_sequence(m)[0]
    assert (first.left, first.right) == (0, 1)


@pytest.mark.parametrize("linkage", ["average", "single", "complete"])
def test_agglomerative_nesting(rng, linkage):
    m = _random_matrix(rng, 12)
    merges = merge_sequence(m, linkage)
    assert len(merges) == 11
    prev = None
    for k in range(12, 0, -1):
        labels = cut_merges(12, merges, k)
        part = {frozenset(np.flatnonzero(labels == c).tolist()) for c in set(labels.tolist())}
        assert len(part) == k
        if prev is not None:
            assert all(any(p <= q for q in part) for p in prev)
        prev = part
    if linkage == "single":
        assert all(a.distance <= b.distance + 1e-12 for a, b in zip(merges, merges[1:]))


def test_ch_blobs_beat_random(rng):
    profiles, labels = blob_profiles(rng, TWO, per_blob=10)
    table = encode(profiles)
    X = vectorize(table)
    good = ch_score(X, labels)
    bad = ch_score(X, rng.permutation(labels))
    assert good > bad
    assert good == pytest.approx(ch_naive(X.tolist(), list(labels)), rel=1e-9)


def test_ch_identical_points_inf():
    X = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0], [1.0, 1.0]])
    assert ch_score(X, [0, 0, 1, 1]) == math.inf
    with pytest.raises(ClusteringError):
        ch_score(X, [0, 0, 0, 0])


def test_calinski_harabasz_on_table(rng):
    profiles, labels = blob_profiles(rng, THREE, per_blob=6)
    table = encode(profiles)
    cl = kmeans(table, 3)
    assert calinski_harabasz(table, cl) == pytest.approx(
        ch_naive(vectorize(table).tolist(), cl.labels(table.object_ids).tolist()), rel=1e-9
    )


def test_sweep_peaks_at_three(rng):
    profiles, _ = blob_profiles(rng, THREE, per_blob=10)
    table = encode(profiles)
    entries = sweep_k(table, range(2, 7))
    assert [e.k for e in entries] == [2, 3, 4, 5, 6]
    assert [e.k for e in entries if e.best] == [3]
    again = sweep_k(table, range(2, 7))
    assert [e.score for e in again] == [e.score for e in entries]


def test_sweep_single_k(rng):
    profiles, _ = blob_profiles(rng, THREE, per_blob=4)
    entries = sweep_k(encode(profiles), range(2, 3), method="agglomerative")
    assert len(entries) == 1 and entries[0].best


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 10), st.integers(1, 10), st.sampled_from(["kmeans", "agglomerative", "kmedoids"]))
def test_partition_properties(seed, n, k, method):
    k = min(k, n)
    rng = np.random.default_rng(seed)
    profiles, _ = blob_profiles(rng, [(0.0, 0.0)], per_blob=n, spread=1.0)
    table = encode(profiles)
    if method == "kmeans":
        cl = kmeans(table, k, seed)
    elif method == "agglomerative":
        cl = agglomerative(distance_matrix(table), k)
    else:
        cl = kmedoids(distance_matrix(table), k, seed)
    cl.check(table.object_ids)
    assert cl.k == len(cl.clusters) == k
    assert sorted(o for c in cl.clusters for o in c) == sorted(table.object_ids)
    assert Clustering.from_json(cl.to_json()) == replace(cl, wcss_history=())


def test_kmedoids_two_blobs(rng):
    profiles, labels = blob_profiles(rng, TWO, per_blob=6)
    table = encode(profiles)
    assert _sets(kmedoids(distance_matrix(table), 2, seed=5)) == _truth(profiles, labels)


def test_errors(rng):
    profiles, _ = blob_profiles(rng, TWO, per_blob=2)
    table = encode(profiles)
    with pytest.raises(ClusteringError):
        kmeans(table, 5)
    with pytest.raises(ClusteringError):
        agglomerative(distance_matrix(table), 0)
    with pytest.raises(ClusteringError):
        merge_sequence(distance_matrix(table), "ward")
    with pytest.raises(ClusteringError):
        sweep_k(table, [])
    bad = Clustering("t", (("a", "b"), ("b",)), "kmeans", 2)
    with pytest.raises(ClusteringError):
        bad.check()
    with pytest.raises(ClusteringError):
        Clustering("t", (("a",),), "kmeans", 1).check(["a", "b"])
