from __future__ import annotations

import json

import numpy as np
import pytest

from evpatterns.dissim import DissimParams, DistanceMatrix
from evpatterns.hac import (
    DEFAULT_SWEEP_PARAMS,
    agglomerate,
    balance_metrics,
    cluster_representative_mean,
    cut,
    medoid,
    sweep,
    write_assignments_csv,
    write_dendrogram_json,
    write_sweep_csv,
)

from conftest import one_hot_matrix, random_matrix
from reference import naive_complete_linkage, naive_cut


def dm(entries: np.ndarray, labels: list[str] | None = None) -> DistanceMatrix:
    n = len(entries)
    return DistanceMatrix(
        entries=np.asarray(entries, dtype=float),
        params=DissimParams(1, 1),
        labels=tuple(labels or [str(i) for i in range(n)]),
    )


def random_distance_matrix(rng: np.random.Generator, n: int, quantized: bool = False) -> DistanceMatrix:
    raw = rng.integers(1, 5, size=(n, n)).astype(float) if quantized else rng.random((n, n)) + 0.01
    entries = np.triu(raw, 1)
    entries = entries + entries.T
    return dm(entries)


def as_partition(assignment) -> set[frozenset[int]]:
    return {frozenset(c) for c in assignment.clusters()}


FOUR_LEAF = np.array(
    [
        [0.0, 1.0, 10.0, 10.0],
        [1.0, 0.0, 10.0, 10.0],
        [10.0, 10.0, 0.0, 1.5],
        [10.0, 10.0, 1.5, 0.0],
    ]
)


def test_four_leaf_merge_sequence():
    t = agglomerate(dm(FOUR_LEAF))
    got = [(s.left, s.right, s.height, s.new_id) for s in t.merges]
    assert got == [(0, 1, 1.0, 4), (2, 3, 1.5, 5), (4, 5, 10.0, 6)]
    assert got == naive_complete_linkage(FOUR_LEAF)


def test_two_leaves_single_merge():
    t = agglomerate(dm(np.array([[0.0, 3.5], [3.5, 0.0]])))
    assert len(t.merges) == 1
    assert (t.merges[0].left, t.merges[0].right, t.merges[0].height) == (0, 1, 3.5)


def test_equidistant_tie_break():
    entries = np.ones((3, 3)) - np.eye(3)
    t = agglomerate(dm(entries))
    assert (t.merges[0].left, t.merges[0].right) == (0, 1)
    assert t.merges[1].height == 1.0
    assert (t.merges[1].left, t.merges[1].right) == (2, 3)


@pytest.mark.parametrize("quantized", [False, True])
def test_agglomerate_matches_naive_reference(quantized):
    rng = np.random.default_rng(31 if quantized else 32)
    for _ in range(30):
        n = int(rng.integers(2, 21))
        D = random_distance_matrix(rng, n, quantized=quantized)
        got = [(s.left, s.right, s.height, s.new_id) for s in agglomerate(D).merges]
        assert got == naive_complete_linkage(D.entries)


def test_heights_nondecreasing():
    rng = np.random.default_rng(33)
    for _ in range(10):
        D = random_distance_matrix(rng, int(rng.integers(3, 30)))
        heights = [s.height for s in agglomerate(D).merges]
        assert heights == sorted(heights)


def test_non_finite_distances_rejected():
    entries = FOUR_LEAF.copy()
    entries[0, 2] = entries[2, 0] = np.nan
    with pytest.raises(ValueError, match="non-finite"):
        agglomerate(dm(entries))


def test_cut_extremes():
    t = agglomerate(dm(FOUR_LEAF))
    assert cut(t, 1).labels == (0, 0, 0, 0)
    assert cut(t, 4).labels == (0, 1, 2, 3)
    with pytest.raises(ValueError):
        cut(t, 0)
    with pytest.raises(ValueError):
        cut(t, 5)


def test_cut_four_leaf_two_clusters():
    assignment = cut(agglomerate(dm(FOUR_LEAF)), 2)
    assert as_partition(assignment) == {frozenset({0, 1}), frozenset({2, 3})}


def test_cut_matches_naive_reference_at_all_k():
    rng = np.random.default_rng(34)
    for _ in range(15):
        n = int(rng.integers(2, 16))
        D = random_distance_matrix(rng, n, quantized=bool(rng.integers(2)))
        t = agglomerate(D)
        merges = naive_complete_linkage(D.entries)
        for k in range(1, n + 1):
            assert as_partition(cut(t, k)) == naive_cut(merges, n, k)


def test_cut_refinement():
    rng = np.random.default_rng(35)
    D = random_distance_matrix(rng, 12)
    t = agglomerate(D)
    for k in range(2, 13):
        fine = as_partition(cut(t, k))
        coarse = as_partition(cut(t, k - 1))
        for cluster in fine:
            assert any(cluster <= parent for parent in coarse)


def test_relabeling_leaves_permutes_clusters_consistently():
    rng = np.random.default_rng(36)
    D = random_distance_matrix(rng, 8)
    perm = list(rng.permutation(8))
    permuted = dm(D.entries[np.ix_(perm, perm)])
    for k in (2, 3, 5):
        base = as_partition(cut(agglomerate(D), k))
        moved = as_partition(cut(agglomerate(permuted), k))
        # Map the permuted partition back into original leaf ids.
        mapped = {frozenset(perm[i] for i in cluster) for cluster in moved}
        assert mapped == base


def test_cluster_numbering_by_size_then_smallest_leaf():
    # {2,3,4} is biggest -> label 0; {0,1} and {5,6} tie -> leaf 0 wins label 1.
    entries = np.full((7, 7), 9.0)
    np.fill_diagonal(entries, 0.0)
    for group in ({0, 1}, {2, 3, 4}, {5, 6}):
        for a in group:
            for b in group:
                if a != b:
                    entries[a, b] = 1.0
    assignment = cut(agglomerate(dm(entries)), 3)
    assert assignment.labels == (1, 1, 0, 0, 0, 2, 2)


def test_medoid_singleton_and_duplicates():
    entries = np.array([[0.0, 0.0, 2.0], [0.0, 0.0, 2.0], [2.0, 2.0, 0.0]])
    D = dm(entries)
    assert medoid([1], D) == 1
    # Leaves 0 and 1 are identical: the smallest index wins.
    assert medoid([0, 1, 2], D) == 0


def test_medoid_matches_exhaustive_scan_and_scale_invariance():
    rng = np.random.default_rng(37)
    for _ in range(10):
        D = random_distance_matrix(rng, 5)
        members = [0, 1, 2, 3, 4]
        sums = [sum(D.entries[i, j] for j in members) for i in members]
        assert medoid(members, D) == int(np.argmin(sums))
        scaled = dm(D.entries * 17.0)
        assert medoid(members, scaled) == medoid(members, D)


def test_cluster_representative_mean_delegates():
    a = one_hot_matrix(2, 2)
    mean = cluster_representative_mean([a, a])
    assert np.array_equal(mean.cells, a.cells)
    rng = np.random.default_rng(38)
    ms = [random_matrix(rng) for _ in range(4)]
    assert abs(cluster_representative_mean(ms).cells.sum() - 1.0) < 1e-9


def test_balance_metrics():
    even = balance_metrics([5, 5, 5, 5])
    assert even["entropy"] == pytest.approx(1.0, abs=1e-12)
    assert even["ratio"] == 1.0
    assert balance_metrics([2, 2])["ratio"] == 1.0
    # Degenerate clustering: nearly everything in one cluster.
    degenerate = balance_metrics([1253, 3, 2, 2, 1, 1, 1, 1, 1, 1])
    assert degenerate["entropy"] < 0.05
    assert degenerate["ratio"] == 1253.0
    assert balance_metrics([7]) == {"entropy": 1.0, "ratio": 1.0}
    with pytest.raises(ValueError):
        balance_metrics([])
    with pytest.raises(ValueError):
        balance_metrics([3, 0])


def test_sweep_shape_and_sums():
    rng = np.random.default_rng(39)
    ms = [random_matrix(rng) for _ in range(12)]
    result = sweep(ms, DEFAULT_SWEEP_PARAMS, k=4)
    assert len(result.rows) == 8
    for row in result.rows:
        assert len(row.sizes) == 4
        assert sum(row.sizes) == 12
        assert list(row.sizes) == sorted(row.sizes, reverse=True)


def test_sweep_default_grid_is_the_eight_configurations():
    got = [(p.o, p.p) for p in DEFAULT_SWEEP_PARAMS]
    assert got == [(1, 1), (2, 2), (3, 3), (1, 1 / 2), (1, 1 / 3), (1, 2 / 3), (1, 2), (1, 3)]


def test_sweep_on_duplicate_matrices():
    m = one_hot_matrix(4, 4)
    ms = [m] * 6
    assert sweep(ms, [DissimParams(1, 1)], k=1).rows[0].sizes == (6,)
    assert sweep(ms, [DissimParams(1, 1)], k=6).rows[0].sizes == (1, 1, 1, 1, 1, 1)


def test_dendrogram_json_export(tmp_path):
    t = agglomerate(dm(FOUR_LEAF))
    path = tmp_path / "dendrogram.json"
    write_dendrogram_json(t, path)
    payload = json.loads(path.read_text())
    assert payload == [
        {"left": 0, "right": 1, "height": 1.0},
        {"left": 2, "right": 3, "height": 1.5},
        {"left": 4, "right": 5, "height": 10.0},
    ]


def test_assignment_and_sweep_csv(tmp_path):
    t = agglomerate(dm(FOUR_LEAF, labels=["a", "b", "c", "d"]))
    assignment = cut(t, 2)
    path = tmp_path / "assignments.csv"
    write_assignments_csv(["a", "b", "c", "d"], assignment, path)
    assert path.read_text() == "pool_id,cluster\na,0\nb,0\nc,1\nd,1\n"

    rng = np.random.default_rng(40)
    ms = [random_matrix(rng) for _ in range(5)]
    result = sweep(ms, DEFAULT_SWEEP_PARAMS, k=3)
    sweep_path = tmp_path / "sweep.csv"
    write_sweep_csv(result, sweep_path)
    lines = sweep_path.read_text().splitlines()
    assert lines[0] == "o,p,size_1,size_2,size_3,entropy,ratio"
    assert len(lines) == 9
