"""Agglomerative hierarchical clustering over a distance matrix.

Complete linkage is the supported contract: at every step the two current
clusters with the smallest maximum pairwise member distance are merged.
Ties are broken deterministically by the smallest involved node id, then
the second id, so identical inputs always produce identical dendrograms.
Leaves are numbered 0..n-1 and the merge at step s creates node n+s.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Callable, Sequence

import numpy as np

from .dissim import DissimParams, DistanceMatrix, distance_matrix
from .matrix import ChargingMatrix, aggregate_mean

# Default exploration grid: o = p in {1, 2, 3}, then o = 1 with fractional
# and super-linear exponents.
DEFAULT_SWEEP_PARAMS = (
    DissimParams(1, 1),
    DissimParams(2, 2),
    DissimParams(3, 3),
    DissimParams(1, 1 / 2),
    DissimParams(1, 1 / 3),
    DissimParams(1, 2 / 3),
    DissimParams(1, 2),
    DissimParams(1, 3),
)


@dataclass(frozen=True)
class MergeStep:
    left: int
    right: int
    height: float
    new_id: int


@dataclass(frozen=True)
class Dendrogram:
    n: int
    merges: tuple[MergeStep, ...]


@dataclass(frozen=True)
class ClusterAssignment:
    """Per-leaf cluster labels, numbered by decreasing size then smallest leaf."""

    k: int
    labels: tuple[int, ...]

    def clusters(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.k)]
        for leaf, label in enumerate(self.labels):
            out[label].append(leaf)
        return out


@dataclass(frozen=True)
class SweepRow:
    params: DissimParams
    sizes: tuple[int, ...]


@dataclass(frozen=True)
class SweepResult:
    k: int
    rows: tuple[SweepRow, ...]


_LINKAGES: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "complete": np.maximum,
    "single": np.minimum,
}


def agglomerate(D: DistanceMatrix, linkage: str = "complete") -> Dendrogram:
    """Build the full merge history for the given distance matrix.

    Only complete linkage is part of the tested contract; "single" and
    "average" are provided as untested extras.
    """
    if linkage not in _LINKAGES and linkage != "average":
        raise ValueError(f"unknown linkage {linkage!r}")
    n = D.n
    if n < 2:
        raise ValueError("agglomeration needs at least 2 leaves")
    if not np.all(np.isfinite(D.entries)):
        raise ValueError("distance matrix contains non-finite entries")

    # Active clusters stay sorted by node id (new ids only grow and are
    # appended), so the first flat minimum of the working matrix is exactly
    # the tie-break pair: smallest distance, then smallest ids.
    work = D.entries.copy().astype(float)
    np.fill_diagonal(work, np.inf)
    ids = list(range(n))
    sizes = [1] * n

    merges: list[MergeStep] = []
    for step in range(n - 1):
        m = work.shape[0]
        flat = int(np.argmin(work))
        a, b = divmod(flat, m)
        if a > b:
            a, b = b, a
        height = float(work[a, b])

        if linkage == "average":
            merged = (sizes[a] * work[a] + sizes[b] * work[b]) / (sizes[a] + sizes[b])
        else:
            merged = _LINKAGES[linkage](work[a], work[b])

        keep = [i for i in range(m) if i not in (a, b)]
        new_id = n + step
        merges.append(MergeStep(left=ids[a], right=ids[b], height=height, new_id=new_id))

        reduced = work[np.ix_(keep, keep)]
        row = merged[keep]
        work = np.empty((m - 1, m - 1))
        work[: m - 2, : m - 2] = reduced
        work[: m - 2, m - 2] = row
        work[m - 2, : m - 2] = row
        work[m - 2, m - 2] = np.inf

        sizes = [sizes[i] for i in keep] + [sizes[a] + sizes[b]]
        ids = [ids[i] for i in keep] + [new_id]

    return Dendrogram(n=n, merges=tuple(merges))


def cut(t: Dendrogram, k: int) -> ClusterAssignment:
    """Undo the last k-1 merges; the remaining components are the clusters."""
    if not 1 <= k <= t.n:
        raise ValueError(f"k must lie in [1, {t.n}], got {k}")
    components: dict[int, list[int]] = {leaf: [leaf] for leaf in range(t.n)}
    for step in t.merges[: t.n - k]:
        components[step.new_id] = components.pop(step.left) + components.pop(step.right)

    ordered = sorted(components.values(), key=lambda leaves: (-len(leaves), min(leaves)))
    labels = [0] * t.n
    for cluster_index, leaves in enumerate(ordered):
        for leaf in leaves:
            labels[leaf] = cluster_index
    return ClusterAssignment(k=k, labels=tuple(labels))


def medoid(members: Sequence[int], D: DistanceMatrix) -> int:
    """Member with the smallest sum of distances to the other members; ties -> smallest index."""
    if not members:
        raise ValueError("medoid of an empty member set")
    ordered = sorted(members)
    sums = D.entries[np.ix_(ordered, ordered)].sum(axis=1)
    return ordered[int(np.argmin(sums))]


def cluster_representative_mean(member_matrices: Sequence[ChargingMatrix]) -> ChargingMatrix:
    """Normalized element-wise sum of the cluster's charging matrices."""
    return aggregate_mean(member_matrices)


def balance_metrics(sizes: Sequence[int]) -> dict[str, float]:
    """Normalized entropy in [0, 1] and max/min size ratio of a size list.

    Entropy is 1.0 for perfectly even clusters and near 0 for degenerate
    ones; a single cluster counts as even by convention.
    """
    if not sizes or any(s < 1 for s in sizes):
        raise ValueError("sizes must be a nonempty list of positive counts")
    k = len(sizes)
    n = sum(sizes)
    if k == 1:
        entropy = 1.0
    else:
        shares = [s / n for s in sizes]
        entropy = -sum(q * math.log(q) for q in shares) / math.log(k)
    return {"entropy": entropy, "ratio": max(sizes) / min(sizes)}


def sweep(
    matrices: Sequence[ChargingMatrix],
    param_list: Sequence[DissimParams] = DEFAULT_SWEEP_PARAMS,
    k: int = 10,
    labels: Sequence[str] | None = None,
) -> SweepResult:
    """One clustering run per parameter set, reporting descending cluster sizes."""
    if not param_list:
        raise ValueError("param_list must be nonempty")
    rows = []
    for params in param_list:
        D = distance_matrix(matrices, params, labels)
        assignment = cut(agglomerate(D), k)
        sizes = tuple(sorted((len(c) for c in assignment.clusters()), reverse=True))
        rows.append(SweepRow(params=params, sizes=sizes))
    return SweepResult(k=k, rows=tuple(rows))


def write_dendrogram_json(t: Dendrogram, dest: str | Path) -> None:
    """JSON merge list; step s merges nodes into implicit node n+s."""
    payload = [
        {"left": step.left, "right": step.right, "height": step.height} for step in t.merges
    ]
    Path(dest).write_text(json.dumps(payload, sort_keys=True, indent=1) + "\n", encoding="utf-8")


def write_assignments_csv(
    labels: Sequence[str], assignment: ClusterAssignment, dest: str | Path | IO[str]
) -> None:
    """CSV ``pool_id,cluster`` in leaf order."""
    own = isinstance(dest, (str, Path))
    stream = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(stream)
        writer.writerow(["pool_id", "cluster"])
        for pool_id, label in zip(labels, assignment.labels):
            writer.writerow([pool_id, label])
    finally:
        if own:
            stream.close()


def write_sweep_csv(result: SweepResult, dest: str | Path | IO[str]) -> None:
    """CSV ``o,p,size_1..size_k,entropy,ratio`` with sizes in decreasing order."""
    own = isinstance(dest, (str, Path))
    stream = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(stream)
        writer.writerow(
            ["o", "p"] + [f"size_{i}" for i in range(1, result.k + 1)] + ["entropy", "ratio"]
        )
        for row in result.rows:
            metrics = balance_metrics(row.sizes)
            writer.writerow(
                [repr(float(row.params.o)), repr(float(row.params.p))]
                + list(row.sizes)
                + [repr(metrics["entropy"]), repr(metrics["ratio"])]
            )
    finally:
        if own:
            stream.close()
