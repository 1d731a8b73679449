"""Parameterized matrix dissimilarity and pairwise distance matrices.

The measure is a modified l-p norm applied cell-wise to two charging
matrices:  d(A, B) = (sum_ij |A_ij - B_ij|^p) ** (1/o),  with o >= 1 and
p > 0. With o = p >= 1 it is the ordinary l-p distance; with o = 1 and
p <= 1 it stays a metric while reacting strongly to many small cell
differences, which dominate normalized charging matrices. Other
combinations (e.g. o = 1, p = 2) are still useful dissimilarities but can
violate the triangle inequality.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from .errors import ConfigError
from .matrix import N_CELLS, ChargingMatrix


@dataclass(frozen=True)
class DissimParams:
    """Outer root o >= 1 and inner exponent p > 0."""

    o: float
    p: float

    def __post_init__(self) -> None:
        if self.o < 1.0:
            raise ConfigError(f"outer root o must be >= 1, got {self.o}")
        if self.p <= 0.0:
            # p = 0 would count nonzero differences instead of measuring them.
            raise ConfigError(f"inner exponent p must be > 0, got {self.p}")


@dataclass(frozen=True)
class DistanceMatrix:
    """Dense symmetric pairwise dissimilarities with a zero diagonal."""

    entries: np.ndarray
    params: DissimParams
    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=float)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise ValueError(f"entries must be square, got shape {entries.shape}")
        if len(self.labels) != entries.shape[0]:
            raise ValueError("one label per row is required")
        entries = entries.copy()
        entries.flags.writeable = False
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def dissimilarity(A: ChargingMatrix, B: ChargingMatrix, params: DissimParams) -> float:
    """(sum over all 576 cells of |A_ij - B_ij|^p) ** (1/o); zero iff A == B."""
    diff = np.abs(A.cells - B.cells)
    return float(np.sum(diff**params.p) ** (1.0 / params.o))


def distance_matrix(
    matrices: Sequence[ChargingMatrix],
    params: DissimParams,
    labels: Sequence[str] | None = None,
) -> DistanceMatrix:
    """All pairwise dissimilarities; each unordered pair is evaluated once."""
    n = len(matrices)
    if n < 2:
        raise ValueError("distance matrix needs at least 2 matrices")
    if labels is None:
        labels = [str(i) for i in range(n)]
    if len(labels) != n:
        raise ValueError("one label per matrix is required")

    flat = np.stack([m.cells.reshape(N_CELLS) for m in matrices])
    entries = np.zeros((n, n))
    for a in range(n - 1):
        powered = np.abs(flat[a + 1 :] - flat[a]) ** params.p
        entries[a, a + 1 :] = powered.sum(axis=1) ** (1.0 / params.o)
    entries += entries.T
    return DistanceMatrix(entries=entries, params=params, labels=tuple(labels))


def sensitivity_curve(p: float, xs: Sequence[float]) -> list[float]:
    """Pointwise x**p over cell-difference magnitudes; monotone on [0, 1].

    Reproduces the small-difference sensitivity comparison: for x in (0, 1),
    x**(1/2) >= x >= x**2, so sub-one exponents amplify small differences.
    """
    if p <= 0.0:
        raise ConfigError(f"inner exponent p must be > 0, got {p}")
    return [float(x) ** p for x in xs]


def write_distance_csv(D: DistanceMatrix, dest: str | Path | IO[str]) -> None:
    """CSV with a header row/column of pool ids; write the params sidecar separately."""
    own = isinstance(dest, (str, Path))
    stream = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(stream)
        writer.writerow([""] + list(D.labels))
        for label, row in zip(D.labels, D.entries):
            writer.writerow([label] + [repr(float(v)) for v in row])
    finally:
        if own:
            stream.close()


def write_params_sidecar(params: DissimParams, dest: str | Path) -> None:
    Path(dest).write_text(
        json.dumps({"o": params.o, "p": params.p}, sort_keys=True) + "\n", encoding="utf-8"
    )
