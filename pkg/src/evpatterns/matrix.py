"""The 24x24 charging matrix: empirical arrival-hour x duration-bin probabilities.

Cell (i, j) holds the probability that a session arrives within wall-clock
hour i (arrival in [i, i+1) o'clock) and stays for a duration in [j, j+1)
hours. Rows are arrival hours, columns are duration bins; every export
carries that convention.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import DataError
from .ingest import Transaction

N_HOURS = 24
N_DURATION_BINS = 24
N_CELLS = N_HOURS * N_DURATION_BINS

SUM_TOLERANCE = 1e-9

AXES = {"rows": "arrival_hour", "cols": "duration_bin"}

# Value-frequency bins partition [0, inf): exact zeros, near-zeros, moderate, large.
VALUE_BIN_LABELS = ("zero", "(0,0.01]", "(0.01,0.1]", "(0.1,inf)")


@dataclass(frozen=True)
class ChargingMatrix:
    """Nonnegative 24x24 matrix of empirical probabilities summing to one."""

    cells: np.ndarray
    source_count: int

    def __post_init__(self) -> None:
        cells = np.asarray(self.cells, dtype=float)
        if cells.shape != (N_HOURS, N_DURATION_BINS):
            raise ValueError(f"cells must be {N_HOURS}x{N_DURATION_BINS}, got {cells.shape}")
        if np.any(cells < 0):
            raise ValueError("cells must be nonnegative")
        if self.source_count < 1:
            raise ValueError("source_count must be >= 1")
        total = float(cells.sum())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"cells must sum to 1 (got {total})")
        cells = cells.copy()
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ChargingMatrix):
            return NotImplemented
        return self.source_count == other.source_count and np.array_equal(self.cells, other.cells)


def bin_indices(tx: Transaction) -> tuple[int, int]:
    """(arrival hour, duration bin) for one transaction; duration must be < 24 h."""
    j = int(tx.duration // 3600.0)
    if not 0 <= j < N_DURATION_BINS:
        raise ValueError(f"duration {tx.duration} s outside [0, 24 h); discard long sessions first")
    return tx.arrival.hour, j


def build_matrix(txs: Sequence[Transaction]) -> ChargingMatrix:
    """Empirical probability matrix of a transaction list.

    Each transaction contributes mass 1/len(txs) to exactly one cell.

    Raises:
        DataError: the transaction list is empty (an all-zero matrix would
            violate the sum-to-one invariant).
    """
    if not txs:
        raise DataError("no usable transactions")
    counts = np.zeros((N_HOURS, N_DURATION_BINS), dtype=float)
    for tx in txs:
        i, j = bin_indices(tx)
        counts[i, j] += 1.0
    return ChargingMatrix(cells=counts / len(txs), source_count=len(txs))


def aggregate_mean(
    matrices: Sequence[ChargingMatrix], weight_by_count: bool = False
) -> ChargingMatrix:
    """Normalized element-wise sum of charging matrices.

    By default every matrix weighs equally (sum divided by the number of
    matrices); with weight_by_count=True matrices are weighted by their
    source_count, which equals rebuilding from the union of transactions.
    """
    if not matrices:
        raise DataError("cannot aggregate an empty list of matrices")
    total_count = sum(m.source_count for m in matrices)
    if weight_by_count:
        cells = sum((m.cells * m.source_count for m in matrices), np.zeros((N_HOURS, N_DURATION_BINS)))
        cells /= total_count
    else:
        cells = sum((m.cells for m in matrices), np.zeros((N_HOURS, N_DURATION_BINS)))
        cells /= len(matrices)
    return ChargingMatrix(cells=cells, source_count=total_count)


def value_frequency_report(matrices: Iterable[ChargingMatrix]) -> dict[str, int]:
    """Count matrix cells per value bin: exact 0, (0,0.01], (0.01,0.1], (0.1,inf)."""
    counts = dict.fromkeys(VALUE_BIN_LABELS, 0)
    for m in matrices:
        v = m.cells
        counts["zero"] += int(np.count_nonzero(v == 0.0))
        counts["(0,0.01]"] += int(np.count_nonzero((v > 0.0) & (v <= 0.01)))
        counts["(0.01,0.1]"] += int(np.count_nonzero((v > 0.01) & (v <= 0.1)))
        counts["(0.1,inf)"] += int(np.count_nonzero(v > 0.1))
    return counts


def matrix_to_json_dict(pool_id: str, m: ChargingMatrix) -> dict:
    return {
        "pool_id": pool_id,
        "source_count": m.source_count,
        "axes": dict(AXES),
        "cells": [[float(v) for v in row] for row in m.cells],
    }


def write_matrix_json(pool_id: str, m: ChargingMatrix, dest: str | Path) -> None:
    Path(dest).write_text(
        json.dumps(matrix_to_json_dict(pool_id, m), sort_keys=True, indent=1) + "\n",
        encoding="utf-8",
    )


def read_matrix_json(source: str | Path) -> tuple[str, ChargingMatrix]:
    payload = json.loads(Path(source).read_text(encoding="utf-8"))
    m = ChargingMatrix(cells=np.array(payload["cells"], dtype=float), source_count=payload["source_count"])
    return payload["pool_id"], m


def write_nonzero_cells_csv(
    labeled: Iterable[tuple[str, ChargingMatrix]], dest: str | Path | IO[str]
) -> None:
    """Flat CSV ``pool_id,i,j,value`` of nonzero cells; i = arrival hour, j = duration bin."""
    own = isinstance(dest, (str, Path))
    stream = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(stream)
        writer.writerow(["pool_id", "i", "j", "value"])
        for pool_id, m in labeled:
            for i, j in np.argwhere(m.cells != 0.0):
                writer.writerow([pool_id, int(i), int(j), repr(float(m.cells[i, j]))])
    finally:
        if own:
            stream.close()


def write_value_frequency_csv(counts: dict[str, int], dest: str | Path | IO[str]) -> None:
    own = isinstance(dest, (str, Path))
    stream = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(stream)
        writer.writerow(["bin", "count"])
        for label in VALUE_BIN_LABELS:
            writer.writerow([label, counts[label]])
    finally:
        if own:
            stream.close()
