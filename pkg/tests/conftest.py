from __future__ import annotations

from datetime import datetime

import numpy as np
import pytest

from evpatterns.ingest import Transaction
from evpatterns.matrix import ChargingMatrix


def make_tx(station="S1", lat=52.0, lon=5.1, arrival="2015-03-02T08:30:00", duration=12600.0):
    return Transaction(station, lat, lon, datetime.fromisoformat(arrival), duration)


def one_hot_matrix(i: int, j: int, source_count: int = 1) -> ChargingMatrix:
    cells = np.zeros((24, 24))
    cells[i, j] = 1.0
    return ChargingMatrix(cells=cells, source_count=source_count)


def random_matrix(rng: np.random.Generator, source_count: int = 100) -> ChargingMatrix:
    """A random valid charging matrix: sparse nonnegative cells normalized to 1."""
    cells = rng.random((24, 24)) * (rng.random((24, 24)) < 0.15)
    if cells.sum() == 0:
        cells[rng.integers(24), rng.integers(24)] = 1.0
    return ChargingMatrix(cells=cells / cells.sum(), source_count=source_count)


@pytest.fixture
def uniform_matrix() -> ChargingMatrix:
    return ChargingMatrix(cells=np.full((24, 24), 1.0 / 576.0), source_count=576)
