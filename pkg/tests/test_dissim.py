from __future__ import annotations

import json
import math

import numpy as np
import pytest

from evpatterns.dissim import (
    DissimParams,
    dissimilarity,
    distance_matrix,
    sensitivity_curve,
    write_distance_csv,
    write_params_sidecar,
)
from evpatterns.errors import ConfigError
from evpatterns.matrix import ChargingMatrix

from conftest import one_hot_matrix, random_matrix

PAPER_GRID = [(1, 1), (2, 2), (3, 3), (1, 1 / 2), (1, 1 / 3), (1, 2 / 3), (1, 2), (1, 3)]


def two_cell_matrix():
    cells = np.zeros((24, 24))
    cells[0, 0] = 0.5
    cells[1, 1] = 0.5
    return ChargingMatrix(cells=cells, source_count=2)


@pytest.mark.parametrize("o,p", PAPER_GRID)
def test_identity_is_zero(o, p, uniform_matrix):
    assert dissimilarity(uniform_matrix, uniform_matrix, DissimParams(o, p)) == 0.0


def test_two_one_hot_cells_with_fractional_exponent():
    a, b = one_hot_matrix(0, 0), one_hot_matrix(5, 7)
    assert dissimilarity(a, b, DissimParams(1, 2 / 3)) == pytest.approx(2.0, rel=1e-12)


def test_split_mass_worked_examples():
    a, b = two_cell_matrix(), one_hot_matrix(0, 0)
    # Independent scalar evaluation: the only differing cells are (0,0) and (1,1),
    # each differing by 0.5.
    assert dissimilarity(a, b, DissimParams(2, 2)) == pytest.approx(
        math.sqrt(0.5**2 + 0.5**2), rel=1e-12
    )
    assert dissimilarity(a, b, DissimParams(1, 0.5)) == pytest.approx(
        0.5**0.5 + 0.5**0.5, rel=1e-12
    )


@pytest.mark.parametrize("o,p", [(0.5, 1.0), (0.0, 1.0), (1.0, 0.0), (1.0, -2.0)])
def test_invalid_params_rejected(o, p):
    with pytest.raises(ConfigError):
        DissimParams(o, p)


def test_symmetry_and_nonnegativity_randomized():
    rng = np.random.default_rng(12)
    for _ in range(25):
        a, b = random_matrix(rng), random_matrix(rng)
        for o, p in PAPER_GRID:
            params = DissimParams(o, p)
            d_ab = dissimilarity(a, b, params)
            d_ba = dissimilarity(b, a, params)
            assert d_ab >= 0.0
            assert d_ab == pytest.approx(d_ba, rel=1e-12)


def test_frobenius_and_abs_sum_agreement():
    rng = np.random.default_rng(13)
    for _ in range(20):
        a, b = random_matrix(rng), random_matrix(rng)
        diff = a.cells - b.cells
        assert dissimilarity(a, b, DissimParams(2, 2)) == pytest.approx(
            np.linalg.norm(diff, "fro"), rel=1e-12
        )
        assert dissimilarity(a, b, DissimParams(1, 1)) == pytest.approx(
            np.abs(diff).sum(), rel=1e-12
        )


@pytest.mark.parametrize("o,p", [(1, 1), (2, 2), (3, 3), (1, 1 / 2), (1, 1 / 3), (1, 2 / 3)])
def test_triangle_inequality_for_metric_families(o, p):
    rng = np.random.default_rng(14)
    params = DissimParams(o, p)
    for _ in range(20):
        a, b, c = random_matrix(rng), random_matrix(rng), random_matrix(rng)
        d_ac = dissimilarity(a, c, params)
        d_ab = dissimilarity(a, b, params)
        d_bc = dissimilarity(b, c, params)
        assert d_ac <= d_ab + d_bc + 1e-12


def test_triangle_inequality_fails_for_o1_p2():
    # Splitting one hop into two halves shrinks the p=2 sum without an outer
    # root to compensate, so the direct distance can exceed the detour.
    a, c = one_hot_matrix(0, 0), one_hot_matrix(5, 7)
    b = ChargingMatrix(cells=(a.cells + c.cells) / 2.0, source_count=2)
    params = DissimParams(1, 2)
    assert dissimilarity(a, c, params) > dissimilarity(a, b, params) + dissimilarity(b, c, params)


def test_distance_matrix_with_duplicates():
    a, b = one_hot_matrix(0, 0), one_hot_matrix(5, 7)
    D = distance_matrix([a, a, b], DissimParams(1, 1), labels=["x", "y", "z"])
    assert D.n == 3
    assert np.all(np.diag(D.entries) == 0.0)
    assert D.entries[0, 1] == 0.0
    expected = dissimilarity(a, b, DissimParams(1, 1))
    assert D.entries[0, 2] == pytest.approx(expected, rel=1e-12)
    assert D.entries[1, 2] == pytest.approx(expected, rel=1e-12)
    assert np.array_equal(D.entries, D.entries.T)


def test_distance_matrix_matches_pairwise_kernel():
    rng = np.random.default_rng(15)
    ms = [random_matrix(rng) for _ in range(6)]
    params = DissimParams(1, 2 / 3)
    D = distance_matrix(ms, params)
    for i in range(6):
        for j in range(6):
            assert D.entries[i, j] == pytest.approx(
                dissimilarity(ms[i], ms[j], params), rel=1e-12, abs=1e-15
            )


def test_distance_matrix_permutation_equivariance():
    rng = np.random.default_rng(16)
    ms = [random_matrix(rng) for _ in range(5)]
    labels = [f"m{i}" for i in range(5)]
    params = DissimParams(1, 1)
    D = distance_matrix(ms, params, labels)
    perm = [3, 1, 4, 0, 2]
    D_perm = distance_matrix([ms[i] for i in perm], params, [labels[i] for i in perm])
    assert D_perm.labels == tuple(labels[i] for i in perm)
    for a, pa in enumerate(perm):
        for b, pb in enumerate(perm):
            assert D_perm.entries[a, b] == D.entries[pa, pb]


def test_distance_matrix_needs_two(uniform_matrix):
    with pytest.raises(ValueError):
        distance_matrix([uniform_matrix], DissimParams(1, 1))


def test_sensitivity_curve_values():
    assert sensitivity_curve(1.0, [0.0, 0.25, 1.0]) == [0.0, 0.25, 1.0]
    assert sensitivity_curve(0.5, [0.01])[0] == pytest.approx(0.1, rel=1e-12)
    # Small differences: p = 2 damps them far below the p = 1/2 response.
    assert sensitivity_curve(2.0, [0.1])[0] == pytest.approx(0.01, rel=1e-12)
    assert sensitivity_curve(2.0, [0.1])[0] < sensitivity_curve(0.5, [0.1])[0]


def test_sensitivity_exponent_ordering_on_unit_interval():
    xs = np.linspace(0.01, 0.99, 25)
    half = sensitivity_curve(0.5, xs)
    one = sensitivity_curve(1.0, xs)
    two = sensitivity_curve(2.0, xs)
    for h, o, t in zip(half, one, two):
        assert h >= o >= t
    assert half == sorted(half)  # monotone nondecreasing


def test_distance_csv_and_sidecar(tmp_path):
    a, b = one_hot_matrix(0, 0), one_hot_matrix(5, 7)
    D = distance_matrix([a, b], DissimParams(1, 1), labels=["p1", "p2"])
    write_distance_csv(D, tmp_path / "d.csv")
    lines = (tmp_path / "d.csv").read_text().splitlines()
    assert lines[0] == ",p1,p2"
    assert lines[1].startswith("p1,0.0,2.0")
    write_params_sidecar(D.params, tmp_path / "d_params.json")
    assert json.loads((tmp_path / "d_params.json").read_text()) == {"o": 1, "p": 1}
