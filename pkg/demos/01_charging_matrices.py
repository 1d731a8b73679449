"""From raw transactions to charging matrices.

Walks the ingest and preprocessing stages on a synthetic fleet: parse a
transaction CSV, pool co-located stations, drop unusable sessions, and
build the per-pool 24x24 arrival-hour x duration probability matrix.

Run:  python3 demos/01_charging_matrices.py
"""

import io

import numpy as np

from evpatterns.ingest import parse_transactions, write_transactions
from evpatterns.matrix import build_matrix, value_frequency_report
from evpatterns.preprocess import prepare_pools
from evpatterns.synth import generate_fleet

# ---------------------------------------------------------------------------
# A synthetic fleet: 3 behavioral archetypes x 5 stations x 120 transactions.
# The generator emits plain Transaction records; serialize and re-parse them
# to show that the CSV schema is a lossless interchange format.
# ---------------------------------------------------------------------------
transactions, truth = generate_fleet(stations_per_archetype=5, tx_per_station=120, seed=42)
print(f"generated {len(transactions)} transactions across {len(truth)} stations")

buffer = io.StringIO()
write_transactions(transactions, buffer)
result = parse_transactions(io.StringIO(buffer.getvalue()))
print(f"re-parsed {len(result.transactions)} rows, {len(result.rejections)} rejected")
assert result.transactions == transactions

# ---------------------------------------------------------------------------
# Preprocessing: stations closer than 30 m merge into pools, sessions of
# 24 h or longer are discarded, and pools below 30 usable transactions drop.
# The synthetic grid spaces stations ~700 m apart, so every station survives
# as its own pool.
# ---------------------------------------------------------------------------
pools = prepare_pools(result.transactions, merge_radius=30.0, min_count=30, max_duration_hours=24.0)
print(f"{len(pools)} pools after preprocessing")

# ---------------------------------------------------------------------------
# One charging matrix per pool. Cell (i, j) is the empirical probability of
# a session arriving in hour i with a duration in [j, j+1) hours; each
# matrix is nonnegative and sums to one.
# ---------------------------------------------------------------------------
matrices = {pool.pool_id: build_matrix(pool.transactions) for pool in pools}

example_id = "work-000"
m = matrices[example_id]
print(f"\n{example_id}: {m.source_count} transactions, cell sum = {m.cells.sum():.12f}")
top = np.dstack(np.unravel_index(np.argsort(m.cells, axis=None)[::-1][:5], m.cells.shape))[0]
print("top cells (arrival hour, duration bin, probability):")
for i, j in top:
    print(f"  ({i:2d}, {j:2d})  {m.cells[i, j]:.3f}")

# ---------------------------------------------------------------------------
# The value-frequency table summarizes how sparse the matrices are: most
# cells are exactly zero, and large probabilities are rare.
# ---------------------------------------------------------------------------
counts = value_frequency_report(matrices.values())
print(f"\nvalue frequencies over {len(matrices)} matrices ({576 * len(matrices)} cells):")
for label, count in counts.items():
    print(f"  {label:>12}: {count}")
