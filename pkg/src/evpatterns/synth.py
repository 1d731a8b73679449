"""Synthetic transaction generator with ground-truth archetypes.

Each archetype is a Gaussian mixture over arrival hour (wrapped onto the
24-hour circle) and connection duration (truncated to [0, 24) hours by
resampling). Generated stations carry fixed coordinates and emit the exact
ingest CSV schema, so the full pipeline runs on synthetic data unchanged.

Randomness contract: all draws come from NumPy's PCG64 bit generator.
generate_station(seed) uses Generator(PCG64(seed)); a fleet derives one
child seed per station via SeedSequence(seed).spawn(), so per-station
output is independent of how many stations are generated around it.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from datetime import date, datetime, timedelta
from pathlib import Path
from typing import IO, Mapping, Sequence

import numpy as np

from .errors import ConfigError
from .ingest import Transaction

WEIGHT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class MixComponent:
    mean: float
    std: float
    weight: float


@dataclass(frozen=True)
class Archetype:
    """A named behavioral pattern: mixtures over arrival hour and duration."""

    name: str
    arrival_mix: tuple[MixComponent, ...]
    duration_mix: tuple[MixComponent, ...]

    def __post_init__(self) -> None:
        for axis, mix in (("arrival", self.arrival_mix), ("duration", self.duration_mix)):
            if not mix:
                raise ConfigError(f"archetype {self.name!r}: empty {axis} mixture")
            for c in mix:
                if not 0.0 <= c.mean < 24.0:
                    raise ConfigError(f"archetype {self.name!r}: {axis} mean {c.mean} outside [0, 24)")
                if c.std < 0.0 or c.weight < 0.0:
                    raise ConfigError(f"archetype {self.name!r}: negative std or weight on {axis}")
            if abs(sum(c.weight for c in mix) - 1.0) > WEIGHT_TOLERANCE:
                raise ConfigError(f"archetype {self.name!r}: {axis} weights must sum to 1")


# Three well-separated patterns: commuter charging (morning arrival, long
# connection), overnight home charging (evening arrival, long connection),
# and short midday stops.
DEFAULT_ARCHETYPES = (
    Archetype("work", (MixComponent(8.0, 1.0, 1.0),), (MixComponent(9.0, 1.2, 1.0),)),
    Archetype("home", (MixComponent(19.5, 1.0, 1.0),), (MixComponent(13.0, 2.0, 1.0),)),
    Archetype("errand", (MixComponent(12.5, 0.6, 1.0),), (MixComponent(1.5, 0.75, 1.0),)),
)

_BASE_LAT = 52.0
_BASE_LON = 5.0
_GRID_STEP_DEG = 0.01  # ~0.7-1.1 km, far above any sensible merge radius
_GRID_COLS = 25


def _sample_mixture(rng: np.random.Generator, mix: Sequence[MixComponent], n: int) -> np.ndarray:
    weights = np.array([c.weight for c in mix])
    means = np.array([c.mean for c in mix])
    stds = np.array([c.std for c in mix])
    chosen = rng.choice(len(mix), size=n, p=weights)
    return rng.normal(means[chosen], stds[chosen])


def _sample_truncated(rng: np.random.Generator, mix: Sequence[MixComponent], n: int) -> np.ndarray:
    """Mixture draws resampled until they land in [0, 24)."""
    values = _sample_mixture(rng, mix, n)
    bad = (values < 0.0) | (values >= 24.0)
    while np.any(bad):
        values[bad] = _sample_mixture(rng, mix, int(bad.sum()))
        bad = (values < 0.0) | (values >= 24.0)
    return values


def generate_station(
    arch: Archetype,
    n_tx: int,
    seed: int,
    station_id: str = "synthetic-000",
    latitude: float = _BASE_LAT,
    longitude: float = _BASE_LON,
    start_date: date = date(2015, 1, 1),
) -> list[Transaction]:
    """Deterministic transactions for one station following an archetype.

    Arrival hours are wrapped (mod 24) mixture draws; durations are
    truncated to [0, 24) by resampling. Transaction t lands on day
    t mod 365 after start_date.
    """
    if n_tx < 1:
        raise ValueError("n_tx must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    arrival_hours = _sample_mixture(rng, arch.arrival_mix, n_tx) % 24.0
    duration_hours = _sample_truncated(rng, arch.duration_mix, n_tx)

    base = datetime.combine(start_date, datetime.min.time())
    txs = []
    for t in range(n_tx):
        arrival = base + timedelta(days=t % 365, hours=float(arrival_hours[t]))
        txs.append(
            Transaction(
                station_id=station_id,
                latitude=latitude,
                longitude=longitude,
                arrival=arrival,
                duration=float(duration_hours[t]) * 3600.0,
            )
        )
    return txs


def generate_fleet(
    archetypes: Sequence[Archetype] = DEFAULT_ARCHETYPES,
    stations_per_archetype: int = 20,
    tx_per_station: int = 200,
    seed: int = 0,
) -> tuple[list[Transaction], dict[str, str]]:
    """Generate a fleet of stations plus the ground-truth archetype of each.

    Returns (transactions, station_id -> archetype name). Stations sit on a
    coordinate grid spaced far beyond the merge radius, so every station
    becomes its own pool.
    """
    children = np.random.SeedSequence(seed).spawn(len(archetypes) * stations_per_archetype)
    transactions: list[Transaction] = []
    truth: dict[str, str] = {}
    g = 0
    for arch in archetypes:
        for i in range(stations_per_archetype):
            station_id = f"{arch.name}-{i:03d}"
            station_seed = int(children[g].generate_state(1, dtype=np.uint64)[0])
            lat = _BASE_LAT + _GRID_STEP_DEG * (g // _GRID_COLS)
            lon = _BASE_LON + _GRID_STEP_DEG * (g % _GRID_COLS)
            transactions.extend(
                generate_station(
                    arch,
                    tx_per_station,
                    seed=station_seed,
                    station_id=station_id,
                    latitude=lat,
                    longitude=lon,
                )
            )
            truth[station_id] = arch.name
            g += 1
    return transactions, truth


def adjusted_rand_index(labels_a: Sequence, labels_b: Sequence) -> float:
    """Permutation-adjusted Rand index; 1 iff the partitions match up to relabeling."""
    if len(labels_a) != len(labels_b):
        raise ValueError("label sequences must have equal length")
    n = len(labels_a)
    if n < 2:
        raise ValueError("need at least 2 items to compare partitions")

    _, a_codes = np.unique(np.asarray(labels_a, dtype=object), return_inverse=True)
    _, b_codes = np.unique(np.asarray(labels_b, dtype=object), return_inverse=True)
    n_a = int(a_codes.max()) + 1
    n_b = int(b_codes.max()) + 1
    contingency = np.zeros((n_a, n_b), dtype=np.int64)
    np.add.at(contingency, (a_codes, b_codes), 1)

    def comb2(x: np.ndarray) -> float:
        return float((x * (x - 1) // 2).sum())

    sum_cells = comb2(contingency)
    sum_rows = comb2(contingency.sum(axis=1))
    sum_cols = comb2(contingency.sum(axis=0))
    total = n * (n - 1) / 2
    expected = sum_rows * sum_cols / total
    max_index = (sum_rows + sum_cols) / 2
    if max_index == expected:
        # Both partitions trivial in the same way (all singletons / one block).
        return 1.0
    return (sum_cells - expected) / (max_index - expected)


def _mix_from_json(name: str, axis: str, entries) -> tuple[MixComponent, ...]:
    if not isinstance(entries, list):
        raise ConfigError(f"archetype {name!r}: {axis}_mix must be a list")
    mix = []
    for e in entries:
        try:
            mix.append(MixComponent(float(e["mean"]), float(e["std"]), float(e["weight"])))
        except (TypeError, KeyError, ValueError) as exc:
            raise ConfigError(f"archetype {name!r}: bad {axis} component {e!r}") from exc
    return tuple(mix)


def load_archetypes(source: str | Path) -> tuple[Archetype, ...]:
    """Read archetypes from their JSON file format (a list of objects)."""
    try:
        payload = json.loads(Path(source).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read archetype file {source}: {exc}") from exc
    if not isinstance(payload, list):
        raise ConfigError("archetype file must hold a JSON list")
    archetypes = []
    for entry in payload:
        name = entry.get("name") if isinstance(entry, dict) else None
        if not isinstance(name, str):
            raise ConfigError(f"archetype entry missing a name: {entry!r}")
        archetypes.append(
            Archetype(
                name,
                _mix_from_json(name, "arrival", entry.get("arrival_mix")),
                _mix_from_json(name, "duration", entry.get("duration_mix")),
            )
        )
    if not archetypes:
        raise ConfigError("archetype file holds no archetypes")
    return tuple(archetypes)


def write_archetypes(archetypes: Sequence[Archetype], dest: str | Path) -> None:
    payload = [
        {
            "name": a.name,
            "arrival_mix": [{"mean": c.mean, "std": c.std, "weight": c.weight} for c in a.arrival_mix],
            "duration_mix": [{"mean": c.mean, "std": c.std, "weight": c.weight} for c in a.duration_mix],
        }
        for a in archetypes
    ]
    Path(dest).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def write_ground_truth(truth: Mapping[str, str], dest: str | Path | IO[str]) -> None:
    """CSV ``station_id,archetype`` for scoring recovered clusterings."""
    own = isinstance(dest, (str, Path))
    stream = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(stream)
        writer.writerow(["station_id", "archetype"])
        for station_id in sorted(truth):
            writer.writerow([station_id, truth[station_id]])
    finally:
        if own:
            stream.close()
