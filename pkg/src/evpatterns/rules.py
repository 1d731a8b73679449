"""Rule-based charging patterns: band submatrices, thresholding, grouping.

Arrival hours and duration bins are partitioned into named bands (the
default: morning 4-10, noon 11-13, afternoon 14-16, evening 17-23 crossed
with short 0-5 and long 6-23 duration bins; night hours 0-3 belong to no
band). A station's pattern signature flags every band submatrix whose
probability mass strictly exceeds the threshold theta, and stations are
grouped by identical signatures.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError
from .matrix import N_DURATION_BINS, N_HOURS, ChargingMatrix

DEFAULT_THETA = 0.06
# Exploration grid used by the theta sweep.
DEFAULT_THETA_RANGE = (0.03, 0.15)


@dataclass(frozen=True)
class Band:
    name: str
    cells: frozenset[int]


@dataclass(frozen=True)
class BandScheme:
    """Named, disjoint hour bands and duration-bin bands."""

    arrival_bands: tuple[Band, ...]
    duration_bands: tuple[Band, ...]

    def __post_init__(self) -> None:
        _check_axis("arrival", self.arrival_bands, N_HOURS)
        _check_axis("duration", self.duration_bands, N_DURATION_BINS)

    @property
    def submatrix_names(self) -> list[str]:
        """Flag order: arrival band outer, duration band inner, scheme order."""
        return [
            f"{a.name}x{d.name}" for a in self.arrival_bands for d in self.duration_bands
        ]


def _check_axis(axis: str, bands: Sequence[Band], limit: int) -> None:
    if not bands:
        raise ConfigError(f"at least one {axis} band is required")
    seen: set[int] = set()
    for band in bands:
        if not band.cells:
            raise ConfigError(f"{axis} band {band.name!r} is empty")
        out = [c for c in band.cells if not 0 <= c < limit]
        if out:
            raise ConfigError(f"{axis} band {band.name!r} has out-of-range cells {sorted(out)}")
        overlap = seen & band.cells
        if overlap:
            raise ConfigError(f"{axis} band {band.name!r} overlaps earlier bands at {sorted(overlap)}")
        seen |= band.cells


DEFAULT_BAND_SCHEME = BandScheme(
    arrival_bands=(
        Band("morning", frozenset(range(4, 11))),
        Band("noon", frozenset(range(11, 14))),
        Band("afternoon", frozenset(range(14, 17))),
        Band("evening", frozenset(range(17, 24))),
    ),
    duration_bands=(
        Band("short", frozenset(range(0, 6))),
        Band("long", frozenset(range(6, 24))),
    ),
)


@dataclass(frozen=True)
class RuleConfig:
    scheme: BandScheme = DEFAULT_BAND_SCHEME
    theta: float = DEFAULT_THETA

    def __post_init__(self) -> None:
        if not 0.0 < self.theta < 1.0:
            raise ConfigError(f"theta must lie in (0, 1), got {self.theta}")


@dataclass(frozen=True, order=True)
class PatternSignature:
    """One boolean per band submatrix, ordered arrival-outer / duration-inner."""

    flags: tuple[bool, ...]

    def bitstring(self) -> str:
        return "".join("1" if f else "0" for f in self.flags)

    @classmethod
    def from_bitstring(cls, bits: str) -> "PatternSignature":
        return cls(tuple(c == "1" for c in bits))


def band_mass(A: ChargingMatrix, arrival_band: Iterable[int], duration_band: Iterable[int]) -> float:
    """Probability mass of the submatrix arrival_band x duration_band."""
    hours = sorted(arrival_band)
    bins = sorted(duration_band)
    return float(A.cells[np.ix_(hours, bins)].sum())


def signature(A: ChargingMatrix, cfg: RuleConfig = RuleConfig()) -> PatternSignature:
    """Flag each band submatrix whose mass strictly exceeds theta."""
    flags = tuple(
        band_mass(A, a.cells, d.cells) > cfg.theta
        for a in cfg.scheme.arrival_bands
        for d in cfg.scheme.duration_bands
    )
    return PatternSignature(flags)


def group_by_signature(
    labeled: Iterable[tuple[str, ChargingMatrix]], cfg: RuleConfig = RuleConfig()
) -> dict[PatternSignature, list[str]]:
    """Partition pools by identical pattern signature."""
    groups: dict[PatternSignature, list[str]] = {}
    for pool_id, m in labeled:
        groups.setdefault(signature(m, cfg), []).append(pool_id)
    return groups


def top_k_groups(
    groups: Mapping[PatternSignature, Sequence[str]], k: int
) -> list[tuple[PatternSignature, int]]:
    """Largest k groups, sorted by size descending; ties by signature flag order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    ranked = sorted(groups.items(), key=lambda item: (-len(item[1]), item[0]))
    return [(sig, len(ids)) for sig, ids in ranked[:k]]


def _band_from_json(axis: str, entry: dict) -> Band:
    cells = entry.get("hours", entry.get("bins"))
    if not isinstance(entry.get("name"), str) or cells is None:
        raise ConfigError(f"each {axis} band needs a name and an hours/bins list")
    try:
        return Band(entry["name"], frozenset(int(c) for c in cells))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{axis} band {entry.get('name')!r}: {exc}") from exc


def load_band_scheme(source: str | Path) -> BandScheme:
    """Read a band scheme from its JSON file format."""
    try:
        payload = json.loads(Path(source).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read band scheme {source}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("band scheme file must hold a JSON object")
    return BandScheme(
        arrival_bands=tuple(_band_from_json("arrival", e) for e in payload.get("arrival_bands", [])),
        duration_bands=tuple(_band_from_json("duration", e) for e in payload.get("duration_bands", [])),
    )


def write_band_scheme(scheme: BandScheme, dest: str | Path) -> None:
    payload = {
        "arrival_bands": [{"name": b.name, "hours": sorted(b.cells)} for b in scheme.arrival_bands],
        "duration_bands": [{"name": b.name, "bins": sorted(b.cells)} for b in scheme.duration_bands],
    }
    Path(dest).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def write_signatures_csv(
    labeled: Iterable[tuple[str, PatternSignature]], dest: str | Path | IO[str]
) -> None:
    """CSV ``pool_id,signature`` with the signature as a bitstring."""
    own = isinstance(dest, (str, Path))
    stream = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(stream)
        writer.writerow(["pool_id", "signature"])
        for pool_id, sig in labeled:
            writer.writerow([pool_id, sig.bitstring()])
    finally:
        if own:
            stream.close()


def write_groups_csv(
    groups: Mapping[PatternSignature, Sequence[str]], dest: str | Path | IO[str]
) -> None:
    """CSV ``signature,size,pool_ids`` sorted by size descending, then signature."""
    own = isinstance(dest, (str, Path))
    stream = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(stream)
        writer.writerow(["signature", "size", "pool_ids"])
        for sig, ids in sorted(groups.items(), key=lambda item: (-len(item[1]), item[0])):
            writer.writerow([sig.bitstring(), len(ids), ";".join(sorted(ids))])
    finally:
        if own:
            stream.close()
