"""Spatial pooling of co-located stations and transaction-level filters.

Stations closer than the merge radius are joined into pools (connected
components of the sub-radius proximity graph, i.e. transitive chaining),
long sessions are discarded, and pools with too few usable transactions
are dropped. The canonical order is: pooling, then the session-duration
discard, then the minimum-transaction filter, so the minimum counts only
usable transactions.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .ingest import Transaction

EARTH_RADIUS_M = 6_371_000.0

DEFAULT_MERGE_RADIUS_M = 30.0
DEFAULT_MIN_TRANSACTIONS = 30
DEFAULT_MAX_DURATION_HOURS = 24.0


@dataclass(frozen=True)
class StationSite:
    """A station's identity and representative (first observed) coordinate."""

    station_id: str
    latitude: float
    longitude: float


@dataclass
class StationPool:
    """A merged group of co-located stations and their transactions.

    pool_id is the lexicographically smallest member station_id.
    """

    pool_id: str
    members: frozenset[str]
    transactions: list[Transaction] = field(default_factory=list)

    @property
    def transaction_count(self) -> int:
        return len(self.transactions)


def haversine_distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle distance in meters between two (lat, lon) points in degrees."""
    lat1, lon1 = math.radians(a[0]), math.radians(a[1])
    lat2, lon2 = math.radians(b[0]), math.radians(b[1])
    d_lat = lat2 - lat1
    d_lon = lon2 - lon1
    h = math.sin(d_lat / 2.0) ** 2 + math.cos(lat1) * math.cos(lat2) * math.sin(d_lon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * math.asin(min(1.0, math.sqrt(h)))


def _pairwise_haversine(lat_deg: np.ndarray, lon_deg: np.ndarray) -> np.ndarray:
    """Dense n x n great-circle distance matrix in meters."""
    lat = np.radians(lat_deg)
    lon = np.radians(lon_deg)
    d_lat = lat[:, None] - lat[None, :]
    d_lon = lon[:, None] - lon[None, :]
    h = np.sin(d_lat / 2.0) ** 2 + np.cos(lat[:, None]) * np.cos(lat[None, :]) * np.sin(d_lon / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_M * np.arcsin(np.minimum(1.0, np.sqrt(h)))


def station_sites(txs: Iterable[Transaction]) -> list[StationSite]:
    """One site per distinct station_id, keeping the first observed coordinate."""
    sites: dict[str, StationSite] = {}
    for tx in txs:
        if tx.station_id not in sites:
            sites[tx.station_id] = StationSite(tx.station_id, tx.latitude, tx.longitude)
    return list(sites.values())


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def pool_stations(sites: Sequence[StationSite], radius: float = DEFAULT_MERGE_RADIUS_M) -> list[StationPool]:
    """Group sites into pools: connected components of the distance < radius graph.

    The comparison is strict, so two sites exactly radius apart stay separate.
    Pools come back sorted by pool_id with empty transaction lists; attach
    transactions with assign_transactions.
    """
    if radius <= 0:
        raise ValueError("merge radius must be positive")
    if not sites:
        return []

    # Sort by id first so component membership is independent of input order.
    ordered = sorted(sites, key=lambda s: s.station_id)
    lat = np.array([s.latitude for s in ordered])
    lon = np.array([s.longitude for s in ordered])
    dist = _pairwise_haversine(lat, lon)

    uf = _UnionFind(len(ordered))
    close = np.argwhere(dist < radius)
    for i, j in close:
        if i < j:
            uf.union(int(i), int(j))

    components: dict[int, list[str]] = {}
    for idx, site in enumerate(ordered):
        components.setdefault(uf.find(idx), []).append(site.station_id)

    pools = [
        StationPool(pool_id=min(ids), members=frozenset(ids)) for ids in components.values()
    ]
    pools.sort(key=lambda p: p.pool_id)
    return pools


def assign_transactions(pools: Sequence[StationPool], txs: Iterable[Transaction]) -> list[StationPool]:
    """Return new pools with each transaction attached to its station's pool."""
    by_station: dict[str, int] = {}
    for idx, pool in enumerate(pools):
        for member in pool.members:
            by_station[member] = idx
    buckets: list[list[Transaction]] = [[] for _ in pools]
    for tx in txs:
        idx = by_station.get(tx.station_id)
        if idx is not None:
            buckets[idx].append(tx)
    return [replace(pool, transactions=bucket) for pool, bucket in zip(pools, buckets)]


def discard_long_sessions(
    txs: Iterable[Transaction], limit: float = DEFAULT_MAX_DURATION_HOURS
) -> list[Transaction]:
    """Keep transactions strictly shorter than ``limit`` hours (>= limit is discarded)."""
    if limit <= 0:
        raise ValueError("duration limit must be positive")
    limit_seconds = limit * 3600.0
    return [tx for tx in txs if tx.duration < limit_seconds]


def filter_min_transactions(
    pools: Iterable[StationPool], min_count: int = DEFAULT_MIN_TRANSACTIONS
) -> list[StationPool]:
    """Keep pools with at least ``min_count`` transactions (exactly min_count survives)."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    return [p for p in pools if p.transaction_count >= min_count]


def prepare_pools(
    txs: Sequence[Transaction],
    merge_radius: float = DEFAULT_MERGE_RADIUS_M,
    min_count: int = DEFAULT_MIN_TRANSACTIONS,
    max_duration_hours: float = DEFAULT_MAX_DURATION_HOURS,
) -> list[StationPool]:
    """Full preprocessing chain: pool stations, discard long sessions, apply the minimum."""
    pools = assign_transactions(pool_stations(station_sites(txs), merge_radius), txs)
    pools = [
        replace(p, transactions=discard_long_sessions(p.transactions, max_duration_hours))
        for p in pools
    ]
    return filter_min_transactions(pools, min_count)


def write_pool_map(pools: Iterable[StationPool], dest: str | Path | IO[str]) -> None:
    """Write the pool membership map (CSV ``pool_id,station_id``)."""
    own = isinstance(dest, (str, Path))
    stream = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(stream)
        writer.writerow(["pool_id", "station_id"])
        for pool in pools:
            for station_id in sorted(pool.members):
                writer.writerow([pool.pool_id, station_id])
    finally:
        if own:
            stream.close()
