"""Independent reference implementations used as test oracles.

These deliberately share no code with the package: the clustering oracle
recomputes complete-linkage distances from leaf sets instead of updating a
working matrix, the geodesic oracle uses the spherical law of cosines
instead of the haversine form, and pooling is checked with a plain BFS.
"""

from __future__ import annotations

import itertools
import math

import numpy as np


def naive_complete_linkage(D: np.ndarray) -> list[tuple[int, int, float, int]]:
    """O(n^3) agglomeration from first principles.

    Returns (left, right, height, new_id) merge steps. At every step all
    current cluster pairs are scanned and the pair with the smallest maximum
    leaf-to-leaf distance is merged; ties fall to the smallest (first id,
    second id). Leaves are 0..n-1, step s creates node n+s.
    """
    n = len(D)
    clusters: dict[int, frozenset[int]] = {i: frozenset([i]) for i in range(n)}
    merges = []
    for step in range(n - 1):
        best = None
        for ia, ib in itertools.combinations(sorted(clusters), 2):
            d = max(D[x, y] for x in clusters[ia] for y in clusters[ib])
            if best is None or (d, ia, ib) < best:
                best = (d, ia, ib)
        d, ia, ib = best
        new_id = n + step
        clusters[new_id] = clusters.pop(ia) | clusters.pop(ib)
        merges.append((ia, ib, float(d), new_id))
    return merges


def naive_cut(merges: list[tuple[int, int, float, int]], n: int, k: int) -> set[frozenset[int]]:
    """Partition of leaves after applying only the first n - k merges."""
    components: dict[int, frozenset[int]] = {i: frozenset([i]) for i in range(n)}
    for left, right, _height, new_id in merges[: n - k]:
        components[new_id] = components.pop(left) | components.pop(right)
    return set(components.values())


def law_of_cosines_distance(a: tuple[float, float], b: tuple[float, float]) -> float:
    """Great-circle meters via the spherical law of cosines (radius 6371 km)."""
    phi1, phi2 = math.radians(a[0]), math.radians(b[0])
    d_lambda = math.radians(b[1] - a[1])
    cos_angle = math.sin(phi1) * math.sin(phi2) + math.cos(phi1) * math.cos(phi2) * math.cos(d_lambda)
    return 6_371_000.0 * math.acos(max(-1.0, min(1.0, cos_angle)))


def normal_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def analytic_cell_distribution(arch) -> np.ndarray:
    """Exact 24x24 cell probabilities of an archetype via normal CDFs.

    Arrival-hour mass sums the wrapped normal over +-4 day wraps; duration
    mass renormalizes the truncation window [0, 24). Axes are independent,
    so the joint distribution is the outer product.
    """
    hour_p = np.zeros(24)
    for c in arch.arrival_mix:
        for i in range(24):
            if c.std == 0:
                hour_p[i] += c.weight * (1.0 if int(c.mean) == i else 0.0)
                continue
            for wrap in range(-4, 5):
                lo = (i + 24 * wrap - c.mean) / c.std
                hi = (i + 1 + 24 * wrap - c.mean) / c.std
                hour_p[i] += c.weight * (normal_cdf(hi) - normal_cdf(lo))
    dur_p = np.zeros(24)
    for c in arch.duration_mix:
        if c.std == 0:
            dur_p[int(c.mean)] += c.weight
            continue
        z = normal_cdf((24 - c.mean) / c.std) - normal_cdf((0 - c.mean) / c.std)
        for j in range(24):
            lo = (j - c.mean) / c.std
            hi = (j + 1 - c.mean) / c.std
            dur_p[j] += c.weight * (normal_cdf(hi) - normal_cdf(lo)) / z
    return np.outer(hour_p, dur_p)


def bfs_components(points: list[tuple[float, float]], radius: float) -> set[frozenset[int]]:
    """Connected components of the distance < radius graph, by plain BFS."""
    n = len(points)
    seen = [False] * n
    components = set()
    for start in range(n):
        if seen[start]:
            continue
        queue, members = [start], []
        seen[start] = True
        while queue:
            i = queue.pop()
            members.append(i)
            for j in range(n):
                if not seen[j] and law_of_cosines_distance(points[i], points[j]) < radius:
                    seen[j] = True
                    queue.append(j)
        components.add(frozenset(members))
    return components
