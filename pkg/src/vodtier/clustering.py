"""One-dimensional k-means over GOP view estimates and the cluster-to-tier map.

Data are sorted once; a 1-D assignment is then fully described by the
``k - 1`` midpoints between sorted centroids, so each Lloyd step costs
``O(k log n)`` through ``searchsorted`` and prefix sums.
"""
from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass

import numpy as np

_TINY = np.finfo(float).tiny


@dataclass(frozen=True)
class KMeansConfig:
    k: int = 4
    seed: int = 0
    tol: float = 1e-6
    max_iter: int = 100
    n_init: int = 20


@dataclass(frozen=True)
class ClusterResult:
    """Clusters are numbered by descending centroid: cluster 0 is the hottest."""

    assignments: np.ndarray
    centroids: np.ndarray
    iterations: int
    wcss: float
    wcss_history: tuple[float, ...] = ()

    @property
    def k(self) -> int:
        return self.centroids.size

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.assignments, minlength=self.k)


def wcss(values, assignments, centroids) -> float:
    values = np.asarray(values, dtype=np.float64)
    return float(np.sum((values - np.asarray(centroids)[assignments]) ** 2))


def _kmeanspp(x, k, rng):
    centers = [x[rng.integers(x.size)]]
    d2 = (x - centers[0]) ** 2
    for _ in range(1, k):
        total = d2.sum()
        if total <= 0:
            break
        idx = min(int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right")), x.size - 1)
        centers.append(x[idx])
        d2 = np.minimum(d2, (x - x[idx]) ** 2)
    return sorted(float(v) for v in centers)


# The loops below run on Python floats and lists: k is tiny, and numpy's
# per-call overhead on length-4 arrays dominates otherwise.

def _bounds(xs, c):
    # midpoint ties go to the higher centroid (the cheaper-index tier)
    n = len(xs)
    return [0] + [bisect_left(xs, (lo + hi) / 2.0) for lo, hi in zip(c, c[1:])] + [n]


def _seg_wcss(cs, cs2, b):
    total = 0.0
    for lo, hi in zip(b, b[1:]):
        if hi > lo:
            s1 = cs[hi] - cs[lo]
            total += (cs2[hi] - cs2[lo]) - s1 * s1 / (hi - lo)
    return total


def _reseed(xs, c, b, empty):
    """Move empty clusters onto the points farthest from their centroids."""
    dist = []
    for i, (lo, hi) in enumerate(zip(b, b[1:])):
        dist.extend((abs(xs[p] - c[i]), -p) for p in range(lo, hi))
    dist.sort(reverse=True)
    taken = {c[i] for i in range(len(c)) if i not in empty}
    it = iter(dist)
    for e in empty:
        for _, negp in it:
            if xs[-negp] not in taken:
                c[e] = xs[-negp]
                taken.add(c[e])
                break
    return sorted(c)


def _lloyd(xs, cs, cs2, c, tol, max_iter):
    history = []
    it = 0
    b = _bounds(xs, c)
    for it in range(1, max_iter + 1):
        new = []
        empty = []
        for i, (lo, hi) in enumerate(zip(b, b[1:])):
            if hi > lo:
                new.append((cs[hi] - cs[lo]) / (hi - lo))
            else:
                new.append(c[i])
                empty.append(i)
        if empty:
            new = _reseed(xs, new, b, empty)
        converged = not empty and all(
            abs(a - o) <= tol * max(abs(o), _TINY) for a, o in zip(new, c))
        c = new
        b = _bounds(xs, c)
        history.append(_seg_wcss(cs, cs2, b))
        if converged:
            break
    return c, it, history


def _hartigan(xs, cs, c, max_moves):
    """Single-point transfers between neighbouring clusters while WCSS drops.

    Fixed points of this are a subset of Lloyd's, so it only ever escapes
    local optima that Lloyd's iteration cannot see.
    """
    b = _bounds(xs, c)
    moves = 0
    changed = True
    while changed and moves < max_moves:
        changed = False
        for i in range(len(c) - 1):
            for direction in (1, -1):
                # 1: last point of cluster i moves up; -1: first point of i+1 moves down
                src, dst = (i, i + 1) if direction == 1 else (i + 1, i)
                ns, nd = b[src + 1] - b[src], b[dst + 1] - b[dst]
                if ns <= 1:
                    continue
                p = xs[b[i + 1] - 1] if direction == 1 else xs[b[i + 1]]
                ms = (cs[b[src + 1]] - cs[b[src]]) / ns
                md = (cs[b[dst + 1]] - cs[b[dst]]) / nd if nd else p
                gain = ns / (ns - 1) * (p - ms) ** 2 - nd / (nd + 1) * (p - md) ** 2
                if gain > 1e-12 * (p * p + ms * ms + md * md):
                    b[i + 1] -= direction
                    moves += 1
                    changed = True
    c = [(cs[hi] - cs[lo]) / (hi - lo) for lo, hi in zip(b, b[1:])]
    return c, moves


def kmeans_1d(values, k: int = 4, seed: int = 0, tol: float = 1e-6,
              max_iter: int = 100, n_init: int = 20) -> ClusterResult:
    """Lloyd's k-means on scalars with deterministic k-means++ restarts.

    ``k`` collapses to the number of distinct values when there are fewer.
    The best of ``n_init`` seeded restarts (lowest WCSS) is returned, with
    centroids in descending order.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("values must be a non-empty 1-D sequence")
    if k < 1:
        raise ValueError("k must be >= 1")
    if not np.all(np.isfinite(values)):
        raise ValueError("values must be finite")
    order = np.argsort(values, kind="stable")
    x = values[order]
    k = min(k, int(np.count_nonzero(np.diff(x)) + 1))
    xs = x.tolist()
    cs = [0.0] + np.cumsum(x).tolist()
    cs2 = [0.0] + np.cumsum(x * x).tolist()

    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, n_init) if k > 1 else 1):
        c, it, hist = _lloyd(xs, cs, cs2, _kmeanspp(x, k, rng), tol, max_iter)
        for _ in range(max_iter):
            refined, moves = _hartigan(xs, cs, c, max_moves=len(xs) * k)
            if moves == 0:
                break
            c, more, h = _lloyd(xs, cs, cs2, refined, tol, max_iter)
            it += more
            hist += h
        score = hist[-1]
        if best is None or score < best[0]:
            best = (score, c, it, hist)

    _, c, it, hist = best
    b = _bounds(xs, c)
    # label 0 = highest centroid
    sorted_labels = np.repeat(np.arange(len(c) - 1, -1, -1), np.diff(b))
    assignments = np.empty(values.size, dtype=np.int64)
    assignments[order] = sorted_labels
    desc = np.array(c[::-1])
    return ClusterResult(assignments, desc, it, wcss(values, assignments, desc), tuple(hist))


def map_clusters_to_tiers(result: ClusterResult) -> np.ndarray:
    """Tier (1 = hottest) for each cluster index.

    Highest centroid gets tier 1.  Equal centroids are ordered by cluster
    size (larger first), then by cluster index.
    """
    cents = np.asarray(result.centroids, dtype=np.float64)
    sizes = np.bincount(np.asarray(result.assignments), minlength=cents.size)
    rank = sorted(range(cents.size), key=lambda i: (-cents[i], -sizes[i], i))
    tiers = np.empty(cents.size, dtype=np.int64)
    tiers[rank] = np.arange(1, cents.size + 1)
    return tiers
