"""Seeded k-means over block feature vectors.

The clusterer is deliberately self-contained and bit-reproducible:
initialization is k-means++ driven by a splitmix64 generator (a published
64-bit add/xor/multiply sequence), assignment breaks ties toward the
lowest cluster label, means are computed in a fixed summation order, and
empty clusters are repaired by a deterministic farthest-point seizure.
Identical points and parameters therefore always produce an identical
ClusterResult, which is what keeps stored signatures stable across runs
and machines.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_MASK64 = (1 << 64) - 1


class InsufficientPointsError(ValueError):
    """Fewer points than requested clusters."""


class SplitMix64:
    """splitmix64 PRNG; fixed here so every build of an index agrees bit-for-bit.

    State advances by the 64-bit golden-gamma constant; outputs are mixed
    with two multiply/xor-shift rounds.  ``next_float`` maps the top 53
    bits onto [0, 1).
    """

    def __init__(self, seed: int):
        self._state = seed & _MASK64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _MASK64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53


@dataclass(frozen=True)
class ClusterParams:
    k: int = 3
    seed: int = 0
    max_iterations: int = 100
    tolerance: float = 1e-9  # stop once no centroid moves this far in an iteration

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {self.seed}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if self.tolerance < 0:
            raise ValueError(f"tolerance must be >= 0, got {self.tolerance}")


@dataclass(frozen=True)
class ClusterResult:
    centroids: np.ndarray  # (k, dims) float64
    labels: np.ndarray  # (n,) int64, cluster label per point
    counts: np.ndarray  # (k,) int64, members per cluster (always >= 1)
    objective: float  # sum of squared distances to assigned centroids
    iterations: int  # assign/update rounds executed
    history: tuple = ()  # objective after each round, non-increasing


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts.reshape(-1, 1)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError(f"points must be a non-empty (n, dims) array, got shape {pts.shape}")
    return pts


def init_centroids(points, params: ClusterParams) -> np.ndarray:
    """Deterministic k-means++ seeding.

    The first center is drawn uniformly; every later center is drawn with
    probability proportional to its squared distance to the nearest
    already-chosen center.  All randomness comes from splitmix64(seed),
    so the same points and seed always select the same rows.
    """
    pts = _as_points(points)
    n = pts.shape[0]
    if n < params.k:
        raise InsufficientPointsError(f"need at least {params.k} points, got {n}")
    rng = SplitMix64(params.seed)
    first = int(rng.next_float() * n)
    chosen = [first]
    d2 = np.sum((pts - pts[first]) ** 2, axis=1)
    while len(chosen) < params.k:
        total = float(d2.sum())
        if total > 0.0:
            r = rng.next_float() * total
            cum = np.cumsum(d2)
            idx = int(np.searchsorted(cum, r, side="right"))
            if idx >= n or d2[idx] == 0.0:
                # r rounded up to the total; fall back to the last positive weight
                idx = int(np.nonzero(d2 > 0.0)[0][-1])
        else:
            # every point coincides with a chosen center: lowest unchosen index
            taken = set(chosen)
            idx = next(i for i in range(n) if i not in taken)
        chosen.append(idx)
        d2 = np.minimum(d2, np.sum((pts - pts[idx]) ** 2, axis=1))
    return pts[chosen].copy()


def assign_points(points, centroids) -> np.ndarray:
    """Label each point with its nearest centroid; exact ties take the lowest label."""
    pts = _as_points(points)
    cents = _as_points(centroids)
    if cents.shape[1] != pts.shape[1]:
        raise ValueError(
            f"dimension mismatch: points have {pts.shape[1]} components, "
            f"centroids have {cents.shape[1]}"
        )
    d2 = np.sum((pts[:, None, :] - cents[None, :, :]) ** 2, axis=2)
    return np.argmin(d2, axis=1)  # argmin returns the first minimum, i.e. lowest label


def _update_with_repair(pts: np.ndarray, labels: np.ndarray, k: int):
    """Recompute means; repair empty clusters by farthest-point seizure.

    An empty cluster seizes the point farthest from its centroid in the
    most populous cluster (lowest indexes win all ties).  Requires
    n >= k, which guarantees a donor with at least two members exists.
    Returns (centroids, counts, labels) with labels copied, not mutated.
    """
    labels = labels.copy()
    counts = np.bincount(labels, minlength=k).astype(np.int64)
    centroids = np.zeros((k, pts.shape[1]), dtype=np.float64)
    for c in range(k):
        if counts[c] > 0:
            centroids[c] = pts[labels == c].mean(axis=0)
    while True:
        empty = np.flatnonzero(counts == 0)
        if empty.size == 0:
            break
        target = int(empty[0])
        donor = int(np.argmax(counts))
        members = np.flatnonzero(labels == donor)
        dists = np.sum((pts[members] - centroids[donor]) ** 2, axis=1)
        seized = int(members[int(np.argmax(dists))])
        labels[seized] = target
        counts[donor] -= 1
        counts[target] = 1
        centroids[target] = pts[seized]
        centroids[donor] = pts[labels == donor].mean(axis=0)
    return centroids, counts, labels


def update_centroids(points, labels, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Mean of each cluster's points, with empty clusters repaired.

    Returns (centroids, counts); counts always sum to len(points) with
    every entry >= 1 when len(points) >= k.
    """
    pts = _as_points(points)
    labels = np.asarray(labels, dtype=np.int64)
    if labels.shape != (pts.shape[0],):
        raise ValueError(f"labels shape {labels.shape} does not match {pts.shape[0]} points")
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise ValueError(f"labels must lie in [0, {k})")
    centroids, counts, _ = _update_with_repair(pts, labels, k)
    return centroids, counts


def _sse(pts: np.ndarray, centroids: np.ndarray, labels: np.ndarray) -> float:
    return float(np.sum((pts - centroids[labels]) ** 2))


def kmeans(points, params: ClusterParams | None = None) -> ClusterResult:
    """Lloyd iteration from k-means++ seeding until centroids stop moving.

    Alternates assignment and mean updates until the maximum centroid
    displacement falls below ``params.tolerance`` with stable labels, or
    ``params.max_iterations`` rounds have run.  The recorded per-round
    objective never increases (mean updates and the empty-cluster repair
    both only lower it).  Converged results are assign/update fixed
    points.
    """
    if params is None:
        params = ClusterParams()
    pts = _as_points(points)
    if not np.isfinite(pts).all():
        raise ValueError("points contain non-finite components")
    if pts.shape[0] < params.k:
        raise InsufficientPointsError(
            f"need at least {params.k} points, got {pts.shape[0]}"
        )
    centroids = init_centroids(pts, params)
    labels = assign_points(pts, centroids)
    history: list[float] = []
    counts = np.zeros(params.k, dtype=np.int64)
    iterations = 0
    converged = False
    for _ in range(params.max_iterations):
        new_centroids, counts, labels = _update_with_repair(pts, labels, params.k)
        iterations += 1
        shift = float(np.max(np.sqrt(np.sum((new_centroids - centroids) ** 2, axis=1))))
        centroids = new_centroids
        reassigned = assign_points(pts, centroids)
        history.append(_sse(pts, centroids, reassigned))
        if shift < params.tolerance and np.array_equal(reassigned, labels):
            converged = True
            break
        labels = reassigned
    if not converged:
        # iteration cap hit after a fresh assignment: restore label/mean consistency
        centroids, counts, labels = _update_with_repair(pts, labels, params.k)
    return ClusterResult(
        centroids=centroids,
        labels=labels,
        counts=counts,
        objective=_sse(pts, centroids, labels),
        iterations=iterations,
        history=tuple(history),
    )
