"""Query ranking: Euclidean distance, min-of-mins signature distance, thresholding.

The distance between two signatures is directional: for each query
centroid take the Euclidean distance to the nearest target centroid, then
average those minima over the query's k centroids.  Weights are ignored.
Swapping query and target can change the result, which is intended; a
query whose centroids all coincide with some target centroid scores 0
regardless of the rest of the target.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signature import ImageSignature, SignatureIndex


@dataclass(frozen=True)
class RankedMatch:
    image_id: str
    distance: float


def euclidean(p, q) -> float:
    """sqrt of the summed squared component differences."""
    a = np.asarray(p, dtype=np.float64).ravel()
    b = np.asarray(q, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape[0]} vs {b.shape[0]}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def signature_distance(query: ImageSignature, target: ImageSignature) -> float:
    """Average, over query centroids, of the distance to the nearest target centroid."""
    if query.k != target.k:
        raise ValueError(f"cluster count mismatch: query k={query.k}, target k={target.k}")
    if query.dims != target.dims:
        raise ValueError(
            f"dimensionality mismatch: query dims={query.dims}, target dims={target.dims}"
        )
    diff = query.centroids[:, None, :] - target.centroids[None, :, :]
    pairwise = np.sqrt(np.sum(diff**2, axis=2))
    return float(pairwise.min(axis=1).sum() / query.k)


def rank(query: ImageSignature, index: SignatureIndex, top_n: int | None = None) -> list[RankedMatch]:
    """All index entries sorted by ascending distance; exact ties sort by imageId."""
    if top_n is not None and top_n < 1:
        raise ValueError(f"top_n must be >= 1, got {top_n}")
    matches = [
        RankedMatch(image_id=entry.image_id, distance=signature_distance(query, entry))
        for entry in index.entries
    ]
    matches.sort(key=lambda m: (m.distance, m.image_id))
    return matches[:top_n] if top_n is not None else matches


def filter_by_threshold(matches, threshold: float) -> list[RankedMatch]:
    """Keep matches with distance <= threshold, preserving order."""
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    return [m for m in matches if m.distance <= threshold]
