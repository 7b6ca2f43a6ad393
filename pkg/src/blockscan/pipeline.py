"""End-to-end helpers shared by the CLI and the HTTP service.

decode -> partition -> features -> k-means -> canonical signature.  Query
signatures must be computed by this same pipeline with the same k and
seed as the index build, otherwise self-retrieval at distance zero does
not hold.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .clustering import ClusterParams, kmeans
from .features import FEATURE_DIMS, feature_matrix
from .imaging import RasterImage, decode_ppm, partition_blocks
from .signature import ImageSignature, SignatureIndex, build_signature


def image_signature(
    image: RasterImage,
    image_id: str,
    *,
    k: int = 3,
    seed: int = 0,
) -> ImageSignature:
    """Cluster an image's block features into its canonical signature."""
    grid = partition_blocks(image)
    vectors = feature_matrix(grid)
    points = np.array([fv.as_array() for fv in vectors])
    result = kmeans(points, ClusterParams(k=k, seed=seed))
    return build_signature(image_id, result)


def signature_from_ppm(data: bytes, image_id: str, *, k: int = 3, seed: int = 0) -> ImageSignature:
    """Decode PPM bytes and compute the signature in one step."""
    return image_signature(decode_ppm(data), image_id, k=k, seed=seed)


def build_index(
    images: Iterable[tuple[str, RasterImage]],
    *,
    k: int = 3,
    seed: int = 0,
) -> SignatureIndex:
    """Index the given (imageId, image) pairs in the order supplied."""
    entries = [image_signature(image, image_id, k=k, seed=seed) for image_id, image in images]
    return SignatureIndex(k=k, dims=FEATURE_DIMS, entries=entries)
