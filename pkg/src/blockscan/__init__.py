"""blockscan: query-by-example image retrieval over block color/texture signatures.

Each image is partitioned into 4x4 blocks, every block becomes a
six-component feature vector (HSV color plus Haar detail-band energies),
the vectors are k-means clustered into the image's "object" centroids,
and images are ranked by a min-of-mins averaged Euclidean distance
between centroid sets.
"""

__version__ = "0.1.0"

from .clustering import (
    ClusterParams,
    ClusterResult,
    InsufficientPointsError,
    SplitMix64,
    assign_points,
    init_centroids,
    kmeans,
    update_centroids,
)
from .features import (
    FEATURE_DIMS,
    FEATURE_NAMES,
    FeatureVector,
    HaarBands,
    band_energy,
    extract_features,
    feature_matrix,
    haar_transform_block,
    pixel_value,
    rgb_to_hsv,
)
from .imaging import (
    BLOCK_SIZE,
    Block,
    BlockGrid,
    ImageDimensionError,
    PpmDecodeError,
    RasterImage,
    decode_ppm,
    encode_ppm,
    partition_blocks,
)
from .pipeline import build_index, image_signature, signature_from_ppm
from .retrieval import RankedMatch, euclidean, filter_by_threshold, rank, signature_distance
from .signature import (
    ImageSignature,
    IndexFormatError,
    SignatureIndex,
    build_signature,
    load_index,
    save_index,
)

__all__ = [
    "__version__",
    "BLOCK_SIZE",
    "FEATURE_DIMS",
    "FEATURE_NAMES",
    "Block",
    "BlockGrid",
    "ClusterParams",
    "ClusterResult",
    "FeatureVector",
    "HaarBands",
    "ImageDimensionError",
    "ImageSignature",
    "IndexFormatError",
    "InsufficientPointsError",
    "PpmDecodeError",
    "RankedMatch",
    "RasterImage",
    "SignatureIndex",
    "SplitMix64",
    "assign_points",
    "band_energy",
    "build_index",
    "build_signature",
    "decode_ppm",
    "encode_ppm",
    "euclidean",
    "extract_features",
    "feature_matrix",
    "filter_by_threshold",
    "haar_transform_block",
    "image_signature",
    "init_centroids",
    "kmeans",
    "load_index",
    "partition_blocks",
    "pixel_value",
    "rank",
    "rgb_to_hsv",
    "save_index",
    "signature_distance",
    "signature_from_ppm",
    "update_centroids",
]
