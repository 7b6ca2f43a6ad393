"""Canonical per-image signatures and the searchable index file.

A signature is an image's k cluster centroids plus their member counts,
sorted lexicographically over the feature components (member count as the
final tie key) so that two clusterings differing only in label order
serialize identically.

Index file format (UTF-8, LF line endings, single-space separated):

    CBIRIDX 1
    k 3
    dims 6
    image <imageId> <blockCount>
    centroid <weight> <c0> <c1> ... <c{dims-1}>

One ``image`` line followed by exactly k ``centroid`` lines per entry.
Floats are written with ``repr`` (shortest round-trip form), so a
save/load cycle is bit-exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isfinite

import numpy as np

from .clustering import ClusterResult

FORMAT_MAGIC = "CBIRIDX"
FORMAT_VERSION = 1
FEATURE_LAYOUT_DIMS = 6  # the standard h/s/v/hl/lh/hh layout; range checks apply to it only


class IndexFormatError(ValueError):
    """Index bytes violate the format; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


def _validate_image_id(image_id: str) -> None:
    if not isinstance(image_id, str) or not image_id:
        raise ValueError("imageId must be a non-empty string")
    if any(ch.isspace() or ord(ch) < 32 or ord(ch) == 127 for ch in image_id):
        raise ValueError(
            f"imageId must not contain whitespace or control characters: {image_id!r}"
        )


@dataclass(frozen=True)
class ImageSignature:
    """Canonicalized cluster centroids of one image."""

    image_id: str
    centroids: np.ndarray  # (k, dims) float64, lexicographically sorted
    weights: np.ndarray  # (k,) int64 member counts, co-sorted with centroids
    block_count: int

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def dims(self) -> int:
        return self.centroids.shape[1]


@dataclass
class SignatureIndex:
    """Ordered collection of signatures sharing one k and dimensionality."""

    k: int
    dims: int
    entries: list = field(default_factory=list)  # list[ImageSignature]
    version: int = FORMAT_VERSION


def build_signature(image_id: str, result: ClusterResult) -> ImageSignature:
    """Canonicalize a clustering into a signature.

    Centroids are sorted lexicographically component by component, with
    the member count as the least-significant key so even duplicate
    centroids order deterministically; weights are permuted in lockstep.
    """
    _validate_image_id(image_id)
    centroids = np.asarray(result.centroids, dtype=np.float64)
    weights = np.asarray(result.counts, dtype=np.int64)
    keys = (weights,) + tuple(centroids[:, c] for c in range(centroids.shape[1] - 1, -1, -1))
    order = np.lexsort(keys)
    return ImageSignature(
        image_id=image_id,
        centroids=centroids[order].copy(),
        weights=weights[order].copy(),
        block_count=int(weights.sum()),
    )


def _row_lex_leq(a: np.ndarray, b: np.ndarray) -> bool:
    for x, y in zip(a, b):
        if x < y:
            return True
        if x > y:
            return False
    return True


def _validate_entry(entry: ImageSignature, k: int, dims: int, line: int | None = None) -> None:
    def fail(msg: str):
        raise IndexFormatError(f"image {entry.image_id}: {msg}", line)

    try:
        _validate_image_id(entry.image_id)
    except ValueError as exc:
        raise IndexFormatError(str(exc), line) from None
    if entry.centroids.shape != (k, dims):
        fail(f"expected {k} centroids of {dims} components, got shape {entry.centroids.shape}")
    if entry.weights.shape != (k,):
        fail(f"expected {k} weights, got shape {entry.weights.shape}")
    if not np.isfinite(entry.centroids).all():
        fail("centroid components must be finite")
    if (entry.weights < 1).any():
        fail("every weight must be >= 1")
    if int(entry.weights.sum()) != entry.block_count:
        fail(f"weights sum to {int(entry.weights.sum())}, blockCount is {entry.block_count}")
    for i in range(k - 1):
        if not _row_lex_leq(entry.centroids[i], entry.centroids[i + 1]):
            fail("centroids are not in canonical lexicographic order")
    if dims == FEATURE_LAYOUT_DIMS:
        hsv = entry.centroids[:, :3]
        if (hsv < 0.0).any() or (hsv > 1.0).any():
            fail("h, s, v components must lie in [0, 1]")


def validate_index(index: SignatureIndex) -> None:
    """Check every structural invariant; raises IndexFormatError on the first failure."""
    if index.version != FORMAT_VERSION:
        raise IndexFormatError(f"unsupported version {index.version}")
    if index.k < 1 or index.dims < 1:
        raise IndexFormatError(f"k and dims must be >= 1, got k={index.k} dims={index.dims}")
    seen: set[str] = set()
    for entry in index.entries:
        if entry.image_id in seen:
            raise IndexFormatError(f"duplicate imageId {entry.image_id}")
        seen.add(entry.image_id)
        _validate_entry(entry, index.k, index.dims)


def save_index(index: SignatureIndex) -> bytes:
    """Serialize to the line-oriented text format; floats keep full round-trip precision."""
    validate_index(index)
    lines = [
        f"{FORMAT_MAGIC} {index.version}",
        f"k {index.k}",
        f"dims {index.dims}",
    ]
    for entry in index.entries:
        lines.append(f"image {entry.image_id} {entry.block_count}")
        for weight, row in zip(entry.weights, entry.centroids):
            coords = " ".join(repr(float(x)) for x in row)
            lines.append(f"centroid {int(weight)} {coords}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def _parse_int(token: str, what: str, line: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise IndexFormatError(f"malformed {what}: {token!r}", line) from None


def _parse_float(token: str, line: int) -> float:
    try:
        value = float(token)
    except ValueError:
        raise IndexFormatError(f"malformed centroid component: {token!r}", line) from None
    if not isfinite(value):
        raise IndexFormatError(f"non-finite centroid component: {token!r}", line)
    return value


def load_index(data: bytes) -> SignatureIndex:
    """Parse and validate the text format produced by save_index.

    Rejects unknown versions, malformed lines (with their line number),
    duplicate image ids, wrong centroid counts, and weight sums that do
    not match the declared block count.
    """
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise IndexFormatError(f"index is not valid UTF-8: {exc}") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 3:
        raise IndexFormatError("incomplete header: expected magic, k and dims lines")

    head = lines[0].split(" ")
    if len(head) != 2 or head[0] != FORMAT_MAGIC:
        raise IndexFormatError(f"bad magic line: {lines[0]!r}", 1)
    version = _parse_int(head[1], "version", 1)
    if version != FORMAT_VERSION:
        raise IndexFormatError(f"unsupported version {version}", 1)

    k_line = lines[1].split(" ")
    if len(k_line) != 2 or k_line[0] != "k":
        raise IndexFormatError(f"expected 'k <count>', got {lines[1]!r}", 2)
    k = _parse_int(k_line[1], "k", 2)

    dims_line = lines[2].split(" ")
    if len(dims_line) != 2 or dims_line[0] != "dims":
        raise IndexFormatError(f"expected 'dims <count>', got {lines[2]!r}", 3)
    dims = _parse_int(dims_line[1], "dims", 3)
    if k < 1 or dims < 1:
        raise IndexFormatError(f"k and dims must be >= 1, got k={k} dims={dims}", 2)

    entries: list[ImageSignature] = []
    seen: set[str] = set()
    lineno = 4
    while lineno <= len(lines):
        tokens = lines[lineno - 1].split(" ")
        if tokens[0] != "image" or len(tokens) != 3:
            raise IndexFormatError(f"expected 'image <id> <blockCount>', got {lines[lineno - 1]!r}", lineno)
        image_id = tokens[1]
        if image_id in seen:
            raise IndexFormatError(f"duplicate imageId {image_id}", lineno)
        seen.add(image_id)
        block_count = _parse_int(tokens[2], "blockCount", lineno)
        image_line = lineno
        lineno += 1
        centroids = np.empty((k, dims), dtype=np.float64)
        weights = np.empty(k, dtype=np.int64)
        for row in range(k):
            if lineno > len(lines) or not lines[lineno - 1].startswith("centroid "):
                raise IndexFormatError(
                    f"image {image_id}: expected {k} centroid lines, got {row}", image_line
                )
            parts = lines[lineno - 1].split(" ")
            if len(parts) != 2 + dims:
                raise IndexFormatError(
                    f"centroid line needs weight plus {dims} components, got {len(parts) - 1} fields",
                    lineno,
                )
            weights[row] = _parse_int(parts[1], "weight", lineno)
            for c in range(dims):
                centroids[row, c] = _parse_float(parts[2 + c], lineno)
            lineno += 1
        entry = ImageSignature(
            image_id=image_id,
            centroids=centroids,
            weights=weights,
            block_count=block_count,
        )
        _validate_entry(entry, k, dims, line=image_line)
        entries.append(entry)

    return SignatureIndex(k=k, dims=dims, entries=entries, version=version)
