"""PPM decoding/encoding and the 4x4 block partition.

Images enter the engine as PPM files (binary ``P6`` or ASCII ``P3``,
maxval 255) and are reduced to a grid of 4x4 blocks.  Each block keeps two
things: the per-channel mean of its 16 pixels (input to the color
features) and the 16 per-pixel value-channel intensities (input to the
wavelet texture features).  Averaging alone would erase all
high-frequency content, so the original intensities must survive the
block step.

All functions here are pure; distinct images may be processed
concurrently without synchronization.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

BLOCK_SIZE = 4

_WHITESPACE = b" \t\n\r\x0b\x0c"
_HASH = 0x23  # '#'


class PpmDecodeError(ValueError):
    """PPM bytes could not be decoded; the message names the bad field or byte offset."""


class ImageDimensionError(ValueError):
    """Image too small for the 4x4 block partition."""


@dataclass(frozen=True)
class RasterImage:
    """Decoded 8-bit RGB image.

    ``pixels`` is a ``(height, width, 3)`` uint8 array in row-major order,
    top-left pixel first.
    """

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(
                f"image dimensions must be positive, got {self.width}x{self.height}"
            )
        if self.pixels.dtype != np.uint8:
            raise ValueError(f"pixels must be uint8, got {self.pixels.dtype}")
        if self.pixels.shape != (self.height, self.width, 3):
            raise ValueError(
                f"pixels shape {self.pixels.shape} does not match "
                f"{self.height}x{self.width}x3"
            )


@dataclass(frozen=True)
class Block:
    """One 4x4 tile: mean RGB plus the per-pixel value-channel intensities."""

    avg_rgb: np.ndarray  # (3,) float64, per-channel mean of the 16 source pixels
    intensity: np.ndarray  # (4, 4) float64, max(r,g,b)/255 per pixel, in [0, 1]


@dataclass(frozen=True)
class BlockGrid:
    """Row-major sequence of blocks covering the truncated image."""

    block_cols: int
    block_rows: int
    blocks: list  # list[Block], row-major


def _next_token(data: bytes, pos: int, field: str) -> tuple[bytes, int]:
    """Skip whitespace and '#' comments, then read one header token."""
    n = len(data)
    while pos < n:
        c = data[pos]
        if c in _WHITESPACE:
            pos += 1
        elif c == _HASH:
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
        else:
            break
    if pos >= n:
        raise PpmDecodeError(f"unexpected end of data reading {field} at byte {pos}")
    start = pos
    while pos < n and data[pos] not in _WHITESPACE and data[pos] != _HASH:
        pos += 1
    return data[start:pos], pos


def _int_token(data: bytes, pos: int, field: str) -> tuple[int, int]:
    token, end = _next_token(data, pos, field)
    if not token.isdigit():
        raise PpmDecodeError(f"malformed {field} token {token!r} at byte {end - len(token)}")
    return int(token), end


def decode_ppm(data: bytes) -> RasterImage:
    """Decode a binary (P6) or ASCII (P3) PPM with maxval 255.

    The header is ``magic width height maxval`` with arbitrary whitespace
    and ``#`` comments between tokens.  For P6 exactly one whitespace byte
    separates the maxval from the raw payload; the payload must hold
    exactly width*height*3 bytes.  Every malformation raises
    PpmDecodeError naming the offending field or byte offset.
    """
    magic, pos = _next_token(data, 0, "magic")
    if magic not in (b"P6", b"P3"):
        raise PpmDecodeError(f"unsupported magic {magic!r}: expected P6 or P3")
    width, pos = _int_token(data, pos, "width")
    height, pos = _int_token(data, pos, "height")
    maxval, pos = _int_token(data, pos, "maxval")
    if width == 0 or height == 0:
        raise PpmDecodeError(f"zero dimensions: width={width} height={height}")
    if maxval != 255:
        raise PpmDecodeError(f"unsupported maxval {maxval}: only 255 is accepted")

    expected = width * height * 3
    if magic == b"P6":
        if pos >= len(data) or data[pos] not in _WHITESPACE:
            raise PpmDecodeError(f"expected single whitespace after maxval at byte {pos}")
        pos += 1
        payload = data[pos:]
        if len(payload) < expected:
            raise PpmDecodeError(
                f"truncated pixel data at byte {pos + len(payload)}: "
                f"expected {expected} payload bytes, got {len(payload)}"
            )
        if len(payload) > expected:
            raise PpmDecodeError(f"trailing data after pixel payload at byte {pos + expected}")
        pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3).copy()
        return RasterImage(width=width, height=height, pixels=pixels)

    # P3: decimal samples; strip comments line-wise, then tokenize.
    chunks = []
    for line in data[pos:].split(b"\n"):
        cut = line.find(b"#")
        chunks.append(line if cut < 0 else line[:cut])
    tokens = b" ".join(chunks).split()
    if len(tokens) < expected:
        raise PpmDecodeError(
            f"truncated pixel data: expected {expected} samples, got {len(tokens)}"
        )
    if len(tokens) > expected:
        raise PpmDecodeError(f"trailing data after sample {expected - 1}")
    values = np.empty(expected, dtype=np.uint8)
    for i, token in enumerate(tokens):
        if not token.isdigit():
            raise PpmDecodeError(f"malformed sample {i}: {token!r}")
        sample = int(token)
        if sample > 255:
            raise PpmDecodeError(f"sample {i} out of range: {sample} > 255")
        values[i] = sample
    return RasterImage(width=width, height=height, pixels=values.reshape(height, width, 3))


def encode_ppm(image: RasterImage) -> bytes:
    """Encode as binary P6: ``P6\\n<width> <height>\\n255\\n`` + raw bytes."""
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + image.pixels.tobytes()


def partition_blocks(image: RasterImage) -> BlockGrid:
    """Split the image into non-overlapping 4x4 blocks.

    Only the top-left region whose sides are multiples of 4 is used;
    trailing remainder rows/columns are dropped with a warning.  Each
    block carries the exact per-channel mean of its 16 pixels (sums of 16
    8-bit values are exact in float64) and the 16 value-channel
    intensities max(r,g,b)/255.
    """
    if image.width < BLOCK_SIZE or image.height < BLOCK_SIZE:
        raise ImageDimensionError(
            f"image {image.width}x{image.height} is smaller than "
            f"{BLOCK_SIZE}x{BLOCK_SIZE} in at least one dimension"
        )
    usable_w = image.width - image.width % BLOCK_SIZE
    usable_h = image.height - image.height % BLOCK_SIZE
    if (usable_w, usable_h) != (image.width, image.height):
        warnings.warn(
            f"image {image.width}x{image.height} truncated to {usable_w}x{usable_h} "
            f"for the {BLOCK_SIZE}x{BLOCK_SIZE} partition",
            stacklevel=2,
        )
    rows = usable_h // BLOCK_SIZE
    cols = usable_w // BLOCK_SIZE
    region = image.pixels[:usable_h, :usable_w].astype(np.float64)
    tiles = region.reshape(rows, BLOCK_SIZE, cols, BLOCK_SIZE, 3).transpose(0, 2, 1, 3, 4)
    means = tiles.mean(axis=(2, 3))  # (rows, cols, 3)
    intensities = tiles.max(axis=4) / 255.0  # (rows, cols, 4, 4), value channel
    blocks = [
        Block(avg_rgb=means[r, c], intensity=intensities[r, c])
        for r in range(rows)
        for c in range(cols)
    ]
    return BlockGrid(block_cols=cols, block_rows=rows, blocks=blocks)
