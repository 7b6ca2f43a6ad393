"""Shared fixtures and synthetic image builders."""

from __future__ import annotations

import numpy as np
import pytest

from blockscan.imaging import RasterImage, encode_ppm


def synthetic_image(seed: int, width: int = 128, height: int = 128) -> RasterImage:
    """Deterministic gradient-plus-noise test image, distinct per seed."""
    rng = np.random.default_rng(seed)
    y = np.arange(height).reshape(-1, 1)
    x = np.arange(width).reshape(1, -1)
    r = (x * 255) // max(width - 1, 1) + 0 * y
    g = (y * 255) // max(height - 1, 1) + 0 * x
    b = (x + y + 13 * seed) * 3
    base = np.stack(np.broadcast_arrays(r, g, b), axis=2)
    noise = rng.integers(0, 40, size=(height, width, 3))
    pixels = ((base + noise) % 256).astype(np.uint8)
    return RasterImage(width=width, height=height, pixels=pixels)


def constant_image(rgb, width: int = 4, height: int = 4) -> RasterImage:
    pixels = np.empty((height, width, 3), dtype=np.uint8)
    pixels[:, :] = rgb
    return RasterImage(width=width, height=height, pixels=pixels)


@pytest.fixture
def corpus_dir(tmp_path):
    """Directory of 12 synthetic 128x128 PPM files named img01.ppm..img12.ppm."""
    directory = tmp_path / "corpus"
    directory.mkdir()
    for i in range(1, 13):
        path = directory / f"img{i:02d}.ppm"
        path.write_bytes(encode_ppm(synthetic_image(seed=i)))
    return directory
