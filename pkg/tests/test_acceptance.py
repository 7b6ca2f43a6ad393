"""Acceptance suite: one test per release criterion, each printing a pass/fail line.

Run with ``pytest tests/test_acceptance.py -v`` (add ``-s`` to see the
ACCEPTANCE lines for passing criteria as well).
"""

import math
import time
from contextlib import contextmanager

import numpy as np

from blockscan.cli import EXIT_OK, main
from blockscan.clustering import ClusterParams, assign_points, kmeans, update_centroids
from blockscan.features import band_energy, haar_transform_block, rgb_to_hsv
from blockscan.imaging import encode_ppm
from blockscan.pipeline import build_index, image_signature
from blockscan.retrieval import filter_by_threshold, rank, signature_distance
from blockscan.signature import ImageSignature, SignatureIndex, load_index, save_index

from conftest import synthetic_image
from test_clustering import brute_force_min_sse
from test_features import direct_band_energy, direct_haar_bands
from test_retrieval import sig, stub_index
from test_signature import indexes_equal, random_index


@contextmanager
def criterion(number: int, name: str):
    try:
        yield
    except BaseException:
        print(f"ACCEPTANCE {number:>2} FAIL {name}")
        raise
    else:
        print(f"ACCEPTANCE {number:>2} PASS {name}")


def test_criterion_1_ranking_logic_reproduction():
    with criterion(1, "ranking and threshold filtering on fixed distance sets"):
        started = time.perf_counter()

        query4, index4 = stub_index(
            {"image05": 0.079, "image06": 0.097, "image10": 0.11, "image11": 0.077}
        )
        matches4 = rank(query4, index4)
        assert matches4[0].image_id == "image11"
        assert matches4[0].distance == 0.077
        kept = filter_by_threshold(matches4, 0.1)
        assert [m.distance for m in kept] == [0.077, 0.079, 0.097]

        query3, index3 = stub_index(
            {"image01": 0.08195, "image02": 0.19374, "image12": 0.173131}
        )
        matches3 = rank(query3, index3)
        assert matches3[0].image_id == "image01"
        assert matches3[0].distance == 0.08195

        assert time.perf_counter() - started < 1.0


def test_criterion_2_haar_oracle_equivalence():
    with criterion(2, "separable Haar equals direct basis-expansion oracle (1000 blocks)"):
        started = time.perf_counter()
        rng = np.random.default_rng(20260810)
        for _ in range(1000):
            grid = rng.uniform(0.0, 1.0, size=(4, 4))
            bands = haar_transform_block(grid)
            oracle = direct_haar_bands(grid)
            for name in ("hl", "lh", "hh"):
                ours = band_energy(getattr(bands, name))
                theirs = direct_band_energy(oracle[name])
                assert abs(ours - theirs) < 1e-12
        assert time.perf_counter() - started < 5.0


def test_criterion_3_energy_formula_unit_checks():
    with criterion(3, "band energy unit checks"):
        assert band_energy([0, 0, 0, 0]) == 0.0
        assert abs(band_energy([1, 1, 1, 1]) - 1.0) < 1e-12
        assert abs(band_energy([1, 2, 3, 4]) - math.sqrt(7.5)) < 1e-12


def test_criterion_4_kmeans_optimality_bound():
    with criterion(4, "k-means objective vs exhaustive optimum, 100 instances"):
        started = time.perf_counter()
        params_tolerance = ClusterParams().tolerance
        for instance in range(100):
            rng = np.random.default_rng(instance)
            points = rng.uniform(0.0, 1.0, size=(8, 2))
            result = kmeans(points, ClusterParams(k=2, seed=instance))
            assert result.objective >= brute_force_min_sse(points) - 1e-9
            labels = assign_points(points, result.centroids)
            assert np.array_equal(labels, result.labels)
            centroids, _counts = update_centroids(points, labels, 2)
            displacement = np.sqrt(((centroids - result.centroids) ** 2).sum(axis=1)).max()
            assert displacement <= params_tolerance
        assert time.perf_counter() - started < 30.0


def test_criterion_5_self_retrieval():
    with criterion(5, "self-retrieval at rank 1 over 20 synthetic images"):
        started = time.perf_counter()
        images = [(f"img{i:02d}.ppm", synthetic_image(seed=i)) for i in range(20)]
        index = build_index(images)
        for image_id, image in images:
            query = image_signature(image, image_id)
            matches = rank(query, index)
            assert matches[0].image_id == image_id
            assert matches[0].distance < 1e-9
        assert time.perf_counter() - started < 20.0


def test_criterion_6_determinism(tmp_path, corpus_dir):
    with criterion(6, "byte-identical rebuilds and bit-exact save/load round-trips"):
        first = tmp_path / "first.idx"
        second = tmp_path / "second.idx"
        assert main(["index", "--input", str(corpus_dir), "--output", str(first)]) == EXIT_OK
        assert main(["index", "--input", str(corpus_dir), "--output", str(second)]) == EXIT_OK
        assert first.read_bytes() == second.read_bytes()

        rng = np.random.default_rng(606)
        for _ in range(50):
            index = random_index(rng)
            data = save_index(index)
            loaded = load_index(data)
            assert indexes_equal(index, loaded)
            assert save_index(loaded) == data


def test_criterion_7_signature_distance_properties():
    with criterion(7, "signature distance identity/nonnegativity/bound/asymmetry"):
        rng = np.random.default_rng(707)
        for _ in range(50):
            s = sig("s", rng.uniform(-1.0, 1.0, size=(3, 6)))
            t = sig("t", rng.uniform(-1.0, 1.0, size=(3, 6)))
            assert signature_distance(s, s) == 0.0
            d = signature_distance(s, t)
            assert d >= 0.0
            max_pair = max(
                float(np.sqrt(((sc - tc) ** 2).sum()))
                for sc in s.centroids
                for tc in t.centroids
            )
            assert d <= max_pair
        q = sig("q", [0.0, 0.0, 0.0])
        a = sig("a", [0.0, 8.0, 9.0])
        assert signature_distance(q, a) == 0.0
        assert signature_distance(a, q) == 17 / 3


def test_criterion_8_invariant_sweeps():
    with criterion(8, "HSV range/round-trip and texture-energy range sweeps"):
        import colorsys

        started = time.perf_counter()
        rng = np.random.default_rng(808)
        for _ in range(10000):
            rgb = rng.uniform(0.0, 255.0, size=3)
            h, s, v = rgb_to_hsv(rgb)
            assert 0.0 <= h <= 1.0 and 0.0 <= s <= 1.0 and 0.0 <= v <= 1.0
            if rgb.max() > rgb.min():
                back = np.array(colorsys.hsv_to_rgb(h, s, v)) * 255.0
                assert np.abs(back - rgb).max() < 1e-9
        for _ in range(10000):
            grid = rng.uniform(0.0, 1.0, size=(4, 4))
            bands = haar_transform_block(grid)
            for name in ("hl", "lh", "hh"):
                energy = band_energy(getattr(bands, name))
                assert 0.0 <= energy <= 0.5
        assert time.perf_counter() - started < 10.0


def test_criterion_9_end_to_end_throughput(tmp_path):
    with criterion(9, "index 100 synthetic 128x128 images in under 10 seconds"):
        directory = tmp_path / "throughput"
        directory.mkdir()
        for i in range(100):
            (directory / f"img{i:03d}.ppm").write_bytes(encode_ppm(synthetic_image(seed=i)))
        out_path = tmp_path / "throughput.idx"
        started = time.perf_counter()
        assert main(["index", "--input", str(directory), "--output", str(out_path)]) == EXIT_OK
        elapsed = time.perf_counter() - started
        index = load_index(out_path.read_bytes())
        assert len(index.entries) == 100
        assert all(entry.block_count == 1024 for entry in index.entries)
        assert elapsed < 10.0
