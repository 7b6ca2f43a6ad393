import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from blockscan.retrieval import (
    RankedMatch,
    euclidean,
    filter_by_threshold,
    rank,
    signature_distance,
)
from blockscan.signature import ImageSignature, SignatureIndex


def sig(image_id: str, rows) -> ImageSignature:
    centroids = np.asarray(rows, dtype=np.float64)
    if centroids.ndim == 1:
        centroids = centroids.reshape(-1, 1)
    k = centroids.shape[0]
    return ImageSignature(
        image_id=image_id,
        centroids=centroids,
        weights=np.ones(k, dtype=np.int64),
        block_count=k,
    )


def stub_index(distances: dict[str, float]) -> tuple[ImageSignature, SignatureIndex]:
    """1-d, k=1 signatures whose pairwise distance equals the stubbed value exactly."""
    query = sig("query", [[0.0]])
    entries = [sig(name, [[value]]) for name, value in distances.items()]
    return query, SignatureIndex(k=1, dims=1, entries=entries)


class TestEuclidean:
    def test_identity(self):
        p = np.array([0.3, 0.7, 0.1])
        assert euclidean(p, p) == 0.0

    def test_three_four_five(self):
        assert euclidean((0.0, 0.0), (3.0, 4.0)) == 5.0

    def test_matches_independent_accumulation_and_symmetry(self):
        rng = np.random.default_rng(55)
        for _ in range(200):
            p = rng.uniform(-3, 3, size=6)
            q = rng.uniform(-3, 3, size=6)
            expected = math.sqrt(math.fsum((float(a) - float(b)) ** 2 for a, b in zip(p, q)))
            assert abs(euclidean(p, q) - expected) < 1e-12
            assert euclidean(p, q) == euclidean(q, p)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension mismatch"):
            euclidean([1.0, 2.0], [1.0, 2.0, 3.0])


class TestSignatureDistance:
    def test_identical_signatures(self):
        s = sig("a", [[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]])
        assert signature_distance(s, s) == 0.0

    def test_hand_enumerated_case(self):
        q = sig("q", [0.0, 1.0, 2.0])
        a = sig("a", [0.5, 5.0, 9.0])
        # all nine pairwise distances by hand: mins are 0.5, 0.5, 1.5
        assert signature_distance(q, a) == pytest.approx(2.5 / 3, abs=1e-15)

    def test_coincident_centroids_give_zero(self):
        q = sig("q", [7.0, 7.0, 7.0])
        a = sig("a", [7.0, 100.0, -40.0])
        assert signature_distance(q, a) == 0.0

    def test_directional_asymmetry_witness(self):
        q = sig("q", [0.0, 0.0, 0.0])
        a = sig("a", [0.0, 8.0, 9.0])
        assert signature_distance(q, a) == 0.0
        assert signature_distance(a, q) == 17 / 3

    def test_upper_bound_by_max_pairwise(self):
        rng = np.random.default_rng(21)
        for _ in range(100):
            q = sig("q", rng.uniform(-2, 2, size=(3, 6)))
            a = sig("a", rng.uniform(-2, 2, size=(3, 6)))
            max_pair = max(
                euclidean(qc, ac) for qc in q.centroids for ac in a.centroids
            )
            assert 0.0 <= signature_distance(q, a) <= max_pair

    def test_k_mismatch_rejected(self):
        with pytest.raises(ValueError, match="cluster count"):
            signature_distance(sig("q", [0.0, 1.0]), sig("a", [0.0, 1.0, 2.0]))

    def test_dims_mismatch_rejected(self):
        with pytest.raises(ValueError, match="dimensionality"):
            signature_distance(sig("q", [[0.0, 1.0]]), sig("a", [[0.0]]))


class TestRank:
    def test_reproduces_first_distance_table_ordering(self):
        query, index = stub_index(
            {"image05": 0.079, "image06": 0.097, "image10": 0.11, "image11": 0.077}
        )
        matches = rank(query, index)
        assert matches[0] == RankedMatch("image11", 0.077)
        assert [m.image_id for m in matches] == ["image11", "image05", "image06", "image10"]

    def test_reproduces_second_distance_table_ordering(self):
        query, index = stub_index(
            {"image01": 0.08195, "image02": 0.19374, "image12": 0.173131}
        )
        matches = rank(query, index)
        assert matches[0].image_id == "image01"
        assert matches[0].distance == 0.08195

    def test_query_present_in_index_is_rank_one(self):
        entries = [sig("self", [[0.2, 0.4]]), sig("other", [[0.9, 0.9]])]
        index = SignatureIndex(k=1, dims=2, entries=entries)
        matches = rank(entries[0], index)
        assert matches[0] == RankedMatch("self", 0.0)

    def test_exact_ties_break_by_image_id(self):
        query, index = stub_index({"bbb": 0.25, "aaa": 0.25, "ccc": 0.25})
        assert [m.image_id for m in rank(query, index)] == ["aaa", "bbb", "ccc"]

    def test_top_n_truncates(self):
        query, index = stub_index({"a": 0.3, "b": 0.1, "c": 0.2})
        matches = rank(query, index, top_n=2)
        assert [m.image_id for m in matches] == ["b", "c"]

    def test_output_is_permutation_of_index_ids(self):
        rng = np.random.default_rng(9)
        query, index = stub_index({f"img{i}": float(rng.uniform(0, 1)) for i in range(20)})
        matches = rank(query, index)
        assert sorted(m.image_id for m in matches) == sorted(e.image_id for e in index.entries)
        distances = [m.distance for m in matches]
        assert distances == sorted(distances)

    def test_invalid_top_n(self):
        query, index = stub_index({"a": 0.1})
        with pytest.raises(ValueError, match="top_n"):
            rank(query, index, top_n=0)


class TestFilterByThreshold:
    def test_first_table_threshold(self):
        matches = [
            RankedMatch("image11", 0.077),
            RankedMatch("image05", 0.079),
            RankedMatch("image06", 0.097),
            RankedMatch("image10", 0.11),
        ]
        kept = filter_by_threshold(matches, 0.1)
        assert [m.distance for m in kept] == [0.077, 0.079, 0.097]

    def test_zero_threshold_keeps_only_exact(self):
        matches = [RankedMatch("a", 0.0), RankedMatch("b", 1e-12)]
        assert filter_by_threshold(matches, 0.0) == [RankedMatch("a", 0.0)]

    def test_large_threshold_keeps_everything(self):
        matches = [RankedMatch("a", 0.1), RankedMatch("b", 5.0)]
        assert filter_by_threshold(matches, math.inf) == matches
        assert filter_by_threshold(matches, 5.0) == matches

    def test_negative_threshold_rejected(self):
        with pytest.raises(ValueError, match="threshold"):
            filter_by_threshold([], -0.1)

    @given(st.lists(st.floats(0, 10), max_size=20), st.floats(0, 10))
    def test_keeps_exactly_the_at_or_below_prefix(self, distances, threshold):
        distances = sorted(distances)
        matches = [RankedMatch(f"i{n}", d) for n, d in enumerate(distances)]
        kept = filter_by_threshold(matches, threshold)
        assert kept == [m for m in matches if m.distance <= threshold]
