"""
STOL - chain_model 테스트
"""

import numpy as np
import pytest

from oracles import accumulate_features
from stol.chain_model import (ChainFeatureMap, Dataset, LinearScorer, Sample, TransferScorer,
                              joint_features, score, scorer_weights, transfer_score)
from stol.errors import DataError


class TestSample:

    def test_create_and_freeze(self):
        s = Sample.create([[1.0, 2.0], [3.0, 4.0]], [0, 1])
        assert s.length == 2
        assert s.labeled
        with pytest.raises(ValueError):
            s.x[0, 0] = 5.0

    def test_label_length_mismatch(self):
        with pytest.raises(DataError):
            Sample.create([[1.0], [2.0]], [0])

    def test_empty_or_non_finite(self):
        with pytest.raises(DataError):
            Sample.create([], None)
        with pytest.raises(DataError):
            Sample.create([[float("nan")]], None)

    def test_with_labels_drops_labels(self):
        s = Sample.create([[1.0]], [1]).with_labels(None)
        assert not s.labeled


class TestDataset:

    def test_label_out_of_range(self):
        with pytest.raises(DataError):
            Dataset([Sample.create([[1.0]], [2])], d=1, K=2)

    def test_dimension_mismatch(self):
        with pytest.raises(DataError):
            Dataset([Sample.create([[1.0, 2.0]], [0])], d=1, K=2)

    def test_labeled_count_and_order(self):
        labeled = Sample.create([[1.0]], [0])
        unlabeled = Sample.create([[2.0]], None)
        ds = Dataset([labeled, unlabeled], d=1, K=2)
        assert ds.labeled_count == 1
        assert ds.labeled_first()
        assert not Dataset([unlabeled, labeled], d=1, K=2).labeled_first()


class TestJointFeatures:

    def test_dimension(self):
        assert ChainFeatureMap(d=3, K=4).m == 3 * 4 + 16

    def test_definition_example(self):
        psi = joint_features(ChainFeatureMap(1, 2), [[1.0], [2.0]], [0, 1])
        np.testing.assert_array_equal(psi, [1.0, 2.0, 0.0, 1.0, 0.0, 0.0])

    def test_single_position_has_no_transitions(self):
        fmap = ChainFeatureMap(3, 3)
        psi = joint_features(fmap, [[0.5, -1.0, 2.0]], [2])
        assert not psi[fmap.emission_size:].any()
        np.testing.assert_array_equal(psi[6:9], [0.5, -1.0, 2.0])

    def test_matches_per_position_accumulation(self, rng):
        fmap = ChainFeatureMap(2, 2)
        for _ in range(20):
            x = rng.normal(size=(5, 2))
            y = rng.integers(0, 2, size=5)
            np.testing.assert_allclose(joint_features(fmap, x, y),
                                       accumulate_features(2, 2, x.tolist(), y.tolist()),
                                       rtol=0, atol=1e-12)

    def test_additivity_over_splits(self, rng):
        fmap = ChainFeatureMap(2, 3)
        for _ in range(20):
            T = int(rng.integers(2, 8))
            x = rng.normal(size=(T, 2))
            y = rng.integers(0, 3, size=T)
            cut = int(rng.integers(1, T))
            junction = np.zeros(fmap.m)
            junction[fmap.emission_size + y[cut - 1] * 3 + y[cut]] = 1.0
            parts = joint_features(fmap, x[:cut], y[:cut]) + joint_features(fmap, x[cut:], y[cut:])
            np.testing.assert_allclose(joint_features(fmap, x, y), parts + junction, atol=1e-12)

    def test_rejects_bad_inputs(self):
        fmap = ChainFeatureMap(1, 2)
        with pytest.raises(DataError):
            joint_features(fmap, [[1.0, 2.0]], [0])
        with pytest.raises(DataError):
            joint_features(fmap, [[1.0]], [2])
        with pytest.raises(DataError):
            joint_features(fmap, [[1.0], [2.0]], [0])


class TestScoring:

    def test_zero_weights(self, rng):
        fmap = ChainFeatureMap(2, 3)
        zero = LinearScorer.zeros(fmap)
        assert score(zero, rng.normal(size=(4, 2)), [0, 1, 2, 1]) == 0.0

    def test_basis_vector_picks_entry(self):
        fmap = ChainFeatureMap(1, 2)
        x, y = [[1.5], [2.0], [-1.0]], [1, 1, 0]
        psi = joint_features(fmap, x, y)
        for j in range(fmap.m):
            basis = np.zeros(fmap.m)
            basis[j] = 1.0
            assert score(LinearScorer(basis, fmap), x, y) == psi[j]

    def test_brute_force_sum(self, rng):
        fmap = ChainFeatureMap(1, 2)
        theta = rng.normal(size=fmap.m)
        x = rng.normal(size=(3, 1))
        y = [1, 0, 0]
        emission, transition = theta[:2], theta[2:].reshape(2, 2)
        expected = sum(emission[y[t]] * x[t, 0] for t in range(3))
        expected += sum(transition[y[t - 1], y[t]] for t in range(1, 3))
        assert score(LinearScorer(theta, fmap), x, y) == pytest.approx(expected, abs=1e-12)

    def test_transfer_with_zero_delta(self, rng):
        fmap = ChainFeatureMap(2, 2)
        source = LinearScorer(rng.normal(size=fmap.m), fmap)
        x = rng.normal(size=(3, 2))
        assert transfer_score(TransferScorer(source), x, [0, 1, 1]) == score(source, x, [0, 1, 1])

    def test_transfer_with_zero_source(self, rng):
        fmap = ChainFeatureMap(2, 2)
        w = rng.normal(size=fmap.m)
        x = rng.normal(size=(3, 2))
        ts = TransferScorer(LinearScorer.zeros(fmap), w)
        assert transfer_score(ts, x, [1, 1, 0]) == pytest.approx(w @ joint_features(fmap, x, [1, 1, 0]),
                                                                  abs=1e-12)

    def test_transfer_equals_combined_weights(self, rng):
        fmap = ChainFeatureMap(1, 2)
        for _ in range(20):
            source = LinearScorer(rng.normal(size=fmap.m), fmap)
            ts = TransferScorer(source, rng.normal(size=fmap.m))
            x = rng.normal(size=(3, 1))
            y = rng.integers(0, 2, size=3)
            combined = LinearScorer(scorer_weights(ts), fmap)
            assert transfer_score(ts, x, y) == pytest.approx(score(combined, x, y), abs=1e-12)

    def test_delta_is_linear_in_w(self, rng):
        fmap = ChainFeatureMap(2, 3)
        source = LinearScorer(rng.normal(size=fmap.m), fmap)
        w = rng.normal(size=fmap.m)
        x = rng.normal(size=(4, 2))
        y = [2, 0, 1, 1]
        base = score(source, x, y)
        once = transfer_score(TransferScorer(source, w), x, y) - base
        twice = transfer_score(TransferScorer(source, 2 * w), x, y) - base
        assert twice == pytest.approx(2 * once, abs=1e-12)

    def test_scorer_rejects_wrong_length(self):
        with pytest.raises(DataError):
            LinearScorer(np.zeros(3), ChainFeatureMap(1, 2))
        with pytest.raises(DataError):
            TransferScorer(LinearScorer.zeros(ChainFeatureMap(1, 2)), np.zeros(2))

    def test_transfer_delta_defaults_to_zero(self):
        fmap = ChainFeatureMap(1, 2)
        ts = TransferScorer(LinearScorer(np.arange(6, dtype=float), fmap))
        assert ts.w.shape == (fmap.m,)
        assert not ts.w.any()
        assert not ts.w.flags.writeable
        np.testing.assert_array_equal(scorer_weights(ts), np.arange(6, dtype=float))
