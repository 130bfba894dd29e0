import numpy as np
import pytest
from hypothesis import given, strategies as hyp

from multinet import EdgeOperator, ValidationError, edge_feature, edge_features

finite = hyp.floats(min_value=-1e6, max_value=1e6, allow_nan=False,
                    allow_infinity=False)
vec_pairs = hyp.integers(min_value=1, max_value=12).flatmap(
    lambda d: hyp.tuples(hyp.lists(finite, min_size=d, max_size=d),
                         hyp.lists(finite, min_size=d, max_size=d)))


class TestSpotValues:
    def test_hadamard(self):
        np.testing.assert_array_equal(
            edge_feature(EdgeOperator.HADAMARD, [1.0, 2.0], [3.0, 4.0]),
            [3.0, 8.0])

    def test_identity_and_annihilation(self, rng):
        x = rng.normal(size=6)
        np.testing.assert_array_equal(edge_feature(EdgeOperator.AVERAGE, x, x), x)
        np.testing.assert_array_equal(
            edge_feature(EdgeOperator.WEIGHTED_L1, x, x), np.zeros(6))
        np.testing.assert_array_equal(
            edge_feature(EdgeOperator.WEIGHTED_L2, x, x), np.zeros(6))

    def test_weighted_l2(self):
        np.testing.assert_array_equal(
            edge_feature(EdgeOperator.WEIGHTED_L2, [1.0, 0.0], [0.0, 2.0]),
            [1.0, 4.0])

    def test_average(self):
        np.testing.assert_array_equal(
            edge_feature(EdgeOperator.AVERAGE, [1.0, 2.0], [3.0, 4.0]),
            [2.0, 3.0])


class TestProperties:
    @pytest.mark.parametrize("op", list(EdgeOperator))
    @given(pair=vec_pairs)
    def test_exact_symmetry(self, op, pair):
        fu, fv = np.asarray(pair[0]), np.asarray(pair[1])
        np.testing.assert_array_equal(edge_feature(op, fu, fv),
                                      edge_feature(op, fv, fu))

    @pytest.mark.parametrize("op", [EdgeOperator.WEIGHTED_L1,
                                    EdgeOperator.WEIGHTED_L2])
    @given(pair=vec_pairs)
    def test_nonnegative(self, op, pair):
        out = edge_feature(op, np.asarray(pair[0]), np.asarray(pair[1]))
        assert (out >= 0).all()

    @pytest.mark.parametrize("op", list(EdgeOperator))
    @given(pair=vec_pairs)
    def test_dimension_preserved(self, op, pair):
        out = edge_feature(op, np.asarray(pair[0]), np.asarray(pair[1]))
        assert out.shape == (len(pair[0]),)


class TestValidation:
    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError):
            edge_feature(EdgeOperator.HADAMARD, [1.0, 2.0], [1.0])

    def test_token_mapping(self):
        assert EdgeOperator.from_token("hadamard") is EdgeOperator.HADAMARD
        assert EdgeOperator.from_token("l2") is EdgeOperator.WEIGHTED_L2
        with pytest.raises(ValidationError):
            EdgeOperator.from_token("concat")

    def test_batched_rows(self, rng):
        fu = rng.normal(size=(5, 3))
        fv = rng.normal(size=(5, 3))
        batch = edge_features(EdgeOperator.WEIGHTED_L1, fu, fv)
        for r in range(5):
            np.testing.assert_array_equal(
                batch[r], edge_feature(EdgeOperator.WEIGHTED_L1, fu[r], fv[r]))
