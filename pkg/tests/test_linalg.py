"""Matrix arithmetic contracts and the deterministic RNG."""

import numpy as np
import pytest

from actmix.linalg import ShapeError, add_rowvec, as_matrix, elementwise, matmul, rng_normal
from actmix.rng import Rng, RngError


class TestMatmul:
    def test_identity(self):
        m = as_matrix([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(matmul(np.eye(2), m), m)

    def test_zero(self):
        a = as_matrix([[1.0, 2.0], [3.0, 4.0]])
        z = np.zeros((2, 1))
        np.testing.assert_array_equal(matmul(a, z), z)

    def test_hand_expanded(self):
        a = as_matrix([[1.0, 2.0], [3.0, 4.0]])
        b = as_matrix([[5.0], [6.0]])
        # dot products expanded by hand: (1*5+2*6, 3*5+4*6)
        np.testing.assert_array_equal(matmul(a, b), [[17.0], [39.0]])

    def test_shape_error_names_both_shapes(self):
        with pytest.raises(ShapeError, match=r"\(2, 3\).*\(2, 2\)"):
            matmul(np.zeros((2, 3)), np.zeros((2, 2)))

    def test_associativity(self):
        rng = Rng(7)
        for _ in range(10):
            a = rng.normal(0, 1, (4, 5))
            b = rng.normal(0, 1, (5, 3))
            c = rng.normal(0, 1, (3, 6))
            left = matmul(matmul(a, b), c)
            right = matmul(a, matmul(b, c))
            np.testing.assert_allclose(left, right, rtol=1e-9)

    def test_distributivity(self):
        rng = Rng(8)
        for _ in range(10):
            a = rng.normal(0, 1, (4, 5))
            b = rng.normal(0, 1, (4, 5))
            c = rng.normal(0, 1, (5, 3))
            np.testing.assert_allclose(
                matmul(a + b, c), matmul(a, c) + matmul(b, c), rtol=1e-9, atol=1e-12
            )


class TestElementwise:
    def test_add_zero(self):
        m = as_matrix([[1.0, -2.0], [0.5, 4.0]])
        np.testing.assert_array_equal(elementwise("add", m, np.zeros((2, 2))), m)

    def test_mul_one(self):
        m = as_matrix([[1.0, -2.0], [0.5, 4.0]])
        np.testing.assert_array_equal(elementwise("mul", m, np.ones((2, 2))), m)

    def test_add_rowvec(self):
        out = add_rowvec(as_matrix([[1.0, 1.0], [1.0, 1.0]]), [2.0, 3.0])
        np.testing.assert_array_equal(out, [[3.0, 4.0], [3.0, 4.0]])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            elementwise("add", np.zeros((2, 2)), np.zeros((2, 3)))

    def test_unknown_op(self):
        with pytest.raises(ShapeError, match="unknown op"):
            elementwise("pow", np.zeros((2, 2)), np.zeros((2, 2)))


class TestRng:
    def test_stream_equality(self):
        a = Rng(42).raw(10_000)
        b = Rng(42).raw(10_000)
        np.testing.assert_array_equal(a, b)

    def test_different_seeds_differ(self):
        assert not np.array_equal(Rng(1).raw(100), Rng(2).raw(100))

    def test_zero_std_is_constant(self):
        out = Rng(3).normal(5.0, 0.0, (4, 4))
        np.testing.assert_array_equal(out, np.full((4, 4), 5.0))

    def test_negative_std_rejected(self):
        with pytest.raises(RngError):
            Rng(3).normal(0.0, -1.0, (2,))

    def test_normal_moments(self):
        # law-of-large-numbers check on 1e5 draws
        x = Rng(13).normal(0.0, 1.0, (100_000,))
        assert abs(x.mean()) < 0.02
        assert abs(x.std() - 1.0) < 0.02

    def test_same_seed_same_matrix(self):
        a = rng_normal(Rng(11), 0.0, 1.0, (6, 7))
        b = rng_normal(Rng(11), 0.0, 1.0, (6, 7))
        np.testing.assert_array_equal(a, b)

    def test_permutation_is_permutation(self):
        p = Rng(5).permutation(1000)
        assert sorted(p.tolist()) == list(range(1000))

    def test_uniform_range(self):
        u = Rng(9).uniform(10_000)
        assert u.min() >= 0.0 and u.max() < 1.0
