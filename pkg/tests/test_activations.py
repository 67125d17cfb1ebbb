"""Base activations, learnable mixes, and their gradients."""

import math

import numpy as np
import pytest

from actmix.activations import (
    ActivationError,
    BASE_TAGS,
    CacheMismatchError,
    Fixed,
    LinearMix,
    QuadraticMix,
    backward,
    base_eval,
    base_grad,
    forward,
    init_params,
    linear_backward,
    linear_forward,
    quadratic_backward,
    quadratic_forward,
    simplex_weights,
    softmax,
    validate_library,
)
from actmix.rng import Rng

LIB4 = ("relu", "gelu", "tanh", "sigmoid")


def fd_slope(f, x, h=1e-5):
    return (f(x + h) - f(x - h)) / (2.0 * h)


class TestBaseEval:
    def test_relu(self):
        np.testing.assert_array_equal(
            base_eval("relu", np.array([[-1.0, 2.0]])), [[0.0, 2.0]]
        )

    def test_zero_values(self):
        x = np.array([[0.0]])
        assert base_eval("sigmoid", x)[0, 0] == 0.5
        assert base_eval("tanh", x)[0, 0] == 0.0
        assert base_eval("gelu", x)[0, 0] == 0.0
        assert base_eval("square_rational", x)[0, 0] == 0.0

    def test_square_rational_at_one(self):
        assert base_eval("square_rational", np.array([[1.0]]))[0, 0] == 0.5

    def test_gelu_at_one(self):
        # hand evaluation of x / (1 + exp(-1.702 x)) at x = 1
        expected = 1.0 / (1.0 + math.exp(-1.702))
        assert abs(base_eval("gelu", np.array([[1.0]]))[0, 0] - expected) < 1e-15
        assert abs(expected - 0.84579) < 1e-4

    def test_gelu_erf_matches_cdf(self):
        x = np.linspace(-4, 4, 101)
        expected = x * 0.5 * (1.0 + np.vectorize(math.erf)(x / math.sqrt(2)))
        np.testing.assert_allclose(base_eval("gelu_erf", x.reshape(1, -1))[0], expected)

    def test_unknown_tag(self):
        with pytest.raises(ActivationError):
            base_eval("softplus", np.zeros((1, 1)))

    def test_no_nan_on_huge_inputs(self):
        x = np.array([[-1e6, -10.0, 0.0, 10.0, 1e6]])
        for tag in BASE_TAGS:
            assert np.all(np.isfinite(base_eval(tag, x))), tag
            assert np.all(np.isfinite(base_grad(tag, x))), tag


class TestBaseGrad:
    def test_standard_identities_at_zero(self):
        x = np.array([[0.0]])
        assert base_grad("tanh", x)[0, 0] == 1.0
        assert base_grad("sigmoid", x)[0, 0] == 0.25

    def test_relu_at_zero_is_zero(self):
        assert base_grad("relu", np.array([[0.0]]))[0, 0] == 0.0

    @pytest.mark.parametrize("tag", BASE_TAGS)
    def test_finite_difference(self, tag):
        rng = Rng(101)
        x = rng.normal(0.0, 2.0, (100,))
        if tag == "relu":
            # keep the kink out of the differencing stencil
            x = x[np.abs(x) > 1e-3]
        analytic = base_grad(tag, x.reshape(1, -1))[0]
        numeric = fd_slope(lambda v: base_eval(tag, v.reshape(1, -1))[0], x)
        denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1.0)
        assert np.max(np.abs(analytic - numeric) / denom) < 1e-6


class TestLibrary:
    def test_duplicates_rejected(self):
        with pytest.raises(ActivationError, match="duplicate"):
            validate_library(("relu", "relu"))

    def test_empty_rejected(self):
        with pytest.raises(ActivationError, match="nonempty"):
            validate_library(())


class TestLinearMix:
    def test_one_hot_equals_base(self):
        x = Rng(1).normal(0.0, 3.0, (50, 4))
        for k, tag in enumerate(LIB4):
            theta = np.zeros(4)
            theta[k] = 1.0
            spec = LinearMix(LIB4, theta, constrained=False)
            value, _ = linear_forward(spec, x)
            np.testing.assert_array_equal(value, base_eval(tag, x))

    def test_even_relu_tanh_mix(self):
        spec = LinearMix(("relu", "tanh"), np.array([0.5, 0.5]), constrained=False)
        value, _ = linear_forward(spec, np.array([[1.0]]))
        expected = 0.5 * 1.0 + 0.5 * math.tanh(1.0)
        assert abs(value[0, 0] - expected) < 1e-15
        assert abs(expected - 0.880797) < 1e-6

    def test_uniform_mix_at_zero(self):
        # only sigmoid is nonzero at 0, so the uniform mix gives 0.25 * 0.5
        spec = LinearMix(LIB4, np.full(4, 0.25), constrained=False)
        value, _ = linear_forward(spec, np.array([[0.0]]))
        assert abs(value[0, 0] - 0.125) < 1e-15

    def test_zero_upstream_zero_grads(self):
        spec = LinearMix(LIB4, np.array([0.3, 0.4, 0.2, 0.1]), constrained=False)
        x = Rng(2).normal(0.0, 1.0, (5, 3))
        _, cache = linear_forward(spec, x)
        d_input, d_theta = linear_backward(cache, np.zeros_like(x))
        np.testing.assert_array_equal(d_input, np.zeros_like(x))
        np.testing.assert_array_equal(d_theta, np.zeros(4))

    def test_single_member_theta_grad(self):
        spec = LinearMix(("tanh",), np.array([2.0]), constrained=False)
        x = Rng(3).normal(0.0, 1.0, (4, 2))
        up = Rng(4).normal(0.0, 1.0, (4, 2))
        _, cache = linear_forward(spec, x)
        _, d_theta = linear_backward(cache, up)
        assert abs(d_theta[0] - np.sum(up * np.tanh(x))) < 1e-12

    @pytest.mark.parametrize("constrained", [False, True])
    def test_finite_difference_theta_and_input(self, constrained):
        rng = Rng(55)
        spec = LinearMix(LIB4, rng.normal(0.0, 0.7, (4,)), constrained=constrained)
        x = rng.normal(0.0, 1.5, (6, 3))
        up = rng.normal(0.0, 1.0, (6, 3))
        _, cache = linear_forward(spec, x)
        d_input, d_theta = linear_backward(cache, up)

        def scalar_loss():
            v, _ = linear_forward(spec, x)
            return float(np.sum(v * up))

        h = 1e-5
        for j in range(4):
            keep = spec.theta[j]
            spec.theta[j] = keep + h
            up_l = scalar_loss()
            spec.theta[j] = keep - h
            dn_l = scalar_loss()
            spec.theta[j] = keep
            num = (up_l - dn_l) / (2 * h)
            assert abs(d_theta[j] - num) / max(abs(num), abs(d_theta[j]), 1.0) < 1e-6
        flat = x.reshape(-1)
        for i in range(flat.size):
            keep = flat[i]
            flat[i] = keep + h
            up_l = scalar_loss()
            flat[i] = keep - h
            dn_l = scalar_loss()
            flat[i] = keep
            num = (up_l - dn_l) / (2 * h)
            a = d_input.reshape(-1)[i]
            assert abs(a - num) / max(abs(num), abs(a), 1.0) < 1e-6

    def test_cache_mismatch(self):
        spec = LinearMix(LIB4, np.zeros(4), constrained=False)
        _, cache = linear_forward(spec, np.zeros((2, 2)))
        with pytest.raises(CacheMismatchError):
            linear_backward(cache, np.zeros((3, 2)))


class TestQuadraticMix:
    def test_zero_quad_one_hot_equals_base(self):
        x = Rng(5).normal(0.0, 2.0, (30, 4))
        for k, tag in enumerate(LIB4):
            lin = np.zeros(4)
            lin[k] = 1.0
            spec = QuadraticMix(LIB4, lin, np.zeros((4, 4)), constrained=False)
            value, _ = quadratic_forward(spec, x)
            np.testing.assert_array_equal(value, base_eval(tag, x))

    def test_single_cross_term(self):
        quad = np.zeros((2, 2))
        quad[0, 1] = 1.0
        spec = QuadraticMix(("sine", "cosine"), np.zeros(2), quad, constrained=False)
        x = np.linspace(-3, 3, 11).reshape(1, -1)
        value, _ = quadratic_forward(spec, x)
        np.testing.assert_allclose(value, np.sin(x) * np.cos(x), atol=1e-15)

    def test_tanh_squared(self):
        quad = np.array([[1.0]])
        spec = QuadraticMix(("tanh",), np.zeros(1), quad, constrained=False)
        value, _ = quadratic_forward(spec, np.array([[1.0]]))
        expected = math.tanh(1.0) ** 2
        assert abs(value[0, 0] - expected) < 1e-15
        assert abs(expected - 0.580026) < 1e-6

    def test_zero_quad_matches_linear_exactly(self):
        rng = Rng(6)
        lin = rng.normal(0.0, 0.7, (4,))
        x = rng.normal(0.0, 2.0, (20, 5))
        q = QuadraticMix(LIB4, lin.copy(), np.zeros((4, 4)), constrained=False)
        l = LinearMix(LIB4, lin.copy(), constrained=False)
        qv, qc = quadratic_forward(q, x)
        lv, lc = linear_forward(l, x)
        np.testing.assert_array_equal(qv, lv)
        up = rng.normal(0.0, 1.0, (20, 5))
        q_din, *_ = quadratic_backward(qc, up)
        l_din, _ = linear_backward(lc, up)
        np.testing.assert_array_equal(q_din, l_din)

    def test_zero_upstream_zero_grads(self):
        rng = Rng(7)
        spec = QuadraticMix(LIB4)
        init_params(spec, rng)
        x = rng.normal(0.0, 1.0, (5, 3))
        _, cache = quadratic_forward(spec, x)
        d_input, d_lin, d_quad = quadratic_backward(cache, np.zeros_like(x))
        assert not d_input.any() and not d_lin.any() and not d_quad.any()

    def test_lower_triangle_rejected(self):
        quad = np.zeros((2, 2))
        quad[1, 0] = 0.5
        with pytest.raises(ActivationError, match="below the diagonal"):
            QuadraticMix(("relu", "tanh"), np.zeros(2), quad)

    @pytest.mark.parametrize("constrained", [False, True])
    def test_finite_difference_all_params(self, constrained):
        rng = Rng(77)
        spec = QuadraticMix(LIB4, constrained=constrained)
        init_params(spec, rng)
        x = rng.normal(0.0, 1.5, (5, 3))
        up = rng.normal(0.0, 1.0, (5, 3))
        _, cache = quadratic_forward(spec, x)
        d_input, d_lin, d_quad = quadratic_backward(cache, up)

        def scalar_loss():
            v, _ = quadratic_forward(spec, x)
            return float(np.sum(v * up))

        h = 1e-5

        def check(arr, grads):
            flat_a, flat_g = arr.reshape(-1), grads.reshape(-1)
            for i in range(flat_a.size):
                keep = flat_a[i]
                flat_a[i] = keep + h
                up_l = scalar_loss()
                flat_a[i] = keep - h
                dn_l = scalar_loss()
                flat_a[i] = keep
                num = (up_l - dn_l) / (2 * h)
                assert abs(flat_g[i] - num) / max(abs(num), abs(flat_g[i]), 1.0) < 1e-6

        check(spec.lin, d_lin)
        iu = np.triu_indices(4)
        for j, k in zip(*iu):
            keep = spec.quad[j, k]
            spec.quad[j, k] = keep + h
            up_l = scalar_loss()
            spec.quad[j, k] = keep - h
            dn_l = scalar_loss()
            spec.quad[j, k] = keep
            num = (up_l - dn_l) / (2 * h)
            a = d_quad[j, k]
            assert abs(a - num) / max(abs(num), abs(a), 1.0) < 1e-6
        check(x, d_input)


class TestSimplexWeights:
    def test_uniform_for_equal_theta(self):
        spec = LinearMix(LIB4, np.full(4, 3.7), constrained=True)
        np.testing.assert_allclose(simplex_weights(spec), np.full(4, 0.25), atol=1e-15)

    def test_large_logit_approaches_one_hot(self):
        spec = LinearMix(LIB4, np.array([20.0, 0.0, 0.0, 0.0]), constrained=True)
        w = simplex_weights(spec)
        assert w[0] > 1.0 - 1e-8

    def test_sums_to_one(self):
        rng = Rng(8)
        for _ in range(50):
            theta = rng.normal(0.0, 5.0, (6,))
            assert abs(softmax(theta).sum() - 1.0) < 1e-12

    def test_unconstrained_is_usage_error(self):
        spec = LinearMix(LIB4, np.zeros(4), constrained=False)
        with pytest.raises(ActivationError):
            simplex_weights(spec)

    def test_simplex_invariant_under_updates(self):
        # arbitrary gradient updates to theta keep the weights on the simplex
        rng = Rng(9)
        spec = LinearMix(LIB4, rng.normal(0.0, 0.7, (4,)), constrained=True)
        for _ in range(100):
            spec.theta += rng.normal(0.0, 0.5, (4,))
            w = spec.mix_weights()
            assert np.all(w > 0.0)
            assert abs(w.sum() - 1.0) < 1e-12


class TestRestrictionEquivalence:
    def test_linear_one_hot_matches_base_everywhere(self):
        rng = Rng(10)
        x = rng.normal(0.0, 3.0, (10_000, 1))
        for k, tag in enumerate(LIB4):
            theta = np.zeros(4)
            theta[k] = 1.0
            value, _ = linear_forward(LinearMix(LIB4, theta, constrained=False), x)
            assert np.max(np.abs(value - base_eval(tag, x))) < 1e-12

    def test_dispatch_forward_backward(self):
        x = np.array([[0.5, -0.5]])
        up = np.ones_like(x)
        for spec in (
            Fixed("tanh"),
            LinearMix(LIB4, np.full(4, 0.25), constrained=False),
            QuadraticMix(LIB4, np.full(4, 0.25), np.zeros((4, 4))),
        ):
            value, cache = forward(spec, x)
            d_input, grads = backward(spec, cache, up)
            assert value.shape == x.shape
            assert d_input.shape == x.shape
            if isinstance(spec, Fixed):
                assert grads == {}


class TestInit:
    def test_kaiming_scale_on_theta(self):
        # std should be sqrt(2/|S|); check at |S| = 8 via many draws
        lib = BASE_TAGS
        draws = []
        for s in range(2000):
            spec = LinearMix(lib, constrained=True)
            init_params(spec, Rng(s))
            draws.extend(spec.theta.tolist())
        assert abs(np.std(draws) - math.sqrt(2.0 / len(lib))) < 0.02

    def test_preset_params_not_overwritten(self):
        theta = np.array([1.0, 2.0, 3.0, 4.0])
        spec = LinearMix(LIB4, theta.copy(), constrained=False)
        rng = Rng(11)
        before = rng.raw(1)[0]
        init_params(spec, rng)
        np.testing.assert_array_equal(spec.theta, theta)
        # no draws consumed
        assert Rng(11).raw(1)[0] == before

    def test_quad_draw_count_is_parameter_count(self):
        spec = QuadraticMix(LIB4)
        rng = Rng(12)
        init_params(spec, rng)
        assert np.all(np.tril(spec.quad, k=-1) == 0.0)
        assert spec.lin.shape == (4,)
