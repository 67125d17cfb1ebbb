"""Base activation library and learnable mixtures over it.

A layer's activation is either a fixed base function, a linear mix
``g(x) = sum_j w_j a_j(x)`` over an ordered library of base activations,
or a quadratic mix that adds learnable pairwise products
``sum_{j<=k} Q_jk a_j(x) a_k(x)``.  Setting the mix one-hot (and the
quadratic coefficients to zero) recovers the corresponding base function
exactly, which is what the restriction tests pin down.

Mix parameters are shared across all nodes of a layer.  A constrained
linear mix stores raw parameters ``theta`` and exposes the effective
weights ``softmax(theta)``, which keeps them on the probability simplex
under arbitrary gradient updates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class ActivationError(ValueError):
    """Invalid activation construction or usage."""


class CacheMismatchError(RuntimeError):
    """Backward called with a cache from a different forward pass."""


# ---------------------------------------------------------------------------
# Base activation library
# ---------------------------------------------------------------------------

_GELU_SLOPE = 1.702  # sigmoid-approximation constant


def _sigmoid(x: np.ndarray) -> np.ndarray:
    # Split form avoids overflow warnings for large |x|.
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _relu(x):
    return np.maximum(x, 0.0)


def _relu_grad(x):
    # Derivative at 0 is defined as 0.
    return (x > 0).astype(np.float64)


def _gelu(x):
    return x * _sigmoid(_GELU_SLOPE * x)


def _gelu_grad(x):
    s = _sigmoid(_GELU_SLOPE * x)
    return s + x * _GELU_SLOPE * s * (1.0 - s)


_erf = np.vectorize(math.erf, otypes=[np.float64])
_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_INV_SQRT2PI = 1.0 / math.sqrt(2.0 * math.pi)


def _gelu_erf(x):
    return x * 0.5 * (1.0 + _erf(x * _INV_SQRT2))


def _gelu_erf_grad(x):
    cdf = 0.5 * (1.0 + _erf(x * _INV_SQRT2))
    pdf = _INV_SQRT2PI * np.exp(-0.5 * np.square(x))
    return cdf + x * pdf


def _tanh_grad(x):
    t = np.tanh(x)
    return 1.0 - t * t


def _sigmoid_grad(x):
    s = _sigmoid(x)
    return s * (1.0 - s)


def _square_rational(x):
    x2 = np.square(x)
    return x2 / (1.0 + x2)


def _square_rational_grad(x):
    return 2.0 * x / np.square(1.0 + np.square(x))


def _cos_grad(x):
    return -np.sin(x)


# Canonical tags (config files use these strings).  "gelu" is the
# sigmoid-slope approximation; "gelu_erf" selects the exact-erf variant.
_BASE = {
    "relu": (_relu, _relu_grad),
    "gelu": (_gelu, _gelu_grad),
    "gelu_erf": (_gelu_erf, _gelu_erf_grad),
    "tanh": (np.tanh, _tanh_grad),
    "sigmoid": (_sigmoid, _sigmoid_grad),
    "sine": (np.sin, np.cos),
    "cosine": (np.cos, _cos_grad),
    "square_rational": (_square_rational, _square_rational_grad),
}

BASE_TAGS = tuple(_BASE)


def base_eval(tag: str, x: np.ndarray) -> np.ndarray:
    """Elementwise value of a base activation."""
    if tag not in _BASE:
        raise ActivationError(f"unknown activation tag {tag!r}; known: {BASE_TAGS}")
    return _BASE[tag][0](np.asarray(x, dtype=np.float64))


def base_grad(tag: str, x: np.ndarray) -> np.ndarray:
    """Elementwise derivative of a base activation."""
    if tag not in _BASE:
        raise ActivationError(f"unknown activation tag {tag!r}; known: {BASE_TAGS}")
    return _BASE[tag][1](np.asarray(x, dtype=np.float64))


def validate_library(tags) -> tuple[str, ...]:
    """Check an ordered library: nonempty, known tags, no duplicates."""
    tags = tuple(tags)
    if not tags:
        raise ActivationError("activation library must be nonempty")
    for t in tags:
        if t not in _BASE:
            raise ActivationError(f"unknown activation tag {t!r}; known: {BASE_TAGS}")
    if len(set(tags)) != len(tags):
        raise ActivationError(f"duplicate tags in library {tags}")
    return tags


# ---------------------------------------------------------------------------
# Activation specs
# ---------------------------------------------------------------------------


@dataclass
class Fixed:
    """A single base activation with no learnable parameters."""

    base: str

    kind = "fixed"

    def __post_init__(self):
        if self.base not in _BASE:
            raise ActivationError(f"unknown activation tag {self.base!r}")

    def param_arrays(self) -> dict[str, np.ndarray]:
        return {}


@dataclass
class LinearMix:
    """Learnable linear combination of library activations.

    ``theta`` holds the raw parameters.  With ``constrained=True`` the
    effective weights are softmax(theta); unconstrained, theta is used
    directly.  ``theta=None`` marks the parameters as awaiting seeded
    initialization.
    """

    library: tuple[str, ...]
    theta: np.ndarray | None = None
    constrained: bool = True

    kind = "linear"

    def __post_init__(self):
        self.library = validate_library(self.library)
        if self.theta is not None:
            self.theta = np.asarray(self.theta, dtype=np.float64).reshape(-1).copy()
            if self.theta.shape[0] != len(self.library):
                raise ActivationError(
                    f"theta length {self.theta.shape[0]} != library size {len(self.library)}"
                )

    def param_arrays(self) -> dict[str, np.ndarray]:
        return {"theta": self.theta}

    def mix_weights(self) -> np.ndarray:
        """Effective combination weights (softmax(theta) when constrained)."""
        if self.theta is None:
            raise ActivationError("parameters not initialized")
        return softmax(self.theta) if self.constrained else self.theta.copy()


@dataclass
class QuadraticMix:
    """Linear mix plus learnable pairwise products of library activations.

    ``quad`` is an upper-triangular coefficient matrix; entries below the
    diagonal must be zero.  ``constrained`` applies the simplex
    reparameterization to the linear part only (off by default).
    """

    library: tuple[str, ...]
    lin: np.ndarray | None = None
    quad: np.ndarray | None = None
    constrained: bool = False

    kind = "quadratic"

    def __post_init__(self):
        self.library = validate_library(self.library)
        s = len(self.library)
        if self.lin is not None:
            self.lin = np.asarray(self.lin, dtype=np.float64).reshape(-1).copy()
            if self.lin.shape[0] != s:
                raise ActivationError(f"lin length {self.lin.shape[0]} != library size {s}")
        if self.quad is not None:
            self.quad = np.asarray(self.quad, dtype=np.float64).copy()
            if self.quad.shape != (s, s):
                raise ActivationError(f"quad shape {self.quad.shape} != ({s}, {s})")
            if np.any(np.tril(self.quad, k=-1) != 0.0):
                raise ActivationError("quad has nonzero entries below the diagonal")

    def param_arrays(self) -> dict[str, np.ndarray]:
        return {"lin": self.lin, "quad": self.quad}

    def mix_weights(self) -> np.ndarray:
        if self.lin is None:
            raise ActivationError("parameters not initialized")
        return softmax(self.lin) if self.constrained else self.lin.copy()


ActivationSpec = Fixed | LinearMix | QuadraticMix


def softmax(v: np.ndarray) -> np.ndarray:
    e = np.exp(v - np.max(v))
    return e / e.sum()


def simplex_weights(spec: LinearMix | QuadraticMix) -> np.ndarray:
    """Simplex-constrained effective weights; errors on unconstrained specs."""
    if not spec.constrained:
        raise ActivationError("simplex_weights requires a constrained spec")
    return spec.mix_weights()


def _softmax_vjp(weights: np.ndarray, d_weights: np.ndarray) -> np.ndarray:
    """Pull a gradient in weight space back through softmax to theta space."""
    return weights * (d_weights - float(d_weights @ weights))


def init_params(spec: ActivationSpec, rng) -> None:
    """Seeded init of any uninitialized mix parameters.

    Draws are normal with std sqrt(2/|S|) (fan-in = library size).  For a
    quadratic mix only the upper-triangle entries are drawn, in row-major
    order, so the draw count equals the parameter count.  Preset arrays
    are left untouched and consume no draws.
    """
    if isinstance(spec, Fixed):
        return
    s = len(spec.library)
    std = math.sqrt(2.0 / s)
    if isinstance(spec, LinearMix):
        if spec.theta is None:
            spec.theta = rng.normal(0.0, std, (s,))
        return
    if spec.lin is None:
        spec.lin = rng.normal(0.0, std, (s,))
    if spec.quad is None:
        quad = np.zeros((s, s))
        iu = np.triu_indices(s)
        quad[iu] = rng.normal(0.0, std, (len(iu[0]),))
        spec.quad = quad


# ---------------------------------------------------------------------------
# Forward / backward
# ---------------------------------------------------------------------------


@dataclass
class MixCache:
    """Per-call state shared between a mix forward and its backward."""

    spec: ActivationSpec
    feats: np.ndarray  # (|S|, n, d) base values a_j(x)
    grads: np.ndarray  # (|S|, n, d) base derivatives a_j'(x)
    weights: np.ndarray  # effective linear weights used
    shape: tuple[int, ...] = field(default_factory=tuple)


def _library_feats(library, x):
    feats = np.stack([_BASE[t][0](x) for t in library])
    grads = np.stack([_BASE[t][1](x) for t in library])
    return feats, grads


def _lin_combine(coeffs: np.ndarray, stacked: np.ndarray) -> np.ndarray:
    """sum_j coeffs_j * stacked_j, accumulated in ascending j order.

    The fixed order keeps the linear part of the quadratic mix bit-equal
    to the plain linear mix with identical coefficients.
    """
    out = coeffs[0] * stacked[0]
    for j in range(1, len(coeffs)):
        out += coeffs[j] * stacked[j]
    return out


def linear_forward(spec: LinearMix, x: np.ndarray) -> tuple[np.ndarray, MixCache]:
    """Evaluate a linear mix elementwise; cache the per-member values."""
    x = np.asarray(x, dtype=np.float64)
    w = spec.mix_weights()
    feats, grads = _library_feats(spec.library, x)
    value = _lin_combine(w, feats)
    return value, MixCache(spec, feats, grads, w, x.shape)


def linear_backward(cache: MixCache, upstream: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of a linear mix: (d_input, d_theta).

    Mix parameters are layer-shared, so their gradient sums over every
    batch row and node.  For a constrained spec the returned d_theta is
    already pulled back through the softmax.
    """
    spec = cache.spec
    if not isinstance(spec, LinearMix):
        raise CacheMismatchError("cache does not belong to a linear mix")
    if upstream.shape != cache.shape:
        raise CacheMismatchError(
            f"upstream shape {upstream.shape} != cached {cache.shape}"
        )
    d_input = upstream * _lin_combine(cache.weights, cache.grads)
    d_w = np.array([float(np.sum(upstream * cache.feats[j])) for j in range(len(cache.weights))])
    d_theta = _softmax_vjp(cache.weights, d_w) if spec.constrained else d_w
    return d_input, d_theta


def quadratic_forward(spec: QuadraticMix, x: np.ndarray) -> tuple[np.ndarray, MixCache]:
    """Evaluate a quadratic mix elementwise; cache the per-member values."""
    x = np.asarray(x, dtype=np.float64)
    w = spec.mix_weights()
    feats, grads = _library_feats(spec.library, x)
    value = _lin_combine(w, feats)
    s = len(spec.library)
    quad_part = np.zeros_like(value)
    for j in range(s):
        for k in range(j, s):
            q = spec.quad[j, k]
            if q != 0.0:
                quad_part += q * feats[j] * feats[k]
    value = value + quad_part
    return value, MixCache(spec, feats, grads, w, x.shape)


def quadratic_backward(
    cache: MixCache, upstream: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of a quadratic mix: (d_input, d_lin, d_quad).

    d_quad is upper-triangular like the parameter itself; sums run over
    batch rows and nodes (shared-per-layer parameters).
    """
    spec = cache.spec
    if not isinstance(spec, QuadraticMix):
        raise CacheMismatchError("cache does not belong to a quadratic mix")
    if upstream.shape != cache.shape:
        raise CacheMismatchError(
            f"upstream shape {upstream.shape} != cached {cache.shape}"
        )
    feats, grads = cache.feats, cache.grads
    s = len(spec.library)
    slope = _lin_combine(cache.weights, grads)
    d_quad = np.zeros((s, s))
    for j in range(s):
        for k in range(j, s):
            d_quad[j, k] = float(np.sum(upstream * feats[j] * feats[k]))
            q = spec.quad[j, k]
            if q != 0.0:
                slope = slope + q * (grads[j] * feats[k] + feats[j] * grads[k])
    d_input = upstream * slope
    d_w = np.array([float(np.sum(upstream * feats[j])) for j in range(s)])
    d_lin = _softmax_vjp(cache.weights, d_w) if spec.constrained else d_w
    return d_input, d_lin, d_quad


def forward(spec: ActivationSpec, x: np.ndarray) -> tuple[np.ndarray, MixCache | np.ndarray]:
    """Dispatch on spec kind; returns (value, cache) for the backward pass."""
    if isinstance(spec, Fixed):
        x = np.asarray(x, dtype=np.float64)
        return _BASE[spec.base][0](x), _BASE[spec.base][1](x)
    if isinstance(spec, LinearMix):
        return linear_forward(spec, x)
    if isinstance(spec, QuadraticMix):
        return quadratic_forward(spec, x)
    raise ActivationError(f"not an activation spec: {spec!r}")


def backward(spec: ActivationSpec, cache, upstream: np.ndarray):
    """Dispatch on spec kind; returns (d_input, {param name: gradient})."""
    if isinstance(spec, Fixed):
        return upstream * cache, {}
    if isinstance(spec, LinearMix):
        d_input, d_theta = linear_backward(cache, upstream)
        return d_input, {"theta": d_theta}
    if isinstance(spec, QuadraticMix):
        d_input, d_lin, d_quad = quadratic_backward(cache, upstream)
        return d_input, {"lin": d_lin, "quad": d_quad}
    raise ActivationError(f"not an activation spec: {spec!r}")
