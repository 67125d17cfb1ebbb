"""Synthetic regression targets: eight classic global-optimization surfaces.

Each function evaluates a batch of points row-wise and declares a default
per-axis evaluation domain.  Domains are conventions from the standard
benchmark collections and can be overridden per instance; evaluation
outside the declared domain is an error naming the offending axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .linalg import Matrix
from .sampling import HaltonSampler, scale_to_box


class DomainError(ValueError):
    """Point lies outside a test function's declared domain."""


# Shekel constants: the standard m=10 parameter set.  The inner sum runs
# over four coordinates; 2-D use fixes the remaining two at FIXED_TAIL.
SHEKEL_BETA = 0.1 * np.array([1, 2, 2, 4, 4, 6, 3, 7, 5, 5], dtype=np.float64)
SHEKEL_C = np.array(
    [
        [4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 5.0, 8.0, 6.0, 7.0],
        [4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.6],
        [4.0, 1.0, 8.0, 6.0, 3.0, 2.0, 5.0, 8.0, 6.0, 7.0],
        [4.0, 1.0, 8.0, 6.0, 7.0, 9.0, 3.0, 1.0, 2.0, 3.6],
    ]
)
SHEKEL_FIXED_TAIL = 4.0


def _ackley(X):
    d = X.shape[1]
    rms = np.sqrt(np.sum(np.square(X), axis=1) / d)
    mean_cos = np.mean(np.cos(2.0 * np.pi * X), axis=1)
    return -20.0 * np.exp(-0.2 * rms) - np.exp(mean_cos) + 20.0 + math.e


def _shubert(X):
    i = np.arange(1, 6, dtype=np.float64)
    # per coordinate: sum_i i*cos((i+1)x + i), then product over coordinates
    terms = np.sum(i * np.cos((i + 1.0) * X[..., None] + i), axis=2)
    return np.prod(terms, axis=1)


def _hyper_ellipsoid(X):
    # sum_i sum_{j<=i} x_j^2 == sum_j (d - j) * x_j^2 with 0-based j
    d = X.shape[1]
    weights = np.arange(d, 0, -1, dtype=np.float64)
    return np.sum(weights * np.square(X), axis=1)


def _levy(X):
    w = 1.0 + (X - 1.0) / 4.0
    head = np.square(np.sin(np.pi * w[:, 0]))
    mid = np.sum(
        np.square(w - 1.0) * (1.0 + 10.0 * np.square(np.sin(np.pi * w + 1.0))), axis=1
    )
    tail = np.square(w[:, -1] - 1.0) * (1.0 + np.square(np.sin(2.0 * np.pi * w[:, -1])))
    return head + mid + tail


def _styblinski(X):
    x2 = np.square(X)
    return 0.5 * np.sum(x2 * x2 - 16.0 * x2 + 5.0 * X, axis=1)


def _shekel(X, C=SHEKEL_C, beta=SHEKEL_BETA, fixed_tail=SHEKEL_FIXED_TAIL):
    n, d = X.shape
    full = np.full((n, 4), fixed_tail)
    full[:, :d] = X
    # (n, m) squared distances to the m columns of C
    sq = np.sum(np.square(full[:, :, None] - C[None, :, :]), axis=1)
    return -np.sum(1.0 / (sq + beta), axis=1)


def _griewank(X):
    d = X.shape[1]
    idx = np.sqrt(np.arange(1, d + 1, dtype=np.float64))
    return np.sum(np.square(X), axis=1) / 4000.0 - np.prod(np.cos(X / idx), axis=1) + 1.0


def _zhou(X):
    d = X.shape[1]
    norm = (2.0 * np.pi) ** (-d / 2.0)
    phi1 = norm * np.exp(-50.0 * np.sum(np.square(X - 1.0 / 3.0), axis=1))
    phi2 = norm * np.exp(-50.0 * np.sum(np.square(X - 2.0 / 3.0), axis=1))
    return 10.0 ** d / 2.0 * (phi1 + phi2)


_REGISTRY: dict[str, tuple[Callable, tuple[float, float]]] = {
    "ackley": (_ackley, (-32.768, 32.768)),
    "shubert": (_shubert, (-10.0, 10.0)),
    "hyper_ellipsoid": (_hyper_ellipsoid, (-65.536, 65.536)),
    "levy": (_levy, (-10.0, 10.0)),
    "styblinski": (_styblinski, (-5.0, 5.0)),
    "shekel": (_shekel, (0.0, 10.0)),
    "griewank": (_griewank, (-600.0, 600.0)),
    "zhou": (_zhou, (0.0, 1.0)),
}

FUNCTION_NAMES = tuple(_REGISTRY)


@dataclass(frozen=True)
class TestFunction:
    name: str
    dim: int
    domain: tuple[tuple[float, float], ...]  # per-axis (lo, hi)

    @property
    def lo(self) -> np.ndarray:
        return np.array([a for a, _ in self.domain])

    @property
    def hi(self) -> np.ndarray:
        return np.array([b for _, b in self.domain])

    def eval_batch(self, X: Matrix) -> np.ndarray:
        """Values for an (n x dim) batch of in-domain points."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise DomainError(f"{self.name}: expected (n x {self.dim}) points, got {X.shape}")
        for k, (a, b) in enumerate(self.domain):
            bad = (X[:, k] < a) | (X[:, k] > b)
            if np.any(bad):
                v = X[np.argmax(bad), k]
                raise DomainError(
                    f"{self.name}: value {v} outside [{a}, {b}] on axis {k}"
                )
        return _REGISTRY[self.name][0](X)

    def __call__(self, x) -> float:
        """Single-point evaluation."""
        return float(self.eval_batch(np.asarray(x, dtype=np.float64).reshape(1, -1))[0])


def get_function(name: str, dim: int = 2, domain=None) -> TestFunction:
    """Look up a test function by its lowercase name."""
    if name not in _REGISTRY:
        raise DomainError(f"unknown test function {name!r}; known: {FUNCTION_NAMES}")
    if domain is None:
        lo, hi = _REGISTRY[name][1]
        domain = tuple((lo, hi) for _ in range(dim))
    else:
        domain = tuple((float(a), float(b)) for a, b in domain)
        if len(domain) != dim:
            raise DomainError(f"domain has {len(domain)} axes for dim {dim}")
    return TestFunction(name, dim, domain)


def make_dataset(f: TestFunction, sampler: HaltonSampler, n: int) -> tuple[Matrix, Matrix]:
    """n quasi-random in-domain points X (n x dim) and targets y (n x 1)."""
    if n < 1:
        raise DomainError(f"make_dataset: n must be >= 1, got {n}")
    if sampler.dim != f.dim:
        raise DomainError(f"sampler dim {sampler.dim} != function dim {f.dim}")
    X = scale_to_box(sampler.take(n), f.lo, f.hi)
    y = f.eval_batch(X).reshape(-1, 1)
    return X, y
