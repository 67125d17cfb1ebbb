"""Halton low-discrepancy sequences and regular evaluation grids.

The radical inverse is computed exactly: the base-b digits of the index
are reversed into an integer numerator over b^m, and a single float
division produces the coordinate.  Every intermediate fits in 64-bit
integer arithmetic for any index this package uses, so restarting a
sampler reproduces the identical sequence bit-for-bit.
"""

from __future__ import annotations

import numpy as np

from .linalg import Matrix


class SamplingError(ValueError):
    """Invalid sampler or grid parameters."""


def first_primes(n: int) -> list[int]:
    """The first n primes, by trial division (n is small here)."""
    primes: list[int] = []
    candidate = 2
    while len(primes) < n:
        if all(candidate % p for p in primes):
            primes.append(candidate)
        candidate += 1
    return primes


def radical_inverse(index: int, base: int) -> float:
    """Digit-reversed fraction of index in the given base, in (0, 1)."""
    num, den = 0, 1
    while index > 0:
        index, digit = divmod(index, base)
        num = num * base + digit
        den *= base
    return num / den


class HaltonSampler:
    """Low-discrepancy points in (0,1)^dim; coordinate k uses the k-th prime.

    Indices are 1-based; index 0 (the all-zero point) is never emitted.
    Single-owner: `take` advances the sampler.
    """

    def __init__(self, dim: int):
        if dim < 1:
            raise SamplingError(f"dim must be >= 1, got {dim}")
        self.dim = dim
        self.bases = first_primes(dim)
        self.index = 1

    def take(self, n: int) -> Matrix:
        """Next n points as an (n x dim) matrix."""
        out = np.empty((n, self.dim))
        for i in range(n):
            for k, b in enumerate(self.bases):
                out[i, k] = radical_inverse(self.index, b)
            self.index += 1
        return out

    def skip(self, n: int) -> None:
        self.index += n


def scale_to_box(points: Matrix, lo, hi) -> Matrix:
    """Affine map of unit-cube points into the box [lo, hi] per coordinate."""
    lo = np.asarray(lo, dtype=np.float64).reshape(-1)
    hi = np.asarray(hi, dtype=np.float64).reshape(-1)
    if lo.shape != hi.shape or lo.shape[0] != points.shape[1]:
        raise SamplingError(
            f"bounds shapes {lo.shape}/{hi.shape} do not match points {points.shape}"
        )
    if np.any(lo >= hi):
        k = int(np.argmax(lo >= hi))
        raise SamplingError(f"inverted bounds on axis {k}: lo={lo[k]}, hi={hi[k]}")
    return lo + points * (hi - lo)


def grid2d(lo, hi, n_per_axis: int) -> Matrix:
    """Row-major (n^2 x 2) lattice over [lo, hi]^2 including both endpoints."""
    if n_per_axis < 2:
        raise SamplingError(f"n_per_axis must be >= 2, got {n_per_axis}")
    lo = np.asarray(lo, dtype=np.float64).reshape(-1)
    hi = np.asarray(hi, dtype=np.float64).reshape(-1)
    if lo.size == 1:
        lo = np.repeat(lo, 2)
    if hi.size == 1:
        hi = np.repeat(hi, 2)
    ax0 = np.linspace(lo[0], hi[0], n_per_axis)
    ax1 = np.linspace(lo[1], hi[1], n_per_axis)
    g0, g1 = np.meshgrid(ax0, ax1, indexing="ij")
    return np.column_stack([g0.ravel(), g1.ravel()])
