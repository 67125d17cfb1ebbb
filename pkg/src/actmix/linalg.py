"""Dense float64 matrix arithmetic with explicit shape contracts.

Matrices are plain 2-D numpy float64 arrays (row-major).  numpy supplies
the arithmetic; this module adds the shape checking and error reporting
the rest of the package relies on, plus the seeded normal-matrix helper.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from .rng import Rng

Matrix = np.ndarray


class ShapeError(ValueError):
    """Operand shapes are incompatible for the requested operation."""


def as_matrix(data) -> Matrix:
    """Coerce nested lists / arrays to a 2-D float64 matrix."""
    m = np.asarray(data, dtype=np.float64)
    if m.ndim == 1:
        m = m.reshape(1, -1)
    if m.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got ndim={m.ndim}")
    return m


def matmul(a: Matrix, b: Matrix) -> Matrix:
    """Standard matrix product, (n x k) @ (k x m) -> (n x m)."""
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: inner dimensions differ, {a.shape} @ {b.shape}")
    return a @ b


_UNARY: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "neg": np.negative,
    "abs": np.abs,
    "square": np.square,
}

_BINARY: dict[str, Callable[[np.ndarray, np.ndarray], np.ndarray]] = {
    "add": np.add,
    "sub": np.subtract,
    "mul": np.multiply,
}


def elementwise(op: str, a: Matrix, b: Matrix | None = None) -> Matrix:
    """Apply a named entrywise operation; binary ops require equal shapes."""
    if op in _UNARY:
        if b is not None:
            raise ShapeError(f"elementwise: {op!r} is unary but got two operands")
        return _UNARY[op](a)
    if op in _BINARY:
        if b is None:
            raise ShapeError(f"elementwise: {op!r} is binary but got one operand")
        if a.shape != b.shape:
            raise ShapeError(f"elementwise {op}: shapes differ, {a.shape} vs {b.shape}")
        return _BINARY[op](a, b)
    raise ShapeError(f"elementwise: unknown op {op!r}")


def add_rowvec(a: Matrix, v: np.ndarray) -> Matrix:
    """Add a length-cols row vector to every row (bias addition)."""
    v = np.asarray(v, dtype=np.float64).reshape(-1)
    if v.shape[0] != a.shape[1]:
        raise ShapeError(f"add_rowvec: vector length {v.shape[0]} vs matrix {a.shape}")
    return a + v


def rng_normal(rng: Rng, mean: float, std: float, shape: tuple[int, int]) -> Matrix:
    """Matrix of i.i.d. normal draws, deterministic given the stream state."""
    return rng.normal(mean, std, shape)
