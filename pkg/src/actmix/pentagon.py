"""Generalized barycentric coordinates on a regular pentagon.

Uses the Wachspress construction: positive in the interior, exactly
one-hot at a vertex, linear along an edge, and summing to one
everywhere.  The sweep grid is a regular lattice over the pentagon's
bounding box filtered to strictly interior points, with the five
vertices and the centroid appended so degenerate coordinates are
exercised explicitly.
"""

from __future__ import annotations

import numpy as np


def regular_pentagon() -> np.ndarray:
    """Vertices of the unit-circumradius regular pentagon, CCW from the top."""
    angles = np.deg2rad(90.0 + 72.0 * np.arange(5))
    return np.column_stack([np.cos(angles), np.sin(angles)])


def _tri_area(a, b, c) -> float:
    """Twice the signed area of triangle (a, b, c); positive when CCW."""
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def barycentric(point, vertices: np.ndarray) -> np.ndarray:
    """Wachspress coordinates of a point in a convex CCW polygon.

    Exact one-hot at a vertex; linear interpolation on an edge; the
    rational interior formula otherwise.  Points outside the polygon are
    rejected.
    """
    p = np.asarray(point, dtype=np.float64)
    n = len(vertices)
    edge = np.array([_tri_area(vertices[i], vertices[(i + 1) % n], p) for i in range(n)])
    if np.any(edge < 0.0):
        raise ValueError(f"point {p.tolist()} lies outside the polygon")
    zero = np.flatnonzero(edge == 0.0)
    if zero.size >= 2:
        # Two incident edges vanish only at their shared vertex.
        lam = np.zeros(n)
        i, j = zero[0], zero[-1]
        lam[(i + 1) % n if (i + 1) % n == j else i] = 1.0
        return lam
    if zero.size == 1:
        i = int(zero[0])
        a, b = vertices[i], vertices[(i + 1) % n]
        seg = b - a
        t = float(np.dot(p - a, seg) / np.dot(seg, seg))
        lam = np.zeros(n)
        lam[i] = 1.0 - t
        lam[(i + 1) % n] = t
        return lam
    w = np.empty(n)
    for i in range(n):
        prev, nxt = (i - 1) % n, (i + 1) % n
        w[i] = _tri_area(vertices[prev], vertices[i], vertices[nxt]) / (
            edge[prev] * edge[i]
        )
    return w / w.sum()


def interior_grid(vertices: np.ndarray, resolution: int) -> np.ndarray:
    """Lattice points of the bounding box strictly inside the polygon."""
    lo = vertices.min(axis=0)
    hi = vertices.max(axis=0)
    xs = np.linspace(lo[0], hi[0], resolution)
    ys = np.linspace(lo[1], hi[1], resolution)
    pts = []
    n = len(vertices)
    for x in xs:
        for y in ys:
            p = np.array([x, y])
            if all(
                _tri_area(vertices[i], vertices[(i + 1) % n], p) > 0.0 for i in range(n)
            ):
                pts.append(p)
    return np.array(pts) if pts else np.empty((0, 2))


def sweep_points(resolution: int = 25) -> np.ndarray:
    """Interior lattice plus the five vertices and the centroid."""
    verts = regular_pentagon()
    centroid = verts.mean(axis=0).reshape(1, 2)
    inner = interior_grid(verts, resolution)
    parts = [verts, centroid] + ([inner] if len(inner) else [])
    return np.vstack(parts)
