"""Uniform triangulated grids on rectangles."""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .complex import GridInfo, SimplicialComplex, build_complex


def _exact(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    return Fraction(repr(float(x))) if not isinstance(x, str) else Fraction(x)


def grid_mesh(region, nx: int, ny: int | None = None) -> SimplicialComplex:
    """Split ``region = (x0, x1, y0, y1)`` into ``nx * ny`` squares, two triangles each.

    Squares are cut along the diagonal from the lower-left to the upper-right
    corner. Vertex ``(i, j)`` gets id ``j * (nx + 1) + i`` and exact rational
    coordinates.
    """
    ny = nx if ny is None else ny
    if nx < 1 or ny < 1:
        raise ValueError("need at least one subdivision per side")
    x0, x1, y0, y1 = (_exact(v) for v in region)
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"degenerate region {region}")
    hx = (x1 - x0) / nx
    hy = (y1 - y0) / ny
    coords = [(x0 + i * hx, y0 + j * hy) for j in range(ny + 1) for i in range(nx + 1)]

    def vid(i: int, j: int) -> int:
        return j * (nx + 1) + i

    tris = []
    for j in range(ny):
        for i in range(nx):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            tris.append((a, b, c))
            tris.append((a, c, d))
    K = build_complex(coords, tris)
    ij = np.array([(i, j) for j in range(ny + 1) for i in range(nx + 1)], dtype=np.int64)
    return SimplicialComplex(K.simplices, coords=K.coords, grid=GridInfo(nx, ny, ij))
