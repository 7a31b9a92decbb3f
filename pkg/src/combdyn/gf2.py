"""Dense linear algebra over Z/2 on ``uint8`` numpy arrays."""

from __future__ import annotations

import numpy as np


def as_gf2(a) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) & 1).astype(np.uint8)


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return as_gf2(a.astype(np.int64) @ b.astype(np.int64))


def rref(a: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = as_gf2(a).copy()
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        p = r + nz[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
        hit = np.flatnonzero(m[:, c])
        hit = hit[hit != r]
        m[hit] ^= m[r]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: np.ndarray) -> int:
    a = np.asarray(a)
    if a.size == 0:
        return 0
    return len(rref(a)[1])


def nullspace(a: np.ndarray) -> np.ndarray:
    """Columns form a basis of ``{x : a x = 0}``."""
    a = as_gf2(a)
    n = a.shape[1]
    m, piv = rref(a)
    free = [c for c in range(n) if c not in set(piv)]
    basis = np.zeros((n, len(free)), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[f, k] = 1
        for r, p in enumerate(piv):
            basis[p, k] = m[r, f]
    return basis


def column_space(a: np.ndarray) -> np.ndarray:
    """A basis of the column space, as columns."""
    a = as_gf2(a)
    if a.size == 0:
        return np.zeros((a.shape[0], 0), dtype=np.uint8)
    _, piv = rref(a)
    return a[:, piv]


def solve(a: np.ndarray, b: np.ndarray) -> np.ndarray | None:
    """One solution ``x`` of ``a x = b`` (``b`` may have several columns), or None."""
    a = as_gf2(a)
    b = as_gf2(b)
    vec = b.ndim == 1
    if vec:
        b = b[:, None]
    n = a.shape[1]
    m, piv = rref(np.hstack([a, b]))
    if any(p >= n for p in piv):
        return None
    x = np.zeros((n, b.shape[1]), dtype=np.uint8)
    for r, p in enumerate(piv):
        x[p] = m[r, n:]
    return x[:, 0] if vec else x


def inverse(a: np.ndarray) -> np.ndarray:
    a = as_gf2(a)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("square matrix required")
    m, piv = rref(np.hstack([a, np.eye(n, dtype=np.uint8)]))
    if piv[:n] != list(range(n)):
        raise np.linalg.LinAlgError("singular matrix over Z/2")
    return m[:, n:]


def intersect_spaces(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Basis (columns) of ``span(u) ∩ span(w)``."""
    if u.shape[1] == 0 or w.shape[1] == 0:
        return np.zeros((u.shape[0], 0), dtype=np.uint8)
    ns = nullspace(np.hstack([u, w]))
    return column_space(matmul(u, ns[: u.shape[1]]))
