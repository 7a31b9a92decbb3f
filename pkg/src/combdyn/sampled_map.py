"""Combinatorial dynamical systems reconstructed from sampled point pairs.

``count_frequencies`` bins pairs ``(x, y)`` into closed toplexes and
``build_f_mu`` thresholds the relative frequencies and closes every image
under ``co``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

import numpy as np
from scipy import sparse

from . import geometry as geo
from .complex import SimplicialComplex, co_iterative, grid_bounds, grid_cells_inside
from .dynamics import CombinatorialDynamicalSystem

log = logging.getLogger(__name__)

_MARGIN = 1e-9


def as_fraction(mu) -> Fraction:
    """Exact threshold; floats are read through their shortest decimal form (0.3 -> 3/10)."""
    if isinstance(mu, Fraction):
        return mu
    if isinstance(mu, (int, np.integer)):
        return Fraction(int(mu))
    if isinstance(mu, str):
        return Fraction(mu)
    return Fraction(repr(float(mu)))


def _check_pure(K: SimplicialComplex) -> None:
    if K.coords is None:
        raise ValueError("sampling requires a geometric realization")
    d = K.ambient_dim
    if d not in (1, 2):
        raise ValueError("only 1-D and planar complexes are supported")
    tops = K.toplexes
    if np.any(K.dims[tops] != d):
        raise ValueError(f"mixed-dimension mesh: every toplex must be {d}-dimensional")


class PointLocator:
    """Closed-cell membership of points in the toplexes of a pure complex.

    A bucket grid proposes candidate toplexes; barycentric coordinates in
    floating point decide clear cases and an exact rational test decides
    points within ``1e-9`` of a cell boundary.
    """

    def __init__(self, K: SimplicialComplex):
        _check_pure(K)
        self.K = K
        self.d = K.ambient_dim
        self.tops = K.toplexes
        X = K.float_coords
        self.verts = np.array([K.simplices[t] for t in self.tops], dtype=np.int64)
        P = X[self.verts]  # (T, d+1, d)
        self.P = P
        lo, hi = P.min(axis=1), P.max(axis=1)
        self.lo_all, self.hi_all = lo.min(axis=0), hi.max(axis=0)
        T = len(self.tops)
        per_axis = max(1, int(round(T ** (1.0 / self.d))))
        self.nb = np.full(self.d, per_axis, dtype=np.int64)
        span = np.where(self.hi_all > self.lo_all, self.hi_all - self.lo_all, 1.0)
        self.cell = span / self.nb
        b_lo = self._bucket(lo - _MARGIN)
        b_hi = self._bucket(hi + _MARGIN)
        buckets: list[list[int]] = [[] for _ in range(int(np.prod(self.nb)))]
        for t in range(T):
            rng = [range(b_lo[t, k], b_hi[t, k] + 1) for k in range(self.d)]
            for idx in np.stack(np.meshgrid(*rng, indexing="ij"), axis=-1).reshape(-1, self.d):
                buckets[self._flat(idx)].append(t)
        self.ptr = np.zeros(len(buckets) + 1, dtype=np.int64)
        self.ptr[1:] = np.cumsum([len(b) for b in buckets])
        self.idx = np.array([t for b in buckets for t in b], dtype=np.int64)
        # barycentric solve: lambda[1:] = inv(E) (x - p0) with E = [p1 - p0, ...]
        E = (P[:, 1:, :] - P[:, :1, :]).transpose(0, 2, 1)
        self.Einv = np.linalg.inv(E)
        self.exact_cells = [K.cell_points(t) for t in self.tops]

    def _bucket(self, x: np.ndarray) -> np.ndarray:
        b = np.floor((x - self.lo_all) / self.cell).astype(np.int64)
        return np.clip(b, 0, self.nb - 1)

    def _flat(self, idx) -> int:
        out = 0
        for k in range(self.d):
            out = out * int(self.nb[k]) + int(idx[k])
        return out

    def locate(self, pts: np.ndarray, chunk: int = 200_000) -> tuple[np.ndarray, np.ndarray]:
        """Incidences ``(point index, toplex position)`` of points in closed toplexes, sorted by point."""
        pts = np.asarray(pts, dtype=float).reshape(len(pts), self.d)
        out_p, out_t = [], []
        for start in range(0, len(pts), chunk):
            p, t = self._locate_chunk(pts[start:start + chunk])
            out_p.append(p + start)
            out_t.append(t)
        if not out_p:
            return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
        p = np.concatenate(out_p)
        t = np.concatenate(out_t)
        order = np.lexsort((t, p))
        return p[order], t[order]

    def _locate_chunk(self, pts: np.ndarray):
        inside_box = np.all((pts >= self.lo_all - _MARGIN) & (pts <= self.hi_all + _MARGIN), axis=1)
        b = self._bucket(pts)
        flat = np.zeros(len(pts), dtype=np.int64)
        for k in range(self.d):
            flat = flat * self.nb[k] + b[:, k]
        counts = np.where(inside_box, self.ptr[flat + 1] - self.ptr[flat], 0)
        pi = np.repeat(np.arange(len(pts)), counts)
        offs = np.arange(pi.size) - np.repeat(np.cumsum(counts) - counts, counts)
        ti = self.idx[self.ptr[flat[pi]] + offs]
        rel = pts[pi] - self.P[ti, 0, :]
        lam_rest = np.einsum("nij,nj->ni", self.Einv[ti], rel)
        lam = np.concatenate([1.0 - lam_rest.sum(axis=1, keepdims=True), lam_rest], axis=1)
        mn = lam.min(axis=1)
        sure = mn > _MARGIN
        maybe = (~sure) & (mn >= -_MARGIN)
        keep = sure.copy()
        for k in np.flatnonzero(maybe):
            q = geo.to_point([Fraction(float(c)) for c in pts[pi[k]]])
            keep[k] = _in_closed_cell(q, self.exact_cells[ti[k]])
        return pi[keep], ti[keep]


def _in_closed_cell(q: geo.Point, cell) -> bool:
    if len(cell) == 2:
        return geo.on_segment_closed(q, cell[0], cell[1])
    return geo.in_closed_triangle(q, *cell)


@dataclass
class FrequencyTable:
    """Counts ``n[t, t']`` over toplex positions, with rejection statistics."""

    toplexes: np.ndarray
    counts: sparse.csr_matrix
    n_pairs: int = 0
    n_rejected: int = 0

    @property
    def n_max(self) -> int:
        return int(self.counts.max()) if self.counts.nnz else 0

    def position(self, sid: int) -> int:
        pos = np.searchsorted(self.toplexes, sid)
        if pos >= len(self.toplexes) or self.toplexes[pos] != sid:
            raise KeyError(f"simplex {sid} is not a toplex")
        return int(pos)

    def count(self, t1: int, t2: int) -> int:
        return int(self.counts[self.position(t1), self.position(t2)])

    def relative(self, t1: int, t2: int) -> Fraction:
        return Fraction(self.count(t1, t2), self.n_max)

    @classmethod
    def from_counts(cls, K: SimplicialComplex, counts: Mapping[tuple[int, int], int]):
        """Table from explicit counts keyed by toplex ids."""
        tops = K.toplexes
        pos = {int(t): i for i, t in enumerate(tops)}
        rows, cols, vals = [], [], []
        for (a, b), n in counts.items():
            if n < 0:
                raise ValueError("counts must be nonnegative")
            rows.append(pos[a])
            cols.append(pos[b])
            vals.append(int(n))
        T = len(tops)
        mat = sparse.csr_matrix((np.array(vals, dtype=np.int64), (rows, cols)), shape=(T, T))
        return cls(tops, mat, n_pairs=int(sum(vals)))


def count_frequencies(K: SimplicialComplex, X: np.ndarray, Y: np.ndarray, locator: PointLocator | None = None) -> FrequencyTable:
    """Count pairs with ``x`` in the closed cell of one toplex and ``y`` in another.

    Pairs with either point outside the polytope are dropped and counted in
    ``n_rejected``.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if len(X) != len(Y):
        raise ValueError("X and Y must have the same length")
    if len(X) == 0:
        raise ValueError("no sample pairs")
    loc = locator or PointLocator(K)
    n = len(X)
    xp, xt = loc.locate(X)
    yp, yt = loc.locate(Y)
    cx = np.bincount(xp, minlength=n)
    cy = np.bincount(yp, minlength=n)
    ok = (cx > 0) & (cy > 0)
    xs = np.concatenate([[0], np.cumsum(cx)])
    ys = np.concatenate([[0], np.cumsum(cy)])
    simple = np.flatnonzero(ok & (cx == 1) & (cy == 1))
    rows = [xt[xs[simple]]]
    cols = [yt[ys[simple]]]
    extra_r, extra_c = [], []
    for i in np.flatnonzero(ok & ((cx > 1) | (cy > 1))):
        for a in xt[xs[i]:xs[i + 1]]:
            for b in yt[ys[i]:ys[i + 1]]:
                extra_r.append(a)
                extra_c.append(b)
    rows.append(np.array(extra_r, dtype=np.int64))
    cols.append(np.array(extra_c, dtype=np.int64))
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    T = len(loc.tops)
    mat = sparse.csr_matrix((np.ones(r.size, dtype=np.int64), (r, c)), shape=(T, T))
    mat.sum_duplicates()
    table = FrequencyTable(loc.tops, mat, n_pairs=int(ok.sum()), n_rejected=int(n - ok.sum()))
    log.info("binned %d pairs, rejected %d, n_max=%d", table.n_pairs, table.n_rejected, table.n_max)
    return table


def admitted(table: FrequencyTable, mu) -> sparse.csr_matrix:
    """Boolean matrix of ``n[t, t'] / n_max >= mu`` (dense rows when ``mu == 0``)."""
    mu = as_fraction(mu)
    if not 0 <= mu <= 1:
        raise ValueError(f"threshold {mu} outside [0, 1]")
    T = len(table.toplexes)
    if mu == 0:
        return sparse.csr_matrix(np.ones((T, T), dtype=bool))
    m = table.counts.tocsr().copy()
    m.data = m.data * mu.denominator >= mu.numerator * table.n_max
    m.eliminate_zeros()
    return m.astype(bool)


def build_f_mu(K: SimplicialComplex, table: FrequencyTable, mu) -> CombinatorialDynamicalSystem:
    """``F_mu(s) = co`` of the union of admitted targets over the toplexes above ``s``."""
    A = admitted(table, mu)
    pos = {int(t): i for i, t in enumerate(table.toplexes)}
    star_tops = [tuple(sorted(pos[int(t)] for t in K.stars[s] if K.is_toplex[t])) for s in range(len(K))]
    if K.grid is not None:
        return _build_grid(K, table, A, star_tops)
    images: list[frozenset[int]] = []
    by_union: dict[frozenset[int], int] = {}
    image_of = np.full(len(K), -1, dtype=np.int64)
    row_sets = [frozenset(int(table.toplexes[j]) for j in A.indices[A.indptr[i]:A.indptr[i + 1]]) for i in range(A.shape[0])]
    for s in range(len(K)):
        union = frozenset().union(*(row_sets[i] for i in star_tops[s]))
        if not union:
            continue
        if union not in by_union:
            by_union[union] = len(images)
            images.append(co_iterative(K, union))
        image_of[s] = by_union[union]
    return CombinatorialDynamicalSystem(K, [sorted(im) for im in images], image_of)


def _build_grid(K: SimplicialComplex, table: FrequencyTable, A: sparse.csr_matrix, star_tops) -> CombinatorialDynamicalSystem:
    gb = grid_bounds(K)
    tlo = gb.lo[table.toplexes]
    thi = gb.hi[table.toplexes]
    T = A.shape[0]
    big = np.iinfo(np.int64).max
    row_lo = np.full((T, 3), big, dtype=np.int64)
    row_hi = np.full((T, 3), -big, dtype=np.int64)
    nonempty = np.diff(A.indptr) > 0
    for i in np.flatnonzero(nonempty):
        cols = A.indices[A.indptr[i]:A.indptr[i + 1]]
        row_lo[i] = tlo[cols].min(axis=0)
        row_hi[i] = thi[cols].max(axis=0)
    images: list[np.ndarray] = []
    by_bounds: dict[tuple, int] = {}
    image_of = np.full(len(K), -1, dtype=np.int64)
    for s in range(len(K)):
        rows = [i for i in star_tops[s] if nonempty[i]]
        if not rows:
            continue
        key = tuple(row_lo[rows].min(axis=0)) + tuple(row_hi[rows].max(axis=0))
        k = by_bounds.get(key)
        if k is None:
            k = by_bounds[key] = len(images)
            images.append(grid_cells_inside(K, np.array(key)))
        image_of[s] = k
    return CombinatorialDynamicalSystem(K, images, image_of)


def write_samples(path, X: np.ndarray, Y: np.ndarray) -> None:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    X = X.reshape(len(X), -1)
    Y = Y.reshape(len(Y), -1)
    d = X.shape[1]
    header = "x,y" if d == 1 else ",".join([f"x{i + 1}" for i in range(d)] + [f"y{i + 1}" for i in range(d)])
    np.savetxt(path, np.hstack([X, Y]), fmt="%.17g", delimiter=",", header=header, comments="")


def read_samples(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    d = data.shape[1] // 2
    return data[:, :d], data[:, d:]
