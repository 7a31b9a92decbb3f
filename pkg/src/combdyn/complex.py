"""Simplicial complexes viewed as finite T0 spaces.

A :class:`SimplicialComplex` stores the face poset of a complex together
with an optional geometric realization. Simplex ids are dense integers
ordered by ``(dimension, sorted vertex tuple)``, so faces always precede
their cofaces. Sets of simplices are plain ``frozenset`` objects of ids.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from . import geometry as geo


@dataclass(frozen=True)
class GridInfo:
    """Index data of a structured triangulation of a rectangle.

    ``ij[v]`` is the (column, row) index of vertex ``v``; every square is
    split along the diagonal from its lower-left to its upper-right corner,
    so all mesh edges satisfy ``i = const``, ``j = const`` or ``i - j = const``.
    """

    nx: int
    ny: int
    ij: np.ndarray


class SimplicialComplex:
    """Face poset of a finite simplicial complex.

    Parameters
    ----------
    simplices:
        Sorted vertex tuples, closed under faces, already in id order.
    coords:
        Optional per-vertex coordinates (exact where possible).
    """

    def __init__(self, simplices: Sequence[tuple[int, ...]], coords=None, grid: GridInfo | None = None):
        self.simplices: list[tuple[int, ...]] = list(simplices)
        self.index: dict[tuple[int, ...], int] = {s: i for i, s in enumerate(self.simplices)}
        self.dims = np.array([len(s) - 1 for s in self.simplices], dtype=np.int64)
        self.coords = coords
        self.grid = grid
        facets: list[tuple[int, ...]] = []
        cofacets: list[list[int]] = [[] for _ in self.simplices]
        for i, s in enumerate(self.simplices):
            if len(s) == 1:
                facets.append(())
                continue
            fs = tuple(self.index[f] for f in combinations(s, len(s) - 1))
            facets.append(fs)
            for f in fs:
                cofacets[f].append(i)
        self.facets = facets
        self.cofacets = [tuple(c) for c in cofacets]
        self.is_toplex = np.array([not c for c in self.cofacets], dtype=bool)

    def __len__(self) -> int:
        return len(self.simplices)

    def __repr__(self) -> str:
        counts = np.bincount(self.dims) if len(self) else []
        return f"SimplicialComplex(f-vector={list(counts)})"

    @property
    def dim(self) -> int:
        return int(self.dims.max()) if len(self) else -1

    @property
    def n_vertices(self) -> int:
        return int((self.dims == 0).sum())

    @cached_property
    def toplexes(self) -> np.ndarray:
        return np.flatnonzero(self.is_toplex)

    def id_of(self, vertices: Iterable[int]) -> int:
        return self.index[tuple(sorted(vertices))]

    def label(self, sid: int, names: Sequence[str] | None = None) -> str:
        verts = self.simplices[sid]
        if names is None:
            return "".join(f"<{v}>" for v in verts) if len(verts) > 1 else str(verts[0])
        return "".join(names[v] for v in verts)

    @cached_property
    def all_faces(self) -> list[frozenset[int]]:
        """Closure of each single simplex (the simplex and all its faces)."""
        out: list[frozenset[int]] = []
        for i, fs in enumerate(self.facets):
            acc = {i}
            for f in fs:
                acc |= out[f]
            out.append(frozenset(acc))
        return out

    @cached_property
    def stars(self) -> list[frozenset[int]]:
        """Upper set of each single simplex (the simplex and all its cofaces)."""
        out: list[frozenset[int] | None] = [None] * len(self)
        for i in reversed(range(len(self))):
            acc = {i}
            for c in self.cofacets[i]:
                acc |= out[c]
            out[i] = frozenset(acc)
        return out  # type: ignore[return-value]

    def is_face(self, a: int, b: int) -> bool:
        """``a`` is a (not necessarily proper) face of ``b``."""
        return set(self.simplices[a]) <= set(self.simplices[b])

    @cached_property
    def points(self) -> list[geo.Point]:
        if self.coords is None:
            raise ValueError("complex has no geometric realization")
        return [geo.to_point(c) for c in self.coords]

    @cached_property
    def float_coords(self) -> np.ndarray:
        if self.coords is None:
            raise ValueError("complex has no geometric realization")
        return np.array([[float(c) for c in row] for row in self.coords], dtype=float)

    @property
    def ambient_dim(self) -> int:
        if self.coords is None:
            return 0
        return len(self.coords[0]) if len(self.coords) else 0

    def cell_points(self, sid: int) -> list[geo.Point]:
        pts = self.points
        return [pts[v] for v in self.simplices[sid]]


def build_complex(vertices, toplexes: Iterable[Iterable[int]]) -> SimplicialComplex:
    """Face closure of a list of toplexes.

    ``vertices`` is either a vertex count or a sequence of coordinate rows
    (all of the same length). Every listed vertex becomes a 0-simplex even
    when it is not used by a toplex.
    """
    if isinstance(vertices, (int, np.integer)):
        n = int(vertices)
        coords = None
    else:
        coords = [tuple(row) if isinstance(row, (list, tuple, np.ndarray)) else (row,) for row in vertices]
        n = len(coords)
        dims = {len(c) for c in coords}
        if len(dims) > 1:
            raise ValueError(f"inconsistent coordinate dimensions {sorted(dims)}")
    seen: set[tuple[int, ...]] = set()
    faces: set[tuple[int, ...]] = {(v,) for v in range(n)}
    for top in toplexes:
        t = tuple(sorted(int(v) for v in top))
        if not t:
            raise ValueError("empty toplex")
        if len(set(t)) != len(t):
            raise ValueError(f"repeated vertex in toplex {t}")
        if t in seen:
            raise ValueError(f"duplicate toplex {t}")
        seen.add(t)
        for v in t:
            if not 0 <= v < n:
                raise ValueError(f"vertex id {v} out of range 0..{n - 1}")
        for k in range(1, len(t) + 1):
            faces.update(combinations(t, k))
    ordered = sorted(faces, key=lambda s: (len(s), s))
    return SimplicialComplex(ordered, coords=coords)


def closure(K: SimplicialComplex, A: Iterable[int]) -> frozenset[int]:
    faces = K.all_faces
    out: set[int] = set()
    for s in A:
        out |= faces[s]
    return frozenset(out)


def upper_set(K: SimplicialComplex, sigma: int) -> frozenset[int]:
    """The star of ``sigma``: the minimal open set containing it."""
    return K.stars[sigma]


def open_hull(K: SimplicialComplex, A: Iterable[int]) -> frozenset[int]:
    stars = K.stars
    out: set[int] = set()
    for s in A:
        out |= stars[s]
    return frozenset(out)


def is_closed(K: SimplicialComplex, A: Iterable[int]) -> bool:
    A = frozenset(A)
    return all(f in A for s in A for f in K.facets[s])


def is_open(K: SimplicialComplex, A: Iterable[int]) -> bool:
    A = frozenset(A)
    return all(c in A for s in A for c in K.cofacets[s])


def interval(K: SimplicialComplex, lo: int, hi: int) -> frozenset[int]:
    """All simplices between ``lo`` and ``hi`` in the face order."""
    if not K.is_face(lo, hi):
        return frozenset()
    return K.stars[lo] & K.all_faces[hi]


def order_components(K: SimplicialComplex, A: Iterable[int]) -> list[frozenset[int]]:
    """Fence-connected components of ``A`` under the restricted face order.

    Components are returned sorted by their smallest id.
    """
    A = frozenset(A)
    parent = {s: s for s in A}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for s in A:
        for f in K.all_faces[s]:
            if f != s and f in A:
                ra, rb = find(s), find(f)
                if ra != rb:
                    parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, set[int]] = {}
    for s in A:
        groups.setdefault(find(s), set()).add(s)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def orderly_convexity_witness(K: SimplicialComplex, A: Iterable[int]):
    """A triple ``(lo, mid, hi)`` with ``lo <= mid <= hi``, lo, hi in A, mid not in A; else None."""
    A = frozenset(A)
    for hi in sorted(A):
        below = K.all_faces[hi]
        for lo in sorted(A & below):
            if lo == hi:
                continue
            for mid in sorted((K.stars[lo] & below) - A):
                return lo, mid, hi
    return None


def is_orderly_convex(K: SimplicialComplex, A: Iterable[int]) -> bool:
    return orderly_convexity_witness(K, A) is None


# -- convex hulls inside a geometric complex --------------------------------


def _check_planar(K: SimplicialComplex) -> None:
    if K.coords is None:
        raise ValueError("co requires a geometric realization")
    if K.ambient_dim > 2:
        raise ValueError("co is only implemented for complexes in R^1 and R^2")


def co(K: SimplicialComplex, A: Iterable[int]) -> frozenset[int]:
    """Smallest set of simplices containing ``A`` whose solid is convex.

    Structured grids with an all-toplex input take a closed-form route
    (the hull is bounded by the three mesh directions); everything else runs
    the exact fixed-point iteration of :func:`co_iterative`.
    """
    A = frozenset(A)
    if not A:
        raise ValueError("co of the empty set is undefined")
    _check_planar(K)
    if K.grid is not None and all(K.is_toplex[s] for s in A):
        return grid_co(K, A)
    return co_iterative(K, A)


def co_iterative(K: SimplicialComplex, A: Iterable[int], max_rounds: int | None = None) -> frozenset[int]:
    """Fixed-point iteration ``D <- {cells meeting conv |D|}`` with exact predicates.

    Raises ``ValueError`` when the hull of the result is not covered by its
    own solid, which happens only if ``|K|`` is not convex around ``A``.
    """
    D = frozenset(A)
    if not D:
        raise ValueError("co of the empty set is undefined")
    _check_planar(K)
    cells = [K.cell_points(s) for s in range(len(K))]
    fpts = K.float_coords
    if fpts.shape[1] == 1:
        fpts = np.hstack([fpts, np.zeros_like(fpts)])
    lo_box = np.array([fpts[list(s)].min(axis=0) for s in K.simplices])
    hi_box = np.array([fpts[list(s)].max(axis=0) for s in K.simplices])
    limit = max_rounds if max_rounds is not None else len(K) + 1
    for _ in range(limit):
        pieces = geo.hull_of_cells([cells[s] for s in sorted(D)])
        verts = sorted({v for s in D for v in K.simplices[s]})
        blo, bhi = fpts[verts].min(axis=0) - 1e-9, fpts[verts].max(axis=0) + 1e-9
        cand = np.flatnonzero(np.all(hi_box >= blo, axis=1) & np.all(lo_box <= bhi, axis=1))
        new = frozenset(int(s) for s in cand if s in D or pieces.meets_cell(cells[s]))
        if new == D:
            break
        D = new
    else:
        raise RuntimeError("convex hull iteration did not stabilise")
    _check_covered(K, D)
    return D


def _check_covered(K: SimplicialComplex, D: frozenset[int]) -> None:
    pts = [p for s in D for p in K.cell_points(s)]
    hull = geo.convex_hull(pts)
    if len(hull) >= 3:
        area = geo.polygon_area2(hull)
        covered = sum(abs(geo.polygon_area2(K.cell_points(s))) for s in D if len(K.simplices[s]) == 3)
        ok = area == covered
    elif len(hull) == 2:
        a, b = hull
        length2 = (b[0] - a[0]) ** 2 + (b[1] - a[1]) ** 2
        # compare squared lengths via a common direction parameter
        covered = sum(
            abs((b[0] - a[0]) * (q[0] - p[0]) + (b[1] - a[1]) * (q[1] - p[1]))
            for s in D
            if len(K.simplices[s]) == 2
            for p, q in [K.cell_points(s)]
        )
        ok = covered == length2
    else:
        ok = True
    if not ok:
        raise ValueError("convex hull leaves the polytope of the complex")


@dataclass(frozen=True)
class _GridBounds:
    lo: np.ndarray  # per simplex minima of (i, j, i - j)
    hi: np.ndarray  # per simplex maxima of (i, j, i - j)
    order: np.ndarray  # simplex ids sorted by anchor square
    row_start: np.ndarray  # offsets into ``order`` per (i, j) anchor


def grid_bounds(K: SimplicialComplex) -> _GridBounds:
    cached = getattr(K, "_grid_bounds_cache", None)
    if cached is not None:
        return cached
    g = K.grid
    ij = g.ij
    q = np.stack([ij[:, 0], ij[:, 1], ij[:, 0] - ij[:, 1]], axis=1)
    n = len(K)
    lo = np.empty((n, 3), dtype=np.int64)
    hi = np.empty((n, 3), dtype=np.int64)
    for sid, s in enumerate(K.simplices):
        vals = q[list(s)]
        lo[sid] = vals.min(axis=0)
        hi[sid] = vals.max(axis=0)
    anchor = lo[:, 0] * (g.ny + 1) + lo[:, 1]
    order = np.argsort(anchor, kind="stable")
    row_start = np.searchsorted(anchor[order], np.arange((g.nx + 1) * (g.ny + 1) + 1))
    out = _GridBounds(lo, hi, order, row_start)
    K._grid_bounds_cache = out
    return out


def grid_hex_bounds(K: SimplicialComplex, A: Iterable[int]) -> np.ndarray:
    """Tight bounds ``[i_lo, j_lo, d_lo, i_hi, j_hi, d_hi]`` of a simplex set (d = i - j)."""
    gb = grid_bounds(K)
    idx = np.fromiter(A, dtype=np.int64)
    return np.concatenate([gb.lo[idx].min(axis=0), gb.hi[idx].max(axis=0)])


def grid_cells_inside(K: SimplicialComplex, bounds: np.ndarray) -> np.ndarray:
    """Ids of simplices whose open cell lies in the open hexagon given by ``bounds``."""
    gb = grid_bounds(K)
    i0, j0, d0, i1, j1, d1 = (int(b) for b in bounds)
    ny1 = K.grid.ny + 1
    chunks = [gb.order[gb.row_start[i * ny1 + j0]: gb.row_start[i * ny1 + j1]] for i in range(i0, i1)]
    if not chunks:
        return np.empty(0, dtype=np.int64)
    cand = np.concatenate(chunks)
    lo, hi = gb.lo[cand], gb.hi[cand]
    L = np.array([i0, j0, d0])
    U = np.array([i1, j1, d1])
    ok = np.all((lo >= L) & (hi > L) & (hi <= U) & (lo < U), axis=1)
    return np.sort(cand[ok])


def grid_co(K: SimplicialComplex, A: Iterable[int]) -> frozenset[int]:
    """Closed form of :func:`co` for a set of toplexes of a structured grid.

    A convex union of cells of such a mesh is bounded by lines in the three
    mesh directions, so the hull is the open hexagon cut out by the extreme
    values of ``i``, ``j`` and ``i - j`` over the vertices of ``A``.
    """
    return frozenset(int(s) for s in grid_cells_inside(K, grid_hex_bounds(K, A)))


# -- mesh text format -------------------------------------------------------


def _fmt_coord(c) -> str:
    if isinstance(c, Fraction):
        return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return repr(float(c))


def write_mesh(K: SimplicialComplex, path) -> None:
    lines = [f"# mesh: {K.n_vertices} vertices, {int(K.is_toplex.sum())} toplexes"]
    if K.grid is not None:
        lines.append(f"# grid {K.grid.nx} {K.grid.ny}")
    if K.coords is not None:
        for row in K.coords:
            lines.append("v " + " ".join(_fmt_coord(c) for c in row))
    else:
        lines.extend("v" for _ in range(K.n_vertices))
    tag = {1: "p", 2: "e", 3: "t"}
    for sid in K.toplexes:
        s = K.simplices[sid]
        lines.append(f"{tag.get(len(s), 's')} " + " ".join(str(v) for v in s))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mesh(path) -> SimplicialComplex:
    """Read the ``v``/``e``/``t`` text format; face closure is computed."""
    coords: list[tuple] = []
    tops: list[tuple[int, ...]] = []
    grid = None
    has_coords = True
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].split()
                if len(parts) == 3 and parts[0] == "grid":
                    grid = (int(parts[1]), int(parts[2]))
                continue
            tag, *rest = line.split()
            if tag == "v":
                if not rest:
                    has_coords = False
                coords.append(tuple(Fraction(x) for x in rest))
            elif tag in ("e", "t", "s"):
                tops.append(tuple(int(x) for x in rest))
            elif tag == "p":
                continue
            else:
                raise ValueError(f"{path}:{lineno}: unknown record {tag!r}")
    n = len(coords)
    for t in tops:
        for v in t:
            if not 0 <= v < n:
                raise ValueError(f"toplex {t} references missing vertex {v}")
    K = build_complex(coords if has_coords else n, tops)
    if grid is not None:
        K = attach_grid(K, *grid)
    return K


def attach_grid(K: SimplicialComplex, nx: int, ny: int) -> SimplicialComplex:
    """Recover grid indices of a uniform rectangular triangulation from its coordinates."""
    pts = K.coords
    xs = sorted({p[0] for p in pts})
    ys = sorted({p[1] for p in pts})
    if len(xs) != nx + 1 or len(ys) != ny + 1:
        raise ValueError("coordinates do not form the announced grid")
    xi = {x: i for i, x in enumerate(xs)}
    yj = {y: j for j, y in enumerate(ys)}
    ij = np.array([[xi[p[0]], yj[p[1]]] for p in pts], dtype=np.int64)
    return SimplicialComplex(K.simplices, coords=K.coords, grid=GridInfo(nx, ny, ij))
