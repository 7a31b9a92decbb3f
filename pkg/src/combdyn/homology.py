"""Z/2 simplicial homology of abstract complexes.

Chains are Python integers used as bitsets (bit ``i`` = the ``i``-th simplex
of a dimension), so a column addition is a single XOR. Large complexes are
first shrunk by greedy elementary collapses; cycles are carried through the
recorded collapses so that homology classes of the original complex can
still be named.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

Simplex = tuple


def faces_of(s: Simplex) -> list[Simplex]:
    return [s[:i] + s[i + 1:] for i in range(len(s))] if len(s) > 1 else []


def face_closure(simplices: Iterable[Iterable]) -> list[Simplex]:
    """All faces of the given simplices, sorted by (dimension, vertices)."""
    out: set[Simplex] = set()
    for s in simplices:
        t = tuple(sorted(s))
        for k in range(1, len(t) + 1):
            out.update(combinations(t, k))
    return sorted(out, key=lambda s: (len(s), s))


def _check_closed(simplices: Sequence[Simplex]) -> None:
    have = set(simplices)
    for s in simplices:
        for f in faces_of(s):
            if f not in have:
                raise ValueError(f"face {f} of {s} is missing")


def _index(simplices: Sequence[Simplex]) -> tuple[list[list[Simplex]], dict[Simplex, tuple[int, int]]]:
    by_dim: list[list[Simplex]] = []
    where: dict[Simplex, tuple[int, int]] = {}
    for s in simplices:
        k = len(s) - 1
        while len(by_dim) <= k:
            by_dim.append([])
        where[s] = (k, len(by_dim[k]))
        by_dim[k].append(s)
    return by_dim, where


def boundary_columns(by_dim, where, k: int, skip: set | None = None) -> list[int]:
    """Columns of the boundary map from dimension ``k`` as bitsets over dimension ``k - 1``."""
    cols = []
    for s in by_dim[k] if k < len(by_dim) else []:
        c = 0
        if k > 0:
            for f in faces_of(s):
                if skip is None or f not in skip:
                    c ^= 1 << where[f][1]
        cols.append(c)
    return cols


def reduce_columns(cols: list[int]) -> tuple[list[int], list[int], dict[int, int]]:
    """Standard left-to-right column reduction; returns ``R``, ``V`` and ``low -> column``."""
    R = list(cols)
    V = [1 << j for j in range(len(cols))]
    pivot: dict[int, int] = {}
    for j in range(len(R)):
        c = R[j]
        v = V[j]
        while c:
            low = c.bit_length() - 1
            i = pivot.get(low)
            if i is None:
                pivot[low] = j
                break
            c ^= R[i]
            v ^= V[i]
        R[j] = c
        V[j] = v
    return R, V, pivot


def _betti_from_columns(by_dim, col_sets: list[list[int]]) -> list[int]:
    ranks = []
    for cols in col_sets:
        R, _, _ = reduce_columns(cols)
        ranks.append(sum(1 for c in R if c))
    out = []
    for k in range(len(by_dim)):
        z = len(by_dim[k]) - ranks[k]
        b = ranks[k + 1] if k + 1 < len(ranks) else 0
        out.append(z - b)
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def betti(simplices: Iterable[Iterable]) -> list[int]:
    """Betti numbers over Z/2 (``[0]`` for the empty complex)."""
    simplices = [tuple(s) for s in simplices]
    if not simplices:
        return [0]
    return Homology(simplices).betti


def relative_betti(simplices: Iterable[Iterable], sub: Iterable[Iterable]) -> list[int]:
    """Betti numbers of the pair ``(X, A)`` from the quotient chain complex."""
    simplices = [tuple(s) for s in simplices]
    sub = {tuple(s) for s in sub}
    _check_closed(simplices)
    have = set(simplices)
    if not sub <= have:
        raise ValueError("subcomplex is not contained in the complex")
    _check_closed(list(sub))
    rest = [s for s in simplices if s not in sub]
    if not rest:
        return [0]
    by_dim, where = _index(rest)
    cols = [boundary_columns(by_dim, where, k, skip=sub) for k in range(len(by_dim))]
    return _betti_from_columns(by_dim, cols)


class Collapser:
    """Greedy elementary collapses of a closed complex, recorded in order."""

    def __init__(self, simplices: Sequence[Simplex]):
        self.simplices = list(simplices)
        self.pos = {s: i for i, s in enumerate(self.simplices)}
        n = len(self.simplices)
        self.facets = [[self.pos[f] for f in faces_of(s)] for s in self.simplices]
        cof: list[list[int]] = [[] for _ in range(n)]
        for i, fs in enumerate(self.facets):
            for f in fs:
                cof[f].append(i)
        self.cofacets = cof
        self.alive = np.ones(n, dtype=bool)
        self.live_cof = np.array([len(c) for c in cof], dtype=np.int64)
        self.pairs: list[tuple[int, int]] = []
        self.order_of: dict[int, int] = {}
        self._run()

    def _partner(self, i: int) -> int:
        for c in self.cofacets[i]:
            if self.alive[c]:
                return c
        return -1

    def _run(self) -> None:
        queue = deque(i for i in range(len(self.simplices)) if self.live_cof[i] == 1)
        while queue:
            s = queue.popleft()
            if not self.alive[s] or self.live_cof[s] != 1:
                continue
            t = self._partner(s)
            self.order_of[s] = len(self.pairs)
            self.pairs.append((s, t))
            for x in (s, t):
                self.alive[x] = False
                for f in self.facets[x]:
                    self.live_cof[f] -= 1
                    if self.alive[f] and self.live_cof[f] == 1:
                        queue.append(f)

    def push(self, chain: set[int]) -> set[int]:
        """Carry a cycle through the collapses; the result lives on the remaining simplices."""
        z = set(chain)
        heap = [self.order_of[s] for s in z if s in self.order_of]
        heapq.heapify(heap)
        while heap:
            o = heapq.heappop(heap)
            s, t = self.pairs[o]
            if s not in z:
                continue
            for f in self.facets[t]:
                if f in z:
                    z.remove(f)
                else:
                    z.add(f)
                    if f in self.order_of:
                        heapq.heappush(heap, self.order_of[f])
        return z


@dataclass
class _DimData:
    R_next: list[int]
    pivot_next: dict[int, int]
    V: list[int]
    essential: list[int]


class Homology:
    """Homology of an abstract complex with named generators.

    ``representatives(k)`` returns cycles (sets of simplices) of the input
    complex, one per basis class; ``coordinates(k, chain)`` expresses any
    ``k``-cycle in that basis.
    """

    def __init__(self, simplices: Sequence[Simplex], collapse: bool | None = None, check: bool = True):
        simplices = sorted({tuple(s) for s in simplices}, key=lambda s: (len(s), s))
        if check:
            _check_closed(simplices)
        self.simplices = simplices
        if collapse is None:
            collapse = len(simplices) > 200
        self.collapser = Collapser(simplices) if collapse else None
        if self.collapser is not None:
            core = [s for s, a in zip(simplices, self.collapser.alive) if a]
        else:
            core = simplices
        self.core = core
        self.by_dim, self.where = _index(core)
        top = len(self.by_dim)
        cols = [boundary_columns(self.by_dim, self.where, k) for k in range(top)] + [[]]
        self._dims: list[_DimData] = []
        reduced = [reduce_columns(c) for c in cols]
        for k in range(top):
            R_k, V_k, _ = reduced[k]
            R_n, _, piv_n = reduced[k + 1]
            ess = [j for j in range(len(self.by_dim[k])) if R_k[j] == 0 and j not in piv_n]
            self._dims.append(_DimData(R_n, piv_n, V_k, ess))

    @property
    def betti(self) -> list[int]:
        out = [len(d.essential) for d in self._dims] or [0]
        while len(out) > 1 and out[-1] == 0:
            out.pop()
        return out

    def dim(self, k: int) -> int:
        return len(self._dims[k].essential) if k < len(self._dims) else 0

    def representatives(self, k: int) -> list[frozenset[Simplex]]:
        if k >= len(self._dims):
            return []
        d = self._dims[k]
        out = []
        for j in d.essential:
            v = d.V[j]
            out.append(frozenset(self.by_dim[k][i] for i in _bits(v)))
        return out

    def coordinates(self, k: int, chain: Iterable[Simplex]) -> np.ndarray:
        """Coordinates of the class of a ``k``-cycle in the representative basis."""
        if k >= len(self._dims):
            return np.zeros(0, dtype=np.uint8)
        d = self._dims[k]
        chain = [tuple(s) for s in chain]
        if self.collapser is not None:
            pos = self.collapser.pos
            pushed = self.collapser.push({pos[s] for s in chain})
            chain = [self.collapser.simplices[i] for i in pushed]
        z = 0
        for s in chain:
            z ^= 1 << self.where[s][1]
        ess_pos = {j: e for e, j in enumerate(d.essential)}
        out = np.zeros(len(d.essential), dtype=np.uint8)
        while z:
            h = z.bit_length() - 1
            col = d.pivot_next.get(h)
            if col is not None:
                z ^= d.R_next[col]
                continue
            e = ess_pos.get(h)
            if e is None:
                raise ValueError("chain is not a cycle")
            out[e] = 1
            z ^= d.V[h]
        return out


def _bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def induced_map(source: Homology, target: Homology, k: int) -> np.ndarray:
    """Matrix of ``H_k(source) -> H_k(target)`` for a subcomplex inclusion."""
    reps = source.representatives(k)
    m = np.zeros((target.dim(k), len(reps)), dtype=np.uint8)
    for j, z in enumerate(reps):
        m[:, j] = target.coordinates(k, z)
    return m


def euler_characteristic(simplices: Iterable[Iterable]) -> int:
    return sum((-1) ** (len(tuple(s)) - 1) for s in simplices)
