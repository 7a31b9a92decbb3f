"""Combinatorial dynamical systems as digraphs on the simplices of a complex.

Images are stored shared: many simplices of a sampled system map to the same
set, so ``image_of[s]`` indexes into ``images`` (``-1`` means no image).
Strongly connected components are computed on the bipartite graph
``simplex -> image node -> members``, which has one edge per stored
membership instead of one per pair ``(s, t)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components

from .complex import SimplicialComplex, build_complex, closure, is_closed


class CombinatorialDynamicalSystem:
    """A multivalued map ``F: K -> K`` stored as shared image sets."""

    def __init__(self, K: SimplicialComplex, images: Sequence[Iterable[int]], image_of: Sequence[int]):
        self.complex = K
        n = len(K)
        self.images = [np.unique(np.asarray(list(img), dtype=np.int64)) for img in images]
        self.image_of = np.asarray(image_of, dtype=np.int64)
        if self.image_of.shape != (n,):
            raise ValueError("image_of must have one entry per simplex")
        if np.any(self.image_of >= len(self.images)) or np.any(self.image_of < -1):
            raise ValueError("image index out of range")
        for img in self.images:
            if img.size and (img[0] < 0 or img[-1] >= n):
                raise ValueError("successor id outside the complex")

    @classmethod
    def from_successors(cls, K: SimplicialComplex, succ: Mapping[int, Iterable[int]] | Sequence[Iterable[int]]):
        """Build from an explicit successor list, deduplicating equal images."""
        if isinstance(succ, Mapping):
            succ = [succ.get(s, ()) for s in range(len(K))]
        table: dict[frozenset[int], int] = {}
        image_of = []
        for targets in succ:
            key = frozenset(int(t) for t in targets)
            if not key:
                image_of.append(-1)
                continue
            image_of.append(table.setdefault(key, len(table)))
        images = [sorted(k) for k in sorted(table, key=table.get)]
        return cls(K, images, image_of)

    @classmethod
    def from_digraph(cls, n: int, edges: Iterable[tuple[int, int]]):
        """System on ``n`` isolated points (discrete topology) with the given edges."""
        succ: list[set[int]] = [set() for _ in range(n)]
        for a, b in edges:
            succ[a].add(b)
        return cls.from_successors(build_complex(n, []), succ)

    def __len__(self) -> int:
        return len(self.image_of)

    def successors(self, s: int) -> np.ndarray:
        k = self.image_of[s]
        return self.images[k] if k >= 0 else np.empty(0, dtype=np.int64)

    def __call__(self, s: int) -> frozenset[int]:
        return frozenset(int(t) for t in self.successors(s))

    def edges(self) -> list[tuple[int, int]]:
        return [(s, int(t)) for s in range(len(self)) for t in self.successors(s)]

    @property
    def n_edges(self) -> int:
        return sum(len(self.successors(s)) for s in range(len(self)))

    @cached_property
    def _augmented(self) -> sparse.csr_matrix:
        n, m = len(self), len(self.images)
        has = np.flatnonzero(self.image_of >= 0)
        rows = [has]
        cols = [n + self.image_of[has]]
        for k, img in enumerate(self.images):
            rows.append(np.full(img.size, n + k, dtype=np.int64))
            cols.append(img)
        r = np.concatenate(rows)
        c = np.concatenate(cols)
        return sparse.csr_matrix((np.ones(r.size, dtype=np.int32), (r, c)), shape=(n + m, n + m))

    @cached_property
    def _scc(self) -> tuple[int, np.ndarray]:
        return connected_components(self._augmented, directed=True, connection="strong")

    def _reach(self, start: np.ndarray, reverse: bool = False) -> np.ndarray:
        """Boolean mask over augmented nodes reachable from ``start`` (inclusive)."""
        g = self._augmented.T.tocsr() if reverse else self._augmented
        seen = np.zeros(g.shape[0], dtype=bool)
        seen[start] = True
        frontier = np.unique(np.asarray(start, dtype=np.int64))
        indptr, indices = g.indptr, g.indices
        while frontier.size:
            nxt = np.concatenate([indices[indptr[v]:indptr[v + 1]] for v in frontier])
            nxt = np.unique(nxt)
            nxt = nxt[~seen[nxt]]
            seen[nxt] = True
            frontier = nxt
        return seen

    def reachable(self, start: Iterable[int], reverse: bool = False) -> frozenset[int]:
        """Simplices reachable from ``start`` by walks of length >= 0."""
        idx = np.fromiter(start, dtype=np.int64)
        mask = self._reach(idx, reverse=reverse)[: len(self)]
        return frozenset(int(s) for s in np.flatnonzero(mask))

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            for s in range(len(self)):
                succ = " ".join(str(int(t)) for t in self.successors(s))
                fh.write(f"{s}: {succ}\n".replace(" \n", "\n"))

    @classmethod
    def load(cls, K: SimplicialComplex, path):
        succ: list[list[int]] = [[] for _ in range(len(K))]
        with open(path) as fh:
            for line in fh:
                if not line.strip():
                    continue
                head, _, tail = line.partition(":")
                succ[int(head)] = [int(t) for t in tail.split()]
        return cls.from_successors(K, succ)


@dataclass
class MorseDecomposition:
    """Morse sets sorted by smallest id, with the induced reachability order."""

    system: CombinatorialDynamicalSystem
    sets: list[frozenset[int]]
    _component: np.ndarray = field(repr=False)
    _labels: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    @cached_property
    def union(self) -> frozenset[int]:
        out: set[int] = set()
        for m in self.sets:
            out |= m
        return frozenset(out)

    @cached_property
    def index_of(self) -> dict[int, int]:
        return {s: i for i, m in enumerate(self.sets) for s in m}

    @cached_property
    def _below(self) -> list[int]:
        """Bitmask per Morse set of the sets strictly below it."""
        ncomp, labels = self.system._scc
        g = self.system._augmented.tocoo()
        cr, cc = labels[g.row], labels[g.col]
        keep = cr != cc
        dag = sparse.csr_matrix((np.ones(int(keep.sum()), dtype=np.int32), (cr[keep], cc[keep])), shape=(ncomp, ncomp))
        morse_of_comp = {int(c): i for i, c in enumerate(self._component)}
        order = _topological_order(dag)
        reach = [0] * ncomp
        indptr, indices = dag.indptr, dag.indices
        for c in reversed(order):
            acc = 0
            for d in indices[indptr[c]:indptr[c + 1]]:
                acc |= reach[d]
                if int(d) in morse_of_comp:
                    acc |= 1 << morse_of_comp[int(d)]
            reach[c] = acc
        return [reach[int(c)] for c in self._component]

    def greater(self, i: int, j: int) -> bool:
        """``M_i > M_j``: some walk leaves ``M_i`` and arrives in ``M_j``."""
        return i != j and bool(self._below[i] >> j & 1)

    def order_pairs(self) -> list[tuple[int, int]]:
        """All pairs ``(i, j)`` with ``M_i > M_j``."""
        return [(i, j) for i in range(len(self)) for j in range(len(self)) if self.greater(i, j)]

    def hasse_pairs(self) -> list[tuple[int, int]]:
        pairs = set(self.order_pairs())
        return sorted(
            (i, j) for i, j in pairs if not any((i, k) in pairs and (k, j) in pairs for k in range(len(self)))
        )

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            for i, m in enumerate(self.sets):
                fh.write(f"{i}: " + " ".join(str(s) for s in sorted(m)) + "\n")
            for i, j in self.hasse_pairs():
                fh.write(f"# {i} > {j}\n")


def _topological_order(dag: sparse.csr_matrix) -> list[int]:
    n = dag.shape[0]
    indeg = np.bincount(dag.indices, minlength=n)
    queue = deque(int(v) for v in np.flatnonzero(indeg == 0))
    out: list[int] = []
    indptr, indices = dag.indptr, dag.indices
    while queue:
        v = queue.popleft()
        out.append(v)
        for w in indices[indptr[v]:indptr[v + 1]]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(int(w))
    return out


def minimal_morse_decomposition(F: CombinatorialDynamicalSystem) -> MorseDecomposition:
    """Strongly connected components of ``G_F`` that carry a cycle.

    A component of the augmented graph carries a cycle exactly when it has at
    least two nodes (the augmented graph has no self-loops; a self-loop
    ``s -> s`` becomes ``s -> image -> s``).
    """
    n = len(F)
    _, labels = F._scc
    sizes = np.bincount(labels)
    orig = labels[:n]
    groups: dict[int, list[int]] = {}
    for s in np.flatnonzero(sizes[orig] >= 2):
        groups.setdefault(int(orig[s]), []).append(int(s))
    comps = sorted(groups, key=lambda c: groups[c][0])
    sets = [frozenset(groups[c]) for c in comps]
    return MorseDecomposition(F, sets, np.array(comps, dtype=np.int64), labels)


def maximal_invariant_set(F: CombinatorialDynamicalSystem) -> frozenset[int]:
    """Simplices lying on a bi-infinite walk: reachable from a cycle and reaching one."""
    n = len(F)
    _, labels = F._scc
    sizes = np.bincount(labels)
    cyc = np.flatnonzero(sizes[labels] >= 2)
    if cyc.size == 0:
        return frozenset()
    fwd = F._reach(cyc)
    bwd = F._reach(cyc, reverse=True)
    return frozenset(int(s) for s in np.flatnonzero((fwd & bwd)[:n]))


def _restricted_successors(F: CombinatorialDynamicalSystem, A: frozenset[int]) -> dict[int, list[int]]:
    return {s: [int(t) for t in F.successors(s) if int(t) in A] for s in A}


def is_invariant(F: CombinatorialDynamicalSystem, A: Iterable[int]) -> bool:
    """Every member of ``A`` lies on a bi-infinite walk inside ``A``."""
    A = frozenset(A)
    if not A:
        return True
    succ = _restricted_successors(F, A)
    nodes = sorted(A)
    pos = {s: i for i, s in enumerate(nodes)}
    rows = [pos[s] for s in nodes for _ in succ[s]]
    cols = [pos[t] for s in nodes for t in succ[s]]
    g = sparse.csr_matrix((np.ones(len(rows), dtype=np.int32), (rows, cols)), shape=(len(nodes),) * 2)
    _, labels = connected_components(g, directed=True, connection="strong")
    sizes = np.bincount(labels)
    diag = g.diagonal() > 0
    on_cycle = (sizes[labels] >= 2) | diag
    if not on_cycle.any():
        return False
    start = np.flatnonzero(on_cycle)
    return bool(np.all(_mask_reach(g, start) & _mask_reach(g.T.tocsr(), start)))


def _mask_reach(g: sparse.csr_matrix, start: np.ndarray) -> np.ndarray:
    seen = np.zeros(g.shape[0], dtype=bool)
    seen[start] = True
    stack = list(int(v) for v in start)
    while stack:
        v = stack.pop()
        for w in g.indices[g.indptr[v]:g.indptr[v + 1]]:
            if not seen[w]:
                seen[w] = True
                stack.append(int(w))
    return seen


def is_isolating_neighborhood(F: CombinatorialDynamicalSystem, N: Iterable[int], S: Iterable[int]) -> bool:
    """``N`` is closed, contains the invariant set ``S``, and no walk in ``N`` leaves and re-enters ``S``."""
    N, S = frozenset(N), frozenset(S)
    if not S <= N or not is_closed(F.complex, N) or not is_invariant(F, S):
        return False
    X = N - S
    seen: set[int] = set()
    stack = []
    for s in S:
        for t in F.successors(s):
            t = int(t)
            if t in X and t not in seen:
                seen.add(t)
                stack.append(t)
    while stack:
        x = stack.pop()
        for t in F.successors(x):
            t = int(t)
            if t in S:
                return False
            if t in X and t not in seen:
                seen.add(t)
                stack.append(t)
    return True


def is_isolated_invariant(F: CombinatorialDynamicalSystem, S: Iterable[int]) -> bool:
    """Isolated iff the closure of ``S`` isolates it (the smallest closed candidate)."""
    S = frozenset(S)
    return is_isolating_neighborhood(F, closure(F.complex, S), S)


def connections(F: CombinatorialDynamicalSystem, M: Iterable[int], M2: Iterable[int]) -> bool:
    """Some walk (possibly of length zero) starts in ``M`` and ends in ``M2``."""
    M, M2 = frozenset(M), frozenset(M2)
    if not M or not M2:
        return False
    return bool(F.reachable(M) & M2)
