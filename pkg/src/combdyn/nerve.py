"""Order complexes of Morse decompositions and their homology.

The disconnecting topology on the union of Morse sets keeps the face order
inside each set and cuts every relation between different sets, so its
order complex is the disjoint union of the order complexes of the sets.
Homology is therefore computed one Morse set at a time and cached by the
set itself, which pays off along parameter sweeps where most sets recur.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .complex import SimplicialComplex
from .homology import Homology, induced_map


def morse_set_chains(K: SimplicialComplex, M: Iterable[int]) -> list[tuple[int, ...]]:
    """All chains ``s0 < s1 < ...`` of the face order lying inside ``M``, as increasing id tuples."""
    M = frozenset(M)
    below = {s: sorted((K.all_faces[s] & M) - {s}, reverse=True) for s in M}
    out: list[tuple[int, ...]] = []
    stack = [(s,) for s in sorted(M, reverse=True)]
    while stack:
        chain = stack.pop()
        out.append(chain)
        for f in below[chain[0]]:
            stack.append((f,) + chain)
    out.sort(key=lambda c: (len(c), c))
    return out


@dataclass
class OrderComplex:
    """Chains of the face order restricted to each Morse set, labelled by set index."""

    simplices: list[tuple[int, ...]]
    label: dict[int, int]

    @property
    def vertices(self) -> list[int]:
        return [s[0] for s in self.simplices if len(s) == 1]

    def f_vector(self) -> list[int]:
        counts = np.bincount([len(s) - 1 for s in self.simplices]) if self.simplices else []
        return [int(c) for c in counts]

    def components(self) -> list[frozenset[int]]:
        parent = {v: v for v in self.vertices}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for s in self.simplices:
            if len(s) == 2:
                a, b = find(s[0]), find(s[1])
                if a != b:
                    parent[max(a, b)] = min(a, b)
        groups: dict[int, set[int]] = {}
        for v in self.vertices:
            groups.setdefault(find(v), set()).add(v)
        return sorted((frozenset(g) for g in groups.values()), key=min)

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            for v in self.vertices:
                fh.write(f"v {v} {self.label[v]}\n")
            for s in self.simplices:
                if len(s) > 1:
                    fh.write("s " + " ".join(map(str, s)) + "\n")


def morse_nerve(K: SimplicialComplex, sets: Sequence[Iterable[int]]) -> OrderComplex:
    sets = [frozenset(m) for m in sets]
    seen: set[int] = set()
    for m in sets:
        if seen & m:
            raise ValueError("Morse sets must be pairwise disjoint")
        seen |= m
    simplices: list[tuple[int, ...]] = []
    label: dict[int, int] = {}
    for i, m in enumerate(sets):
        for s in m:
            label[s] = i
        simplices.extend(morse_set_chains(K, m))
    simplices.sort(key=lambda c: (len(c), c))
    return OrderComplex(simplices, label)


class RefinementError(ValueError):
    """A Morse set of the finer decomposition is not inside one of the coarser."""

    def __init__(self, index: int, members: frozenset[int]):
        super().__init__(f"Morse set {index} ({len(members)} simplices, min id {min(members)}) is not contained in a single target Morse set")
        self.index = index
        self.members = members


def nerve_inclusion(fine: Sequence[Iterable[int]], coarse: Sequence[Iterable[int]]) -> list[int]:
    """Index of the coarse Morse set containing each fine one.

    The vertex map of the nerves is the identity on simplex ids; it is a
    simplicial inclusion exactly when every fine set lies in one coarse set.
    """
    owner: dict[int, int] = {}
    for j, m in enumerate(coarse):
        for s in m:
            owner[s] = j
    out = []
    for i, m in enumerate(fine):
        m = frozenset(m)
        targets = {owner.get(s, -1) for s in m}
        if len(targets) != 1 or -1 in targets:
            raise RefinementError(i, m)
        out.append(targets.pop())
    return out


class HomologyCache:
    """Homology of single Morse-set nerves keyed by the set."""

    def __init__(self, K: SimplicialComplex):
        self.K = K
        self._cache: dict[frozenset[int], Homology] = {}

    def __call__(self, M: frozenset[int]) -> Homology:
        h = self._cache.get(M)
        if h is None:
            h = Homology(morse_set_chains(self.K, M), check=False)
            self._cache[M] = h
        return h


@dataclass
class NerveHomology:
    """Homology of the nerve of a decomposition as a direct sum over its Morse sets."""

    sets: list[frozenset[int]]
    parts: list[Homology]
    max_dim: int = 2
    offsets: list[list[int]] = field(default_factory=list)

    def __post_init__(self):
        self.offsets = []
        for k in range(self.max_dim + 1):
            acc, offs = 0, []
            for h in self.parts:
                offs.append(acc)
                acc += h.dim(k)
            offs.append(acc)
            self.offsets.append(offs)

    @classmethod
    def build(cls, sets: Sequence[frozenset[int]], cache: HomologyCache, max_dim: int = 2):
        sets = [frozenset(m) for m in sets]
        return cls(sets, [cache(m) for m in sets], max_dim)

    def dim(self, k: int) -> int:
        return self.offsets[k][-1] if k < len(self.offsets) else 0

    def betti(self) -> list[int]:
        return [self.dim(k) for k in range(self.max_dim + 1)]

    def generator_owner(self, k: int) -> list[int]:
        """Morse-set index of each basis generator in dimension ``k``."""
        return [i for i, h in enumerate(self.parts) for _ in range(h.dim(k))]


def nerve_map(src: NerveHomology, dst: NerveHomology, k: int, owner: Sequence[int]) -> np.ndarray:
    """Block matrix of the inclusion-induced map ``H_k(N(src)) -> H_k(N(dst))``.

    ``owner[i]`` is the index in ``dst`` of the set containing ``src.sets[i]``,
    or ``-1`` when that set was dropped from ``dst`` (the block is then zero).
    """
    m = np.zeros((dst.dim(k), src.dim(k)), dtype=np.uint8)
    for i, j in enumerate(owner):
        if j < 0 or src.parts[i].dim(k) == 0:
            continue
        block = induced_map(src.parts[i], dst.parts[j], k)
        r0, r1 = dst.offsets[k][j], dst.offsets[k][j + 1]
        c0, c1 = src.offsets[k][i], src.offsets[k][i + 1]
        m[r0:r1, c0:c1] = block
    return m


def tm_basis(K: SimplicialComplex, sets: Sequence[Iterable[int]], cap: int = 64) -> list[frozenset[int]]:
    """Basis ``{M ∩ star(s)}`` of the disconnecting topology on the union of Morse sets."""
    sets = [frozenset(m) for m in sets]
    total = sum(len(m) for m in sets)
    if total > cap:
        raise ValueError(f"basis enumeration is capped at {cap} simplices, got {total}")
    basis: list[frozenset[int]] = []
    for m in sets:
        for s in sorted(m):
            b = m & K.stars[s]
            if b not in basis:
                basis.append(b)
        if m not in basis:
            basis.append(m)
    return basis


def topology_from_basis(basis: Sequence[frozenset[int]]) -> set[frozenset[int]]:
    """All unions of basis sets (including the empty union)."""
    opens: set[frozenset[int]] = {frozenset()}
    for b in basis:
        opens |= {o | b for o in opens}
    return opens
