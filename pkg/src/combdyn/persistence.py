"""Interval decompositions of Z/2 persistence modules indexed by a line.

Barcodes are read off by Moebius inversion of rank data: for a module over
``1..n`` the multiplicity of the closed interval ``[b, d]`` is

    rk(b, d) - rk(b - 1, d) - rk(b, d + 1) + rk(b - 1, d + 1)

where ``rk`` is the rank of the composite map for a one-directional module
and the rank of the canonical map from the limit to the colimit of the
restricted diagram for a zigzag.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import gf2


@dataclass
class PersistenceModule:
    """Spaces ``V_1..V_n`` (by dimension) and arrows between consecutive ones.

    ``forward[i]`` tells whether arrow ``i`` goes ``V_{i+1} -> V_{i+2}``
    (0-based: ``V[i] -> V[i+1]``) or the other way; ``maps[i]`` has shape
    ``(target dim, source dim)``.
    """

    dims: list[int]
    maps: list[np.ndarray]
    forward: list[bool]

    def __post_init__(self):
        n = len(self.dims)
        if len(self.maps) != max(n - 1, 0) or len(self.forward) != len(self.maps):
            raise ValueError("need exactly one arrow between consecutive spaces")
        self.maps = [gf2.as_gf2(m).reshape(self._shape(i)) for i, m in enumerate(self.maps)]

    def _shape(self, i: int) -> tuple[int, int]:
        a, b = self.dims[i], self.dims[i + 1]
        return (b, a) if self.forward[i] else (a, b)

    def __len__(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    @classmethod
    def from_forward(cls, dims: Sequence[int], maps: Sequence[np.ndarray]):
        return cls(list(dims), list(maps), [True] * len(maps))


@dataclass
class Barcode:
    """Closed intervals ``[birth, death]`` over steps ``1..n_steps``, tagged by degree."""

    n_steps: int
    intervals: list[tuple[int, int, int]] = field(default_factory=list)

    def __post_init__(self):
        self.intervals = sorted((int(k), int(b), int(d)) for k, b, d in self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def of_dim(self, k: int) -> list[tuple[int, int]]:
        return [(b, d) for kk, b, d in self.intervals if kk == k]

    def pointwise(self, k: int, t: int) -> int:
        return sum(1 for b, d in self.of_dim(k) if b <= t <= d)

    def merged(self, other: "Barcode") -> "Barcode":
        if other.n_steps != self.n_steps:
            raise ValueError("barcodes over different index sets")
        return Barcode(self.n_steps, self.intervals + other.intervals)

    def check_pointwise(self, dims_by_degree: dict[int, Sequence[int]]) -> None:
        """Raise unless interval counts match the module dimension at every step."""
        for k, dims in dims_by_degree.items():
            for t, dim in enumerate(dims, 1):
                if self.pointwise(k, t) != dim:
                    raise AssertionError(f"degree {k}, step {t}: {self.pointwise(k, t)} bars but dimension {dim}")

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["dim", "birth", "death"])
            for k, b, d in self.intervals:
                w.writerow([k, b, "inf" if d >= self.n_steps else d])

    @classmethod
    def read_csv(cls, path, n_steps: int) -> "Barcode":
        out = []
        with open(path, newline="") as fh:
            for row in csv.DictReader(fh):
                d = row["death"]
                out.append((int(row["dim"]), int(row["birth"]), n_steps if d == "inf" else int(d)))
        return cls(n_steps, out)


def _moebius(n: int, rk) -> list[tuple[int, int]]:
    def r(b: int, d: int) -> int:
        if b < 1 or d > n or b > d:
            return 0
        return rk(b, d)

    out = []
    for b in range(1, n + 1):
        for d in range(b, n + 1):
            m = r(b, d) - r(b - 1, d) - r(b, d + 1) + r(b - 1, d + 1)
            if m < 0:
                raise ArithmeticError(f"negative multiplicity for [{b}, {d}]")
            out.extend([(b, d)] * m)
    return out


def filtration_persistence(module: PersistenceModule, degree: int = 0) -> Barcode:
    """Barcode of a module whose arrows all point forward."""
    if not all(module.forward):
        raise ValueError("filtration persistence needs every arrow forward")
    n = len(module)
    ranks: dict[tuple[int, int], int] = {}
    for b in range(1, n + 1):
        comp = np.eye(module.dims[b - 1], dtype=np.uint8)
        ranks[b, b] = module.dims[b - 1]
        for d in range(b + 1, n + 1):
            comp = gf2.matmul(module.maps[d - 2], comp)
            ranks[b, d] = gf2.rank(comp) if comp.size else 0
            if ranks[b, d] == 0:
                for d2 in range(d + 1, n + 1):
                    ranks[b, d2] = 0
                break
    return Barcode(n, [(degree, b, d) for b, d in _moebius(n, lambda b, d: ranks[b, d])])


def limit_colimit_rank(module: PersistenceModule, b: int, d: int) -> int:
    """Rank of the canonical map from the limit to the colimit over steps ``b..d`` (1-based)."""
    lo, hi = b - 1, d - 1
    dims = module.dims[lo:hi + 1]
    offs = np.concatenate([[0], np.cumsum(dims)]).astype(int)
    total = int(offs[-1])
    if total == 0:
        return 0
    cons = []  # rows of the limit equations
    rels = []  # columns spanning the colimit relations
    for i in range(lo, hi):
        a, c = i - lo, i - lo + 1
        m = module.maps[i]
        if module.forward[i]:
            src, dst = a, c
        else:
            src, dst = c, a
        # v_dst = m v_src
        block = np.zeros((dims[dst], total), dtype=np.uint8)
        block[:, offs[dst]:offs[dst + 1]] = np.eye(dims[dst], dtype=np.uint8)
        block[:, offs[src]:offs[src + 1]] ^= m
        cons.append(block)
        rel = np.zeros((total, dims[src]), dtype=np.uint8)
        rel[offs[src]:offs[src + 1]] = np.eye(dims[src], dtype=np.uint8)
        rel[offs[dst]:offs[dst + 1]] ^= m
        rels.append(rel)
    lim = gf2.nullspace(np.vstack(cons)) if cons else np.eye(total, dtype=np.uint8)
    if lim.shape[1] == 0:
        return 0
    # push every limit vector into the colimit through the first slot
    first = np.zeros((total, lim.shape[1]), dtype=np.uint8)
    first[: dims[0]] = lim[: dims[0]]
    R = np.hstack(rels) if rels else np.zeros((total, 0), dtype=np.uint8)
    return gf2.rank(np.hstack([R, first])) - gf2.rank(R)


def zigzag_decompose(module: PersistenceModule, degree: int = 0) -> Barcode:
    """Interval decomposition of a module with arrows in either direction."""
    n = len(module)
    if n == 0:
        return Barcode(0, [])
    for i in range(n - 1):
        if module.maps[i].shape != module._shape(i):
            raise ValueError(f"arrow {i} has shape {module.maps[i].shape}, expected {module._shape(i)}")
    cache: dict[tuple[int, int], int] = {}

    def rk(b: int, d: int) -> int:
        if (b, d) not in cache:
            if b == d:
                cache[b, d] = module.dims[b - 1]
            elif cache.get((b, d - 1), 1) == 0 or cache.get((b + 1, d), 1) == 0:
                cache[b, d] = 0
            else:
                cache[b, d] = limit_colimit_rank(module, b, d)
        return cache[b, d]

    for length in range(n):
        for b in range(1, n - length + 1):
            rk(b, b + length)
    return Barcode(n, [(degree, b, d) for b, d in _moebius(n, rk)])


def bar_length(b: int, d: int) -> int:
    return d - b + 1


def finite_death(d: int, n_steps: int) -> float:
    return math.inf if d >= n_steps else d


def concat(barcodes: Iterable[Barcode]) -> Barcode:
    barcodes = list(barcodes)
    if not barcodes:
        raise ValueError("nothing to concatenate")
    out = barcodes[0]
    for b in barcodes[1:]:
        out = out.merged(b)
    return out
