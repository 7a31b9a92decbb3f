"""Combinatorial multivector fields.

A field is a partition of a complex into orderly convex parts. It generates
the dynamical system ``F(s) = cl s ∪ [s]`` in which every simplex is a fixed
point. ``cvcmf`` builds a field from one vector per mesh vertex.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .complex import SimplicialComplex, closure, orderly_convexity_witness
from .dynamics import CombinatorialDynamicalSystem
from .homology import relative_betti


class InvalidFieldError(ValueError):
    """The proposed parts do not form a multivector field; ``witness`` says why."""

    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class MultivectorField:
    complex: SimplicialComplex
    parts: tuple[frozenset[int], ...]

    @cached_property
    def part_of(self) -> np.ndarray:
        out = np.full(len(self.complex), -1, dtype=np.int64)
        for i, p in enumerate(self.parts):
            out[list(p)] = i
        return out

    def part(self, s: int) -> frozenset[int]:
        return self.parts[self.part_of[s]]

    def __len__(self) -> int:
        return len(self.parts)

    def inscribed_in(self, other: "MultivectorField") -> bool:
        """Every part of ``self`` lies inside a part of ``other``."""
        return all(len({int(other.part_of[s]) for s in p}) == 1 for p in self.parts)

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            for i, p in enumerate(self.parts):
                fh.write(f"{i}: " + " ".join(str(s) for s in sorted(p)) + "\n")

    @classmethod
    def load(cls, K: SimplicialComplex, path) -> "MultivectorField":
        parts = []
        with open(path) as fh:
            for line in fh:
                if line.strip():
                    parts.append([int(x) for x in line.partition(":")[2].split()])
        return validate_mvf(K, parts)


def validate_mvf(K: SimplicialComplex, parts: Iterable[Iterable[int]]) -> MultivectorField:
    """Check partition and orderly convexity; parts are returned sorted by smallest id."""
    parts = [frozenset(int(s) for s in p) for p in parts]
    seen: dict[int, int] = {}
    for i, p in enumerate(parts):
        if not p:
            raise InvalidFieldError(f"part {i} is empty")
        for s in p:
            if not 0 <= s < len(K):
                raise InvalidFieldError(f"simplex id {s} out of range")
            if s in seen:
                raise InvalidFieldError(f"simplex {s} lies in parts {seen[s]} and {i}", witness=s)
            seen[s] = i
    missing = sorted(set(range(len(K))) - set(seen))
    if missing:
        raise InvalidFieldError(f"{len(missing)} simplices are in no part, first {missing[0]}", witness=missing[0])
    for i, p in enumerate(parts):
        w = orderly_convexity_witness(K, p)
        if w is not None:
            raise InvalidFieldError(f"part {i} is not orderly convex: {w[0]} <= {w[1]} <= {w[2]}", witness=w)
    return MultivectorField(K, tuple(sorted(parts, key=min)))


def singleton_field(K: SimplicialComplex) -> MultivectorField:
    return MultivectorField(K, tuple(frozenset([s]) for s in range(len(K))))


def generated_system(V: MultivectorField) -> CombinatorialDynamicalSystem:
    K = V.complex
    succ = [K.all_faces[s] | V.part(s) for s in range(len(K))]
    return CombinatorialDynamicalSystem.from_successors(K, succ)


def intersect(V: MultivectorField, W: MultivectorField) -> MultivectorField:
    if V.complex is not W.complex and len(V.complex) != len(W.complex):
        raise ValueError("fields live on different complexes")
    groups: dict[tuple[int, int], set[int]] = {}
    for s in range(len(V.complex)):
        groups.setdefault((int(V.part_of[s]), int(W.part_of[s])), set()).add(s)
    return MultivectorField(V.complex, tuple(sorted((frozenset(g) for g in groups.values()), key=min)))


def pullback(K: SimplicialComplex, f: Sequence[int], V: MultivectorField) -> MultivectorField:
    """Parts ``f^{-1}(P)`` for the parts ``P`` of a field on the target complex.

    ``f[s]`` is the image simplex of ``s``; it must preserve the face order.
    """
    L = V.complex
    f = [int(x) for x in f]
    if len(f) != len(K):
        raise ValueError("simplex map needs one image per simplex")
    for s in range(len(K)):
        for t in K.facets[s]:
            if not L.is_face(f[t], f[s]):
                raise ValueError(f"map does not preserve the face order at {t} <= {s}")
    groups: dict[int, set[int]] = {}
    for s in range(len(K)):
        groups.setdefault(int(V.part_of[f[s]]), set()).add(s)
    parts = [frozenset(g) for g in groups.values()]
    for p in parts:
        w = orderly_convexity_witness(K, p)
        if w is not None:
            raise AssertionError(f"preimage is not orderly convex: {w}")
    return MultivectorField(K, tuple(sorted(parts, key=min)))


def is_trivial_morse(V: MultivectorField, part: Iterable[int]) -> bool:
    """Relative homology of ``(cl part, cl part \\ part)`` vanishes."""
    K = V.complex
    part = frozenset(part)
    cl = closure(K, part)
    X = [K.simplices[s] for s in cl]
    A = [K.simplices[s] for s in cl - part]
    return all(b == 0 for b in relative_betti(X, A))


# -- fields from vector clouds ----------------------------------------------


@dataclass
class CvcmfTrace:
    """Bookkeeping of a CVCMF run, kept for run metadata."""

    conflict_updates: int = 0
    aligned_vertices: int = 0
    scan_order: str = "descending dimension, then ascending id; faces by ascending id"


def _toplex_frames(K: SimplicialComplex):
    X = K.float_coords
    frames = {}
    for t in K.toplexes:
        verts = list(K.simplices[t])
        P = X[verts]
        E = (P[1:] - P[0]).T
        Einv = np.linalg.inv(E)
        # gradient of each barycentric coordinate
        grads = np.vstack([-Einv.sum(axis=0), Einv])
        frames[int(t)] = (verts, grads)
    return frames


def _enters_open_cell(sigma_verts, toplex_frame, u: np.ndarray) -> bool:
    """A ray from the barycenter of ``sigma`` along ``u`` enters the open toplex."""
    verts, grads = toplex_frame
    for w, g in zip(verts, grads):
        if w in sigma_verts:
            continue
        if not float(g @ u) > 0:
            return False
    return True


def vector_angle(u: np.ndarray, v: np.ndarray) -> float:
    """Angle in degrees between two nonzero vectors."""
    # rescale first so tiny components do not underflow the norms
    u = u / np.abs(u).max()
    v = v / np.abs(v).max()
    c = float(u @ v) / (np.linalg.norm(u) * np.linalg.norm(v))
    return math.degrees(math.acos(max(-1.0, min(1.0, c))))


def simplex_angle(K: SimplicialComplex, frames, sid: int, p: int, v: np.ndarray) -> float:
    """Angle between the vector ``v`` at vertex ``p`` and the simplex ``sid`` containing ``p``.

    Zero vectors and vertices give 0. A toplex gives 0 when ``v`` lies in its
    closed tangent cone at ``p`` and infinity otherwise. For an edge the
    angle is measured to the direction from ``p`` along the edge, so a
    vector pointing away from the edge gets an angle above 90 degrees.
    """
    verts = K.simplices[sid]
    if len(verts) == 1 or not np.any(v):
        return 0.0
    if K.is_toplex[sid] and len(verts) == K.ambient_dim + 1:
        tverts, grads = frames[sid]
        ok = all(float(g @ v) >= 0 for w, g in zip(tverts, grads) if w != p)
        return 0.0 if ok else math.inf
    X = K.float_coords
    if len(verts) == 2:
        q = verts[1] if verts[0] == p else verts[0]
        return vector_angle(v, X[q] - X[p])
    # lower-dimensional face of a higher simplex: angle to the affine span
    B = (X[[w for w in verts if w != p]] - X[p]).T
    proj = B @ np.linalg.lstsq(B, v, rcond=None)[0]
    normal = np.linalg.norm(v - proj) / np.linalg.norm(v)
    return math.degrees(math.asin(min(1.0, normal)))


def cvcmf(K: SimplicialComplex, vectors: np.ndarray, alpha: float, trace: CvcmfTrace | None = None) -> MultivectorField:
    """Multivector field from one vector per vertex with alignment angle ``alpha`` (degrees)."""
    vectors = np.asarray(vectors, dtype=float)
    if K.coords is None:
        raise ValueError("cvcmf needs a geometric complex")
    if vectors.shape != (K.n_vertices, K.ambient_dim):
        raise ValueError(f"expected {K.n_vertices} vectors of dimension {K.ambient_dim}, got shape {vectors.shape}")
    trace = trace if trace is not None else CvcmfTrace()
    n = len(K)
    frames = _toplex_frames(K)
    m = list(range(n))

    # a toplex in the star of each simplex pointed to by the mean vector
    for s in range(n):
        if K.is_toplex[s]:
            continue
        verts = K.simplices[s]
        u = vectors[list(verts)].mean(axis=0)
        if not np.any(u):
            continue
        vs = set(verts)
        for t in sorted(t for t in K.stars[s] if K.is_toplex[t]):
            if int(t) in frames and _enters_open_cell(vs, frames[int(t)], u):
                m[s] = int(t)
                break

    # align vertex vectors with the lowest-dimensional coface within alpha
    for p in range(K.n_vertices):
        v = vectors[p]
        best = None
        for s in K.stars[p]:
            if s == p:
                continue
            a = simplex_angle(K, frames, s, p, v)
            if a <= alpha:
                key = (int(K.dims[s]), a, s)
                if best is None or key < best:
                    best = key
        if best is not None:
            m[p] = best[2]
            trace.aligned_vertices += 1

    for s in range(n):
        if not K.is_face(s, m[s]):
            raise AssertionError(f"assignment of {s} to {m[s]} is not a coface")

    # remove convexity conflicts; with tau <= sigma <= m[sigma] the intervals
    # [tau, m[tau]] and [sigma, m[sigma]] meet exactly when sigma <= m[tau]
    budget = n * n
    for s in sorted(range(n), key=lambda x: (-int(K.dims[x]), x)):
        faces = sorted(K.all_faces[s] - {s})
        changed = True
        while changed:
            changed = False
            for t in faces:
                if m[t] != m[s] and K.is_face(s, m[t]):
                    m[t] = s
                    m[s] = s
                    changed = True
                    trace.conflict_updates += 1
                    if trace.conflict_updates > budget:
                        raise RuntimeError("conflict removal did not terminate")

    groups: dict[int, list[int]] = {}
    for s in range(n):
        groups.setdefault(m[s], []).append(s)
    return validate_mvf(K, groups.values())


def write_cloud(path, K: SimplicialComplex, vectors: np.ndarray) -> None:
    X = K.float_coords
    d = X.shape[1]
    header = ",".join([f"p{c}" for c in "xyz"[:d]] + [f"v{c}" for c in "xyz"[:d]])
    np.savetxt(path, np.hstack([X, vectors]), fmt="%.17g", delimiter=",", header=header, comments="")


def read_cloud(path) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    d = data.shape[1] // 2
    return data[:, :d], data[:, d:]
