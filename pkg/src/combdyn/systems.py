"""The two sampled systems: a Neimark-Sacker normal-form map and a predator-prey field."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complex import SimplicialComplex

RNG_ALGORITHM = "numpy.random.Generator(PCG64).standard_normal (ziggurat)"


@dataclass(frozen=True)
class KuznetsovParams:
    theta: float = math.pi / 17
    alpha: float = 0.5
    a: float = -1.0
    b: float = 0.5


def kuznetsov_map(x: np.ndarray, p: KuznetsovParams = KuznetsovParams()) -> np.ndarray:
    """Rotation of ``(1 + alpha) x + |x|^2 [[a, -b], [b, a]] x`` by ``theta``; rows are points."""
    x = np.asarray(x, dtype=float)
    x1, x2 = x[..., 0], x[..., 1]
    r2 = x1 * x1 + x2 * x2
    u1 = (1 + p.alpha) * x1 + r2 * (p.a * x1 - p.b * x2)
    u2 = (1 + p.alpha) * x2 + r2 * (p.b * x1 + p.a * x2)
    c, s = math.cos(p.theta), math.sin(p.theta)
    return np.stack([c * u1 - s * u2, s * u1 + c * u2], axis=-1)


def invariant_radius(p: KuznetsovParams = KuznetsovParams()) -> float:
    """Radius of the invariant circle: ``|N(x)| = |x|`` with ``x != 0``."""
    # |N(x)|^2 / |x|^2 = (1 + alpha + a s)^2 + (b s)^2 with s = |x|^2
    A = p.a * p.a + p.b * p.b
    B = 2 * (1 + p.alpha) * p.a
    C = (1 + p.alpha) ** 2 - 1
    disc = B * B - 4 * A * C
    roots = [(-B - math.sqrt(disc)) / (2 * A), (-B + math.sqrt(disc)) / (2 * A)]
    s = min(r for r in roots if r > 0)
    return math.sqrt(s)


def sample_kuznetsov(
    n: int,
    rng: np.random.Generator,
    sigma_x: float,
    sigma_y: float,
    params: KuznetsovParams = KuznetsovParams(),
    box: float = 1.0,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Uniform ``x`` in ``[-box, box]^2`` and ``y = N(x + e_x) + e_y``; pairs with ``y`` outside are dropped.

    Returns the kept ``X``, ``Y`` and the number of rejected pairs.
    """
    x = rng.uniform(-box, box, size=(n, 2))
    ex = rng.standard_normal(size=(n, 2)) * sigma_x
    ey = rng.standard_normal(size=(n, 2)) * sigma_y
    y = kuznetsov_map(x + ex, params) + ey
    keep = np.all(np.abs(y) <= box, axis=1)
    return x[keep], y[keep], int(n - keep.sum())


@dataclass(frozen=True)
class LVParams:
    k: float = 3.5
    b: float = 1.0
    g: float = 0.5

    @property
    def a1(self) -> float:
        return (1 - 1 / self.k) * (self.b + 1)

    @property
    def a2(self) -> float:
        return self.g * (self.b + 1)


def lv_field(pts: np.ndarray, p: LVParams = LVParams()) -> np.ndarray:
    pts = np.asarray(pts, dtype=float)
    x, y = pts[..., 0], pts[..., 1]
    if np.any(x == -p.b):
        raise ValueError("vector field has a pole at x = -b")
    coupling = x * y / (p.b + x)
    dx = x * (1 - x / p.k) - p.a1 * coupling
    dy = p.a2 * coupling - p.g * y
    return np.stack([dx, dy], axis=-1)


def sample_lv_vectors(K: SimplicialComplex, p: LVParams = LVParams()) -> np.ndarray:
    """One field vector per mesh vertex, in vertex-id order."""
    return lv_field(K.float_coords, p)
