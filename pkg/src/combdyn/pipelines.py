"""End-to-end experiment drivers: threshold sweeps of sampled maps and angle zigzags of vector clouds."""

from __future__ import annotations

import dataclasses
import json
import logging
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .complex import SimplicialComplex, write_mesh
from .dynamics import minimal_morse_decomposition
from .mesh import grid_mesh
from .mvf import CvcmfTrace, MultivectorField, cvcmf, generated_system, intersect, is_trivial_morse
from .nerve import HomologyCache, NerveHomology, nerve_inclusion, nerve_map
from .persistence import Barcode, PersistenceModule, filtration_persistence, zigzag_decompose
from .render import barcode_svg, diagram_svg, morse_overlay_svg
from .sampled_map import FrequencyTable, as_fraction, build_f_mu, count_frequencies, write_samples
from .systems import RNG_ALGORITHM, KuznetsovParams, LVParams, sample_kuznetsov, sample_lv_vectors

log = logging.getLogger(__name__)

DEGREES = (0, 1)


@dataclass
class RunConfig:
    """Every knob of a run; the seed fixes all random draws."""

    seed: int = 20190601
    nx: int = 48
    ny: int = 48
    region: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)
    n_samples: int = 7_000_000
    sigma_x_cells: float = 0.25
    sigma_y_cells: float = 1.0
    n_levels: int = 0
    level_step: int = 2
    levels: tuple[str, ...] = ()
    alphas: tuple[float, ...] = (0.0, 7.0, 14.0, 21.0, 28.0, 35.0)
    overlay_steps: tuple[int, ...] = ()
    write_samples: bool = False
    out: str = "out"

    @property
    def cell_size(self) -> float:
        return (self.region[1] - self.region[0]) / self.nx

    def mu_levels(self, n_max: int | None = None) -> list[Fraction]:
        """Decreasing thresholds.

        Explicit ``levels`` win; otherwise ``i / n_levels`` for ``i = n_levels .. 0``
        when ``n_levels`` is set, and ``c / n_max`` for counts ``c = n_max, n_max - level_step, .., 0``.
        """
        if self.levels:
            lv = [as_fraction(x) for x in self.levels]
        elif self.n_levels > 0:
            lv = [Fraction(i, self.n_levels) for i in range(self.n_levels, -1, -1)]
        else:
            if not n_max or self.level_step < 1:
                raise ValueError("count-based levels need n_max > 0 and level_step >= 1")
            lv = [Fraction(c, n_max) for c in range(n_max, -1, -self.level_step)]
            if lv[-1] != 0:
                lv.append(Fraction(0))
        if any(a <= b for a, b in zip(lv, lv[1:])):
            raise ValueError("threshold levels must be strictly decreasing")
        return lv


def kuznetsov_config(**kw) -> RunConfig:
    return RunConfig(**kw)


def lv_config(**kw) -> RunConfig:
    base = dict(nx=60, ny=40, region=(0.05, 3.5, 0.05, 2.0))
    base.update(kw)
    return RunConfig(**base)


def _coerce(value: str, current):
    if isinstance(current, bool):
        return value.strip().lower() in ("1", "true", "yes", "on")
    if isinstance(current, int):
        return int(value)
    if isinstance(current, float):
        return float(value)
    if isinstance(current, tuple):
        return tuple(v for v in value.replace(",", " ").split() if v)
    return value


_FLOAT_TUPLES = {"region", "alphas"}
_INT_TUPLES = {"overlay_steps"}


def load_config(path, base: RunConfig) -> RunConfig:
    """Apply a flat ``key = value`` file on top of ``base``; ``#`` starts a comment."""
    names = {f.name for f in dataclasses.fields(RunConfig)}
    updates = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if not sep or key not in names:
                raise ValueError(f"{path}:{lineno}: unknown or malformed setting {line!r}")
            updates[key] = parse_setting(key, value, getattr(base, key))
    return dataclasses.replace(base, **updates)


def parse_setting(key: str, value: str, current):
    items = [v for v in value.replace(",", " ").split() if v]
    if key in _FLOAT_TUPLES:
        return tuple(float(v) for v in items)
    if key in _INT_TUPLES:
        return tuple(int(v) for v in items)
    if key == "levels":
        return tuple(items)
    return _coerce(value, current)


# -- persistence of sequences of Morse decompositions ------------------------


@dataclass
class Stage:
    """One step of a sweep: the Morse sets, and which of them enter the nerve."""

    label: str
    sets: list[frozenset[int]]
    kept: list[int]

    @property
    def kept_sets(self) -> list[frozenset[int]]:
        return [self.sets[i] for i in self.kept]


@dataclass
class MorsePersistence:
    barcode: Barcode
    weights: list[float]
    betti: list[list[int]]


def morse_persistence(stages: Sequence[Stage], forward: Sequence[bool], cache: HomologyCache) -> MorsePersistence:
    """Barcode of ``H(N(M_1)) -- H(N(M_2)) -- ...`` along nerve inclusions.

    The module is block diagonal over chains of Morse sets linked by
    containment, so each such track is decomposed on its own; a bar's weight
    is the mean size of its track's sets over the bar's steps.
    """
    n = len(stages)
    homs = [NerveHomology.build(st.kept_sets, cache) for st in stages]
    owners: list[list[int]] = []
    for i in range(n - 1):
        src, dst = (i, i + 1) if forward[i] else (i + 1, i)
        full = nerve_inclusion(stages[src].sets, stages[dst].sets)
        pos = {j: q for q, j in enumerate(stages[dst].kept)}
        owners.append([pos.get(full[j], -1) for j in stages[src].kept])

    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, st in enumerate(stages):
        for q in range(len(st.kept)):
            parent[(t, q)] = (t, q)
    for i, own in enumerate(owners):
        src, dst = (i, i + 1) if forward[i] else (i + 1, i)
        for q, r in enumerate(own):
            if r >= 0:
                a, b = find((src, q)), find((dst, r))
                if a != b:
                    parent[max(a, b)] = min(a, b)
    tracks: dict[tuple[int, int], list[tuple[int, int]]] = {}
    for node in sorted(parent):
        tracks.setdefault(find(node), []).append(node)

    full_maps = {
        k: [
            nerve_map(homs[i if forward[i] else i + 1], homs[i + 1 if forward[i] else i], k, owners[i])
            for i in range(n - 1)
        ]
        for k in DEGREES
    }
    intervals: list[tuple[int, int, int]] = []
    weights: list[float] = []
    for root in sorted(tracks):
        members = tracks[root]
        by_step: list[list[int]] = [[] for _ in range(n)]
        for t, q in members:
            by_step[t].append(q)
        sizes = [sum(len(stages[t].kept_sets[q]) for q in by_step[t]) for t in range(n)]
        for k in DEGREES:
            gens = []
            for t in range(n):
                offs = homs[t].offsets[k]
                gens.append([g for q in by_step[t] for g in range(offs[q], offs[q + 1])])
            dims = [len(g) for g in gens]
            if sum(dims) == 0:
                continue
            maps = []
            for i in range(n - 1):
                m = full_maps[k][i]
                if forward[i]:
                    maps.append(m[np.ix_(gens[i + 1], gens[i])])
                else:
                    maps.append(m[np.ix_(gens[i], gens[i + 1])])
            module = PersistenceModule(dims, maps, list(forward))
            bc = filtration_persistence(module, k) if all(forward) else zigzag_decompose(module, k)
            for kk, b, d in bc.intervals:
                intervals.append((kk, b, d))
                weights.append(float(np.mean(sizes[b - 1:d])))
    order = sorted(range(len(intervals)), key=lambda j: intervals[j])
    barcode = Barcode(n, [intervals[j] for j in order])
    weights = [weights[j] for j in order]
    betti = [[h.dim(k) for k in DEGREES] for h in homs]
    barcode.check_pointwise({k: [b[k] for b in betti] for k in DEGREES})
    return MorsePersistence(barcode, weights, betti)


# -- threshold sweep ---------------------------------------------------------


@dataclass
class SweepResult:
    levels: list[Fraction]
    stages: list[Stage]
    persistence: MorsePersistence
    meta: dict = field(default_factory=dict)

    @property
    def barcode(self) -> Barcode:
        return self.persistence.barcode

    @property
    def emergence_step(self) -> int | None:
        """First step (1-based) with a nonempty Morse decomposition."""
        for t, st in enumerate(self.stages, 1):
            if st.sets:
                return t
        return None

    def long_bars(self, fraction: float = 0.25) -> dict[int, int]:
        """Bars per degree spanning at least ``fraction`` of the steps from emergence on."""
        e = self.emergence_step
        if e is None:
            return {k: 0 for k in DEGREES}
        span = len(self.levels) - e + 1
        out = {k: 0 for k in DEGREES}
        for k, b, d in self.barcode.intervals:
            if d - b + 1 >= fraction * span:
                out[k] = out.get(k, 0) + 1
        return out


def run_mu_sweep(K: SimplicialComplex, table: FrequencyTable, levels: Sequence, cache: HomologyCache | None = None) -> SweepResult:
    """Morse decompositions of ``F_mu`` for decreasing ``mu`` and the persistence of their nerves."""
    levels = [as_fraction(m) for m in levels]
    if any(a <= b for a, b in zip(levels, levels[1:])):
        raise ValueError("threshold levels must be strictly decreasing")
    cache = cache or HomologyCache(K)
    stages = []
    for mu in levels:
        F = build_f_mu(K, table, mu)
        M = minimal_morse_decomposition(F)
        stages.append(Stage(str(mu), list(M.sets), list(range(len(M)))))
        log.info("mu=%s: %d Morse sets, sizes %s", mu, len(M), sorted((len(m) for m in M.sets), reverse=True)[:5])
    pers = morse_persistence(stages, [True] * (len(stages) - 1), cache)
    return SweepResult(levels, stages, pers)


# -- angle zigzag ------------------------------------------------------------


@dataclass
class ZigzagResult:
    alphas: list[float]
    fields: list[MultivectorField]
    stages: list[Stage]
    persistence: MorsePersistence
    meta: dict = field(default_factory=dict)

    @property
    def barcode(self) -> Barcode:
        return self.persistence.barcode

    def full_bars(self) -> dict[int, int]:
        n = self.barcode.n_steps
        out = {k: 0 for k in DEGREES}
        for k, b, d in self.barcode.intervals:
            if b == 1 and d == n:
                out[k] = out.get(k, 0) + 1
        return out


def nontrivial_sets(V: MultivectorField, sets: Sequence[frozenset[int]]) -> list[int]:
    """Indices of Morse sets kept after dropping single multivectors with vanishing relative homology."""
    kept = []
    for i, m in enumerate(sets):
        parts = {int(V.part_of[s]) for s in m}
        if len(parts) == 1 and is_trivial_morse(V, m):
            continue
        kept.append(i)
    return kept


def _field_stage(label: str, V: MultivectorField) -> Stage:
    M = minimal_morse_decomposition(generated_system(V))
    return Stage(label, list(M.sets), nontrivial_sets(V, M.sets))


def run_alpha_zigzag(K: SimplicialComplex, vectors: np.ndarray, alphas: Sequence[float], cache: HomologyCache | None = None) -> ZigzagResult:
    """Fields ``V_i = cvcmf(alpha_i)`` interleaved with ``V_i ⊓ V_{i+1}``, and their zigzag barcode."""
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise ValueError("need at least one angle")
    cache = cache or HomologyCache(K)
    traces = [CvcmfTrace() for _ in alphas]
    fields = [cvcmf(K, vectors, a, tr) for a, tr in zip(alphas, traces)]
    stages: list[Stage] = []
    forward: list[bool] = []
    all_fields: list[MultivectorField] = []
    for i, (a, V) in enumerate(zip(alphas, fields)):
        if i > 0:
            W = intersect(fields[i - 1], V)
            all_fields.append(W)
            stages.append(_field_stage(f"{_fmt_angle(alphas[i - 1])}^{_fmt_angle(a)}", W))
            forward.append(True)
        all_fields.append(V)
        stages.append(_field_stage(_fmt_angle(a), V))
        if i < len(alphas) - 1:
            forward.append(False)
    pers = morse_persistence(stages, forward, cache)
    meta = {"conflict_updates": [t.conflict_updates for t in traces], "scan_order": traces[0].scan_order}
    return ZigzagResult(alphas, all_fields, stages, pers, meta)


def _fmt_angle(a: float) -> str:
    return f"{a:g}"


# -- full runs with files ----------------------------------------------------


def _dump_stage(path, stage: Stage) -> None:
    with open(path, "w") as fh:
        fh.write(f"# {stage.label}: {len(stage.sets)} Morse sets, {len(stage.kept)} kept\n")
        kept = set(stage.kept)
        for i, m in enumerate(stage.sets):
            flag = "" if i in kept else " (trivial)"
            fh.write(f"{i}{flag}: " + " ".join(str(s) for s in sorted(m)) + "\n")


def _write_meta(path, meta: dict) -> None:
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def kuznetsov_experiment(cfg: RunConfig, write: bool = True) -> SweepResult:
    K = grid_mesh(cfg.region, cfg.nx, cfg.ny)
    r = cfg.cell_size
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    X, Y, rejected = sample_kuznetsov(cfg.n_samples, rng, cfg.sigma_x_cells * r, cfg.sigma_y_cells * r, KuznetsovParams(), box=cfg.region[1])
    table = count_frequencies(K, X, Y)
    table.n_rejected += rejected
    result = run_mu_sweep(K, table, cfg.mu_levels(table.n_max))
    result.meta = {
        "experiment": "kuznetsov",
        "config": _config_dict(cfg),
        "rng": RNG_ALGORITHM,
        "numpy": np.__version__,
        "n_pairs": table.n_pairs,
        "n_rejected": table.n_rejected,
        "rejected_fraction": table.n_rejected / cfg.n_samples,
        "n_max": table.n_max,
        "emergence_step": result.emergence_step,
        "long_bars": result.long_bars(),
    }
    if write:
        os.makedirs(cfg.out, exist_ok=True)
        write_mesh(K, os.path.join(cfg.out, "mesh.txt"))
        if cfg.write_samples:
            write_samples(os.path.join(cfg.out, "samples.csv"), X, Y)
        write_sweep(result, K, cfg.out, cfg.overlay_steps)
    return result


def write_sweep(result: SweepResult, K: SimplicialComplex, out: str, overlay_steps: Sequence[int] = ()) -> None:
    os.makedirs(out, exist_ok=True)
    bc = result.barcode
    bc.write_csv(os.path.join(out, "barcode.csv"))
    labels = [str(t) for t in range(1, len(result.levels) + 1)]
    barcode_svg(bc, os.path.join(out, "barcode.svg"), result.persistence.weights, labels, "Morse persistence over decreasing mu")
    diagram_svg(bc, os.path.join(out, "diagram.svg"), "persistence diagram (step indices)")
    with open(os.path.join(out, "levels.csv"), "w") as fh:
        fh.write("step,mu,morse_sets,b0,b1\n")
        for t, (mu, st, b) in enumerate(zip(result.levels, result.stages, result.persistence.betti), 1):
            fh.write(f"{t},{mu},{len(st.sets)},{b[0]},{b[1]}\n")
    mdir = os.path.join(out, "morse")
    os.makedirs(mdir, exist_ok=True)
    for t, st in enumerate(result.stages, 1):
        _dump_stage(os.path.join(mdir, f"step_{t:03d}.txt"), st)
    for t in overlay_steps:
        if 1 <= t <= len(result.stages):
            st = result.stages[t - 1]
            morse_overlay_svg(K, st.kept_sets, os.path.join(out, f"morse_step_{t:03d}.svg"), title=f"mu = {st.label}")
    _write_meta(os.path.join(out, "run.json"), result.meta)


def lv_experiment(cfg: RunConfig, write: bool = True) -> ZigzagResult:
    K = grid_mesh(cfg.region, cfg.nx, cfg.ny)
    vectors = sample_lv_vectors(K, LVParams())
    result = run_alpha_zigzag(K, vectors, cfg.alphas)
    result.meta.update(
        {
            "experiment": "lotka-volterra",
            "config": _config_dict(cfg),
            "numpy": np.__version__,
            "full_bars": result.full_bars(),
            "steps": [st.label for st in result.stages],
        }
    )
    if write:
        write_zigzag(result, K, cfg.out, cfg.overlay_steps)
    return result


def write_zigzag(result: ZigzagResult, K: SimplicialComplex, out: str, overlay_steps: Sequence[int] = ()) -> None:
    os.makedirs(out, exist_ok=True)
    bc = result.barcode
    bc.write_csv(os.path.join(out, "barcode.csv"))
    labels = [st.label for st in result.stages]
    barcode_svg(bc, os.path.join(out, "barcode.svg"), result.persistence.weights, labels, "zigzag over alignment angle")
    mdir = os.path.join(out, "morse")
    os.makedirs(mdir, exist_ok=True)
    for t, st in enumerate(result.stages, 1):
        _dump_stage(os.path.join(mdir, f"step_{t:03d}.txt"), st)
    steps = overlay_steps or tuple(range(1, len(result.stages) + 1, 2))
    for t in steps:
        if 1 <= t <= len(result.stages):
            st = result.stages[t - 1]
            morse_overlay_svg(K, st.kept_sets, os.path.join(out, f"morse_step_{t:03d}.svg"), title=f"alpha = {st.label}")
    _write_meta(os.path.join(out, "run.json"), result.meta)


def _config_dict(cfg: RunConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d.pop("out", None)
    return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}
