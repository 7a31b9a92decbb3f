"""Command line entry point: ``combdyn <subcommand> [options]``."""

from __future__ import annotations

import argparse
import dataclasses
import logging
import os
import sys

import numpy as np

from . import pipelines
from .complex import read_mesh, write_mesh
from .dynamics import CombinatorialDynamicalSystem, minimal_morse_decomposition
from .mesh import grid_mesh
from .mvf import CvcmfTrace, cvcmf, read_cloud, write_cloud
from .persistence import Barcode
from .render import barcode_svg, diagram_svg
from .sampled_map import build_f_mu, count_frequencies, read_samples, write_samples
from .systems import KuznetsovParams, LVParams, sample_kuznetsov, sample_lv_vectors


def _config(args, base: pipelines.RunConfig) -> pipelines.RunConfig:
    cfg = base
    if args.config:
        cfg = pipelines.load_config(args.config, cfg)
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.out is not None:
        updates["out"] = args.out
    for item in args.set or ():
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in {f.name for f in dataclasses.fields(cfg)}:
            raise SystemExit(f"unknown setting {key!r}")
        updates[key] = pipelines.parse_setting(key, value.strip(), getattr(cfg, key))
    return dataclasses.replace(cfg, **updates)


def _out(cfg: pipelines.RunConfig, name: str) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return os.path.join(cfg.out, name)


def _mesh(args, cfg: pipelines.RunConfig):
    if getattr(args, "mesh", None):
        return read_mesh(args.mesh)
    return grid_mesh(cfg.region, cfg.nx, cfg.ny)


def cmd_mesh_grid(args, cfg):
    K = grid_mesh(cfg.region, cfg.nx, cfg.ny)
    path = _out(cfg, "mesh.txt")
    write_mesh(K, path)
    print(f"{path}: {K.n_vertices} vertices, {len(K)} simplices, {len(K.toplexes)} toplexes")


def cmd_sample_kuznetsov(args, cfg):
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    r = cfg.cell_size
    X, Y, rejected = sample_kuznetsov(cfg.n_samples, rng, cfg.sigma_x_cells * r, cfg.sigma_y_cells * r, KuznetsovParams(), box=cfg.region[1])
    path = _out(cfg, "samples.csv")
    write_samples(path, X, Y)
    print(f"{path}: {len(X)} pairs kept, {rejected} rejected")


def cmd_sample_lv(args, cfg):
    K = _mesh(args, cfg)
    path = _out(cfg, "cloud.csv")
    write_cloud(path, K, sample_lv_vectors(K, LVParams()))
    print(f"{path}: {K.n_vertices} vectors")


def cmd_fmu(args, cfg):
    K = _mesh(args, cfg)
    X, Y = read_samples(args.samples)
    table = count_frequencies(K, X, Y)
    F = build_f_mu(K, table, args.mu)
    path = _out(cfg, "system.txt")
    F.dump(path)
    print(f"{path}: {F.n_edges} edges, n_max = {table.n_max}, {table.n_rejected} pairs outside the mesh")


def cmd_cvcmf(args, cfg):
    K = _mesh(args, cfg)
    _, vectors = read_cloud(args.cloud)
    trace = CvcmfTrace()
    V = cvcmf(K, vectors, args.alpha, trace)
    path = _out(cfg, "field.txt")
    V.dump(path)
    print(f"{path}: {len(V)} multivectors, {trace.conflict_updates} conflict updates")


def cmd_morse(args, cfg):
    K = _mesh(args, cfg)
    if args.field:
        from .mvf import MultivectorField, generated_system

        F = generated_system(MultivectorField.load(K, args.field))
    else:
        F = CombinatorialDynamicalSystem.load(K, args.system)
    M = minimal_morse_decomposition(F)
    path = _out(cfg, "morse.txt")
    M.dump(path)
    print(f"{path}: {len(M)} Morse sets")


def cmd_sweep_mu(args, cfg):
    result = pipelines.kuznetsov_experiment(cfg, write=True)
    print(f"{cfg.out}: emergence at step {result.emergence_step}, long bars {result.long_bars()}")


def cmd_zigzag_alpha(args, cfg):
    result = pipelines.lv_experiment(cfg, write=True)
    print(f"{cfg.out}: full bars {result.full_bars()}")


def cmd_render(args, cfg):
    bc = Barcode.read_csv(args.barcode, args.steps)
    stem = os.path.splitext(args.barcode)[0]
    barcode_svg(bc, stem + ".svg")
    diagram_svg(bc, stem + "_diagram.svg")
    print(f"{stem}.svg, {stem}_diagram.svg: {len(bc)} bars")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="combdyn", description="Morse decompositions of sampled dynamics and their persistence.")
    p.add_argument("--seed", type=int, default=None, help="random seed (overrides the config)")
    p.add_argument("--config", default=None, help="flat key = value file")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override one config setting")
    p.add_argument("--lv", action="store_true", help="start from the predator-prey defaults")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("mesh-grid", help="write a triangulated grid mesh").set_defaults(func=cmd_mesh_grid)
    sub.add_parser("sample-kuznetsov", help="noisy samples of the Kuznetsov map").set_defaults(func=cmd_sample_kuznetsov)

    s = sub.add_parser("sample-lv", help="predator-prey vectors at mesh vertices")
    s.add_argument("--mesh")
    s.set_defaults(func=cmd_sample_lv)

    s = sub.add_parser("fmu", help="combinatorial system F_mu from samples")
    s.add_argument("--mesh")
    s.add_argument("--samples", required=True)
    s.add_argument("--mu", required=True, help="threshold, e.g. 3/10 or 0.3")
    s.set_defaults(func=cmd_fmu)

    s = sub.add_parser("cvcmf", help="multivector field from a vector cloud")
    s.add_argument("--mesh")
    s.add_argument("--cloud", required=True)
    s.add_argument("--alpha", type=float, required=True, help="alignment angle in degrees")
    s.set_defaults(func=cmd_cvcmf)

    s = sub.add_parser("morse", help="minimal Morse decomposition of a system or field")
    s.add_argument("--mesh")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--system")
    g.add_argument("--field")
    s.set_defaults(func=cmd_morse)

    sub.add_parser("sweep-mu", help="full Kuznetsov threshold sweep").set_defaults(func=cmd_sweep_mu)
    sub.add_parser("zigzag-alpha", help="full predator-prey angle zigzag").set_defaults(func=cmd_zigzag_alpha)

    s = sub.add_parser("render", help="SVG barcode and diagram from a barcode CSV")
    s.add_argument("barcode")
    s.add_argument("--steps", type=int, required=True, help="number of steps in the index set")
    s.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    lv = args.lv or args.command in ("sample-lv", "zigzag-alpha")
    cfg = _config(args, pipelines.lv_config() if lv else pipelines.kuznetsov_config())
    try:
        args.func(args, cfg)
    except (OSError, ValueError) as exc:
        print(f"combdyn: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
