"""Angle zigzag of CVCMF fields for the predator-prey system on a 60x40 grid.

    python3 scripts/run_lotka_volterra.py --out out/lv [--config FILE]
"""

import argparse
import logging
import time

from combdyn.pipelines import load_config, lv_config, lv_experiment


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default="out/lv")
    ap.add_argument("--config")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(message)s")

    cfg = lv_config(out=args.out)
    if args.config:
        cfg = load_config(args.config, cfg)

    t0 = time.perf_counter()
    result = lv_experiment(cfg)
    for st in result.stages:
        print(f"{st.label:>8}: {len(st.sets)} Morse sets, {len(st.kept)} kept")
    print(f"bars spanning every step: {result.full_bars()}")
    print(f"wrote {cfg.out} in {time.perf_counter() - t0:.0f} s")


if __name__ == "__main__":
    main()
