#!/usr/bin/env python3
"""Reproduce all four experiment figures' data files in one go.

Writes figN.csv and figN_meta.json per preset into the output directory
(default: $RS_SNC_OUT or ./results).  Trials default to a quick desk run;
pass --trials 1000000 for publication-grade error bars.
"""

import argparse
import sys
import time

from rs_snc.cli import PRESETS, preset_config, run_sweep


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=20240901)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", default="")
    ap.add_argument(
        "--only", choices=PRESETS, action="append", help="run a subset of presets"
    )
    args = ap.parse_args()

    for name in args.only or PRESETS:
        cfg = preset_config(name)
        cfg.trials = args.trials
        cfg.seed = args.seed
        cfg.jobs = args.jobs
        if args.out:
            cfg.out = args.out
        t0 = time.perf_counter()
        written = run_sweep(cfg)
        print(f"{name}: {written.get('csv', '-')} [{time.perf_counter() - t0:.1f}s]")
    return 0


if __name__ == "__main__":
    sys.exit(main())
