"""Write every preset's CSV (and a gnuplot stub) into one directory.

    python3 scripts/run_presets.py --out results/ --trials 10000
"""

import argparse
import dataclasses
import logging
import time
from pathlib import Path

from dualris.config import RunConfig, load_config
from dualris.sweep import PRESETS, format_csv, plot_stub, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--config", type=Path)
    ap.add_argument("--trials", type=int)
    ap.add_argument("--only", nargs="+", choices=sorted(PRESETS))
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    run = load_config(args.config) if args.config else RunConfig()
    if args.trials is not None:
        run = dataclasses.replace(run, mc=dataclasses.replace(run.mc, trials=args.trials))
    args.out.mkdir(parents=True, exist_ok=True)
    for name in args.only or sorted(PRESETS):
        t0 = time.perf_counter()
        records = run_sweep(run, name)
        csv = args.out / f"{name}.csv"
        csv.write_text(format_csv(records), encoding="utf-8", newline="")
        (args.out / f"{name}.gp").write_text(plot_stub(name, csv.name), encoding="utf-8")
        print(f"{name}: {len(records)} rows in {time.perf_counter() - t0:.1f} s -> {csv}")


if __name__ == "__main__":
    main()
