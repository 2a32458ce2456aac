"""Closed-form SE vs Monte Carlo at the two default reference points.

    python3 scripts/reference_points.py --trials 1000000
"""

import argparse
import time

from dualris import analysis
from dualris.channel import ScenarioConfig

POINTS = [(10, 30.0), (50, 15.0)]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=10**6)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    base = ScenarioConfig()
    print(f"{'M':>4} {'Pt dBm':>7} {'lower':>9} {'ASE':>9} {'upper':>9} {'MC':>9} {'MC se':>9} {'secs':>6}")
    for m, pt in POINTS:
        cfg = base.with_elements(m).with_pt_dbm(pt)
        budget = analysis.link_budget(cfg)
        g = analysis.scenario_stats(cfg)
        t0 = time.perf_counter()
        mc, se = analysis.se_exact_mc_reference(budget, m, m, cfg.fading, args.trials, args.seed)
        dt = time.perf_counter() - t0
        print(
            f"{m:>4} {pt:>7.1f} {analysis.se_lower(budget, g):>9.5f} "
            f"{analysis.se_approx_large_m(budget, m, m, cfg.fading):>9.5f} "
            f"{analysis.se_upper(budget, g):>9.5f} {mc:>9.5f} {se:>9.2e} {dt:>6.1f}"
        )


if __name__ == "__main__":
    main()
