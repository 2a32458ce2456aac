"""Command line: ``dualris sweep|validate|point``.

Exit codes: 0 success, 1 validation failure, 2 config error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import math
import logging
import sys
from pathlib import Path

from . import analysis, montecarlo
from .channel import ScenarioKind
from .config import ConfigError, RunConfig, load_config
from .sweep import PRESETS, batch_seed, cascade_shape, format_csv, plot_stub, run_sweep, validate

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

log = logging.getLogger("dualris")


def _load(args):
    run = load_config(args.config) if args.config else RunConfig()
    overrides = {}
    if getattr(args, "trials", None) is not None:
        overrides["trials"] = args.trials
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if overrides:
        run = dataclasses.replace(run, mc=dataclasses.replace(run.mc, **overrides))
    return run


def cmd_sweep(args):
    run = _load(args)
    records = run_sweep(run, args.preset)
    text = format_csv(records)
    out = Path(args.out)
    try:
        out.write_text(text, encoding="utf-8", newline="")
        if args.plot_stub:
            Path(args.plot_stub).write_text(plot_stub(args.preset, out.name), encoding="utf-8")
    except OSError as exc:
        raise _IOFailure(f"cannot write {exc.filename}: {exc.strerror}") from None
    log.info("wrote %d records to %s", len(records), out)
    return EXIT_OK


def cmd_validate(args):
    run = _load(args)
    report = validate(run)
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


def point_report(run: RunConfig):
    """Aligned text table of every metric at the configured operating point."""
    cfg = run.scenario
    budget = analysis.link_budget(cfg)
    rows = [
        ("scenario", cfg.kind.value),
        ("M1 / M2 / N", f"{cfg.m1_count} / {cfg.m2_count} / {cfg.n_count}"),
        ("P_t [dBm]", f"{cfg.power.pt_dbm:.4g}"),
        ("transmit SNR [dB]", f"{cfg.power.pt_dbm - cfg.noise_dbm:.4g}"),
        ("composite gain B [dB]", f"{10 * math.log10(budget.gain_b):.4f}"),
    ]
    batch = None
    if run.mc.trials > 0:
        a, b = cascade_shape(cfg)
        f = cfg.direct_fading if cfg.kind is ScenarioKind.DCT else cfg.fading
        seed = batch_seed(run.mc.seed, cfg.kind, cfg.m1_count, cfg.m2_count, cfg.n_count)
        batch = montecarlo.sample_cascade(a, b, f, run.mc.trials, seed, allow_large=run.mc.allow_large,
                                          workers=run.mc.workers)

    if cfg.kind is ScenarioKind.DCT:
        se = analysis.dct_se(budget, cfg.direct_fading.omega)
        rows.append(("SE exact (Rayleigh) [bps/Hz]", f"{se:.6f}"))
    else:
        g = analysis.scenario_stats(cfg)
        m1, m2 = cascade_shape(cfg)
        se = analysis.se_lower(budget, g)
        rows += [
            ("mu_A / sigma_A", f"{g.mu_a:.6g} / {g.sigma_a:.6g}"),
            ("SE upper [bps/Hz]", f"{analysis.se_upper(budget, g):.6f}"),
            ("SE lower [bps/Hz]", f"{se:.6f}"),
            ("SE approx (large M) [bps/Hz]", f"{analysis.se_approx_large_m(budget, m1, m2, cfg.fading):.6f}"),
            ("SE Gaussian quadrature [bps/Hz]", f"{analysis.se_gaussian_quadrature(budget, g):.6f}"),
        ]
        for r in run.grids.r_th:
            rows.append((f"outage @ {r:g} bps/Hz", f"{analysis.outage_probability(budget, g, r):.6g}"))
    rows.append(("EE [bps/Hz/W]", f"{analysis.energy_efficiency(se, cfg.power, cfg.total_elements):.6g}"))
    if batch is not None:
        mean, err = montecarlo.empirical_se(batch, budget)
        rows.append((f"SE Monte Carlo ({batch.trials} trials)", f"{mean:.6f} +- {err:.2g}"))
        if cfg.kind is not ScenarioKind.DCT:
            for r in run.grids.r_th:
                p, e = montecarlo.empirical_outage(batch, budget, r)
                rows.append((f"outage MC @ {r:g} bps/Hz", f"{p:.6g} +- {e:.2g}"))
    width = max(len(k) for k, _ in rows)
    buf = io.StringIO()
    for k, v in rows:
        buf.write(f"{k:<{width}}  {v}\n")
    return buf.getvalue()


def cmd_point(args):
    sys.stdout.write(point_report(_load(args)))
    return EXIT_OK


class _IOFailure(Exception):
    pass


def build_parser():
    p = argparse.ArgumentParser(prog="dualris", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="TOML config file (absent keys take defaults)")
        sp.add_argument("--trials", type=int, help="override mc.trials")
        sp.add_argument("--seed", type=int, help="override mc.seed")

    sp = sub.add_parser("sweep", help="emit CSV for a figure preset")
    common(sp)
    sp.add_argument("--preset", required=True, choices=sorted(PRESETS))
    sp.add_argument("--out", required=True, help="CSV output path")
    sp.add_argument("--plot-stub", help="also write a gnuplot script here")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("validate", help="run the analytic vs Monte Carlo cross-checks")
    common(sp)
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("point", help="evaluate the configured operating point")
    common(sp)
    sp.set_defaults(func=cmd_point)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "trials", None) is not None and args.trials < 0:
        print("error: --trials must be >= 0", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except montecarlo.BudgetError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _IOFailure as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc.filename}: {exc.strerror}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
