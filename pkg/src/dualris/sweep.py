"""Figure presets, sweep records, CSV output and the cross-check report."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import analysis, montecarlo
from .channel import ScenarioConfig, ScenarioKind, nakagami_moments
from .config import Grids, MCSettings, RunConfig, pt_grid
from .numerics import gamma_ratio

log = logging.getLogger(__name__)

__all__ = [
    "CSV_HEADER",
    "METRICS",
    "PRESETS",
    "Preset",
    "SweepRecord",
    "run_sweep",
    "write_csv",
    "format_csv",
    "flagged_records",
    "validate",
    "plot_stub",
]

CSV_HEADER = (
    "scenario", "m1", "m2", "n", "pt_dbm", "metric",
    "analytic_value", "mc_value", "mc_stderr", "trials", "seed",
)
METRICS = ("outage", "se_exact_mc", "se_upper", "se_lower", "se_approx", "ee")
_KIND_ORDER = {ScenarioKind.DRAT: 0, ScenarioKind.SRAT: 1, ScenarioKind.DCT: 2}
_SE_METRICS = ("se_exact_mc", "se_upper", "se_lower", "se_approx")


def outage_metric(r_th):
    """Outage rows carry their rate threshold in the metric label, e.g. ``outage@7.5``."""
    return f"outage@{r_th:g}"


def _metric_rank(metric):
    base, _, r = metric.partition("@")
    return (METRICS.index(base), float(r) if r else 0.0)


@dataclass(frozen=True)
class SweepRecord:
    scenario: ScenarioKind
    m1: int
    m2: int
    n: int
    pt_dbm: float
    metric: str
    analytic_value: float
    mc_value: float | None = None
    mc_stderr: float | None = None
    trials: int = 0
    seed: int = 0
    # allowed |analytic - mc| (or one-sided slack for bounds); not written to CSV
    tolerance: float | None = None

    def __post_init__(self):
        if not math.isfinite(self.analytic_value):
            raise ValueError(f"non-finite analytic value for {self.metric}")
        if (self.mc_value is not None) != (self.trials > 0):
            raise ValueError("mc_value must be present iff trials > 0")

    @property
    def flagged(self):
        if self.mc_value is None or self.tolerance is None:
            return False
        diff = self.mc_value - self.analytic_value
        if self.metric == "se_upper":
            return diff > self.tolerance
        if self.metric in ("se_lower", "ee"):
            return -diff > self.tolerance
        return abs(diff) > self.tolerance

    def sort_key(self):
        return (_KIND_ORDER[self.scenario], self.m1, self.m2, self.n, self.pt_dbm, _metric_rank(self.metric))

    def csv_row(self):
        def g(x):
            return "" if x is None else f"{x:.9g}"

        return [
            self.scenario.value, str(self.m1), str(self.m2), str(self.n), g(self.pt_dbm), self.metric,
            g(self.analytic_value), g(self.mc_value), g(self.mc_stderr), str(self.trials), str(self.seed),
        ]


@dataclass(frozen=True)
class Preset:
    name: str
    kinds: tuple
    metrics: tuple
    axis: str  # "pt" or "elements"
    pt_dbm: tuple
    elements: tuple
    description: str = ""


PRESETS = {
    "fig2": Preset(
        "fig2", (ScenarioKind.DRAT,), _SE_METRICS, "pt",
        pt_grid(-10, 30, 2.5), (10, 50, 100),
        "DRAT SE vs transmit power for several M: MC, bounds and ASE",
    ),
    "fig3": Preset(
        "fig3", (ScenarioKind.DRAT, ScenarioKind.SRAT, ScenarioKind.DCT), _SE_METRICS, "elements",
        (), (5, 10, 20, 50, 100, 200, 300, 500, 700, 1000, 1500, 2000),
        "SE vs M for DRAT, SRAT (N = 2M) and DCT at power.pt_dbm",
    ),
    "fig4": Preset(
        "fig4", (ScenarioKind.DRAT,), ("outage",), "pt",
        pt_grid(0, 40, 0.5), (50,),
        "DRAT outage vs transmit power for each sweep.r_th, M = 50",
    ),
    "fig5a": Preset(
        "fig5a", (ScenarioKind.DRAT, ScenarioKind.SRAT, ScenarioKind.DCT), ("ee",), "elements",
        (10.0,), (5, 10, 20, 30, 40, 50, 75, 100, 150, 200, 300, 500, 1000),
        "EE vs M at P_t = 10 dBm",
    ),
    "fig5b": Preset(
        "fig5b", (ScenarioKind.DRAT, ScenarioKind.SRAT, ScenarioKind.DCT), ("ee",), "pt",
        pt_grid(-10, 40, 5), (1000,),
        "EE vs transmit power at M = 1000",
    ),
}


def batch_seed(seed, kind, m1, m2, n):
    if kind is ScenarioKind.DCT:
        m1 = m2 = n = 0  # element counts do not enter the direct link
    ss = np.random.SeedSequence([seed, _KIND_ORDER[kind], m1, m2, n])
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


def cascade_shape(cfg: ScenarioConfig):
    if cfg.kind is ScenarioKind.DRAT:
        return cfg.m1_count, cfg.m2_count
    if cfg.kind is ScenarioKind.SRAT:
        return cfg.n_count, 1
    return 1, 1


def _mc_batch(cfg: ScenarioConfig, mc: MCSettings):
    """Batch for one (scenario, element count), or None when the point budget forbids it."""
    if mc.trials <= 0:
        return None
    a, b = cascade_shape(cfg)
    trials = min(mc.trials, mc.max_draws_per_point // (a * b))
    if trials < mc.min_trials:
        log.info("skipping MC for %s M1=%d M2=%d N=%d: budget allows %d trials",
                 cfg.kind.value, cfg.m1_count, cfg.m2_count, cfg.n_count, trials)
        return None
    f = cfg.direct_fading if cfg.kind is ScenarioKind.DCT else cfg.fading
    seed = batch_seed(mc.seed, cfg.kind, cfg.m1_count, cfg.m2_count, cfg.n_count)
    return montecarlo.sample_cascade(a, b, f, trials, seed, allow_large=mc.allow_large, workers=mc.workers)


def _point_records(cfg: ScenarioConfig, metrics, r_th, batch):
    """All requested metric records for one scenario at one grid point."""
    budget = analysis.link_budget(cfg)
    base = dict(scenario=cfg.kind, m1=cfg.m1_count, m2=cfg.m2_count, n=cfg.n_count, pt_dbm=round(cfg.power.pt_dbm, 9))
    mc = dict(trials=batch.trials, seed=batch.seed) if batch is not None else {}
    out = []

    se_mc = se_err = None
    if batch is not None and any(m != "outage" for m in metrics):
        se_mc, se_err = montecarlo.empirical_se(batch, budget)

    def rec(metric, value, mc_value=None, mc_err=None, tol=None):
        if batch is None:
            out.append(SweepRecord(metric=metric, analytic_value=value, **base))
        else:
            out.append(SweepRecord(metric=metric, analytic_value=value, mc_value=mc_value,
                                   mc_stderr=mc_err, tolerance=tol, **mc, **base))

    if cfg.kind is ScenarioKind.DCT:
        if cfg.direct_fading.m != 1:
            raise ValueError("closed-form DCT SE needs a Rayleigh direct link (fading.m_direct = 1)")
        se_ref = analysis.dct_se(budget, cfg.direct_fading.omega) if budget.snr_scale > 0 else 0.0
        for metric in metrics:
            if metric in _SE_METRICS:
                # no RIS: the ergodic SE is exact, so every SE metric shares it
                rec(metric, se_ref, se_mc, se_err, 3 * (se_err or 0.0) + 1e-9)
            elif metric == "ee":
                p = analysis.total_power(cfg.power, 0)
                rec("ee", se_ref / p, None if se_mc is None else se_mc / p,
                    None if se_err is None else se_err / p, 3 * (se_err or 0.0) / p + 1e-12)
            elif metric == "outage":
                raise ValueError("outage metric is defined for RIS scenarios only")
        return out

    g = analysis.scenario_stats(cfg)
    m1, m2 = cascade_shape(cfg)
    upper = analysis.se_upper(budget, g)
    lower = analysis.se_lower(budget, g)
    width = upper - lower
    tol_se = 3 * (se_err or 0.0) + 1e-9
    for metric in metrics:
        if metric == "se_upper":
            rec(metric, upper, se_mc, se_err, tol_se)
        elif metric == "se_lower":
            rec(metric, lower, se_mc, se_err, tol_se)
        elif metric == "se_approx":
            rec(metric, analysis.se_approx_large_m(budget, m1, m2, cfg.fading), se_mc, se_err, tol_se + width)
        elif metric == "se_exact_mc":
            rec(metric, analysis.se_gaussian_quadrature(budget, g), se_mc, se_err, tol_se + width)
        elif metric == "ee":
            p = analysis.total_power(cfg.power, cfg.total_elements)
            rec("ee", analysis.energy_efficiency(lower, cfg.power, cfg.total_elements),
                None if se_mc is None else se_mc / p, None if se_err is None else se_err / p, tol_se / p)
        elif metric == "outage":
            for r in r_th:
                p_a = analysis.outage_probability(budget, g, r)
                if batch is None:
                    rec(outage_metric(r), p_a)
                else:
                    p_mc, p_err = montecarlo.empirical_outage(batch, budget, r)
                    tol = 3 * math.sqrt(p_a * (1 - p_a) / batch.trials) + 1.0 / batch.trials
                    rec(outage_metric(r), p_a, p_mc, p_err, tol)
    return out


def run_sweep(run: RunConfig, preset="fig2", grids: Grids | None = None, mc: MCSettings | None = None, sink=None):
    """Evaluate a figure preset and return its records sorted by (scenario, grid point).

    Grid axes left unset in ``grids`` (or ``run.grids``) fall back to the preset.
    A single MC batch per (scenario, element count) is shared by all transmit
    powers and metrics. When ``sink`` is given the CSV is written to it.
    """
    p = PRESETS[preset] if isinstance(preset, str) else preset
    grids = grids or run.grids
    mc = mc or run.mc
    base = run.scenario

    elements = grids.elements or p.elements
    pts = grids.pt_dbm or p.pt_dbm or (round(base.power.pt_dbm, 9),)
    if not elements or not pts:
        raise ValueError("sweep needs at least one element count and one transmit power")

    records = []
    for kind in p.kinds:
        for m in elements:
            cfg = base.with_elements(int(m)).as_kind(kind)
            batch = _mc_batch(cfg, mc)
            for pt in pts:
                records.extend(_point_records(cfg.with_pt_dbm(pt), p.metrics, grids.r_th, batch))
    records.sort(key=SweepRecord.sort_key)
    n_flag = sum(r.flagged for r in records)
    if n_flag:
        log.warning("%d of %d records disagree with MC beyond tolerance", n_flag, len(records))
    if sink is not None:
        write_csv(records, sink)
    return records


def write_csv(records, sink):
    w = csv.writer(sink, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow(r.csv_row())


def format_csv(records):
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def flagged_records(records):
    return [r for r in records if r.flagged]


def plot_stub(preset, csv_path):
    """Plain gnuplot script reading the emitted CSV (one curve per scenario/metric/M)."""
    p = PRESETS[preset]
    xcol, xlabel = (5, "P_t [dBm]") if p.axis == "pt" else (2, "M")
    ylabel = {"ee": "EE [bps/Hz/W]", "outage": "outage probability"}.get(p.metrics[0], "SE [bps/Hz]")
    lines = [
        f"# {p.name}: {p.description}",
        "set datafile separator ','",
        f"set xlabel '{xlabel}'",
        f"set ylabel '{ylabel}'",
        "set key outside",
    ]
    if p.axis == "elements":
        lines.append("set logscale x")
    if p.metrics == ("outage",):
        lines.append("set logscale y")
    lines.append(
        f"plot for [s in '{' '.join(k.value for k in p.kinds)}'] '{csv_path}' "
        f"using (strcol(1) eq s ? ${xcol} : 1/0):7 with linespoints title s"
    )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- validate


def _check(name, kind, measured, tolerance, ok, detail=""):
    return {
        "name": name,
        "kind": kind,
        "measured": measured,
        "tolerance": tolerance,
        "verdict": "pass" if ok else "fail",
        "detail": detail,
    }


def _skipped(name, detail="no Monte Carlo trials requested"):
    return {"name": name, "kind": "mc", "measured": None, "tolerance": None, "verdict": "skipped", "detail": detail}


def _outage_pt_cells(cfg, g, budget_db, r_th, z_grid):
    """Transmit powers (dBm) placing the rate threshold at mu_A + z * sigma_A."""
    cells = []
    for z in z_grid:
        y = g.mu_a + z * g.sigma_a
        if y <= 0:
            continue
        snr_scale = (2.0**r_th - 1.0) / (y * y)
        cells.append(10 * math.log10(snr_scale) - budget_db + cfg.noise_dbm)
    return cells


def validate(run: RunConfig, mc: MCSettings | None = None, pt_dbm=None):
    """Run the analytic and Monte Carlo cross-checks for the configured DRAT link.

    Returns a JSON-serialisable report; ``report["passed"]`` is False iff any
    non-skipped check failed.
    """
    mc = mc or run.mc
    cfg = run.scenario.as_kind(ScenarioKind.DRAT)
    m1, m2, f = cfg.m1_count, cfg.m2_count, cfg.fading
    k = m1 * m2
    pts = pt_dbm or run.grids.pt_dbm or (0.0, 10.0, 20.0, 30.0)
    checks = []

    mu, var = nakagami_moments(f)
    err = abs(mu * mu + var - f.omega)
    checks.append(_check("nakagami_second_moment", "analytic", err, 1e-12 * f.omega, err <= 1e-12 * f.omega))
    gr2 = gamma_ratio(f.m) ** 2
    checks.append(_check("gamma_ratio_below_sqrt_m", "analytic", gr2 / f.m, 1.0, gr2 < f.m))

    g = analysis.gaussian_approx(m1, m2, f)
    up_err = lo_err = order_slack = 0.0
    for pt in pts:
        b = analysis.link_budget(cfg.with_pt_dbm(pt))
        up, lo = analysis.se_upper(b, g), analysis.se_lower(b, g)
        up_err = max(up_err, abs(up - analysis.se_upper_expanded(b, m1, m2, f)))
        lo_err = max(lo_err, abs(lo - analysis.se_lower_expanded(b, m1, m2, f)))
        ase = analysis.se_approx_large_m(b, m1, m2, f)
        order_slack = max(order_slack, lo - ase, ase - up)
    checks.append(_check("se_upper_form_equivalence", "analytic", up_err, 1e-12, up_err <= 1e-12))
    checks.append(_check("se_lower_form_equivalence", "analytic", lo_err, 1e-12, lo_err <= 1e-12))
    if k >= 4:
        checks.append(_check("ase_within_bounds", "analytic", order_slack, 0.0, order_slack <= 1e-12))

    pm = cfg.power
    expected = (1 + pm.xi) * pm.p_t + pm.p_v_circuit + pm.p_bs_circuit + (m1 + m2) * pm.p_ris_element
    got = analysis.total_power(pm, cfg.total_elements)
    checks.append(_check("ee_denominator", "analytic", abs(got - expected), 1e-12, abs(got - expected) <= 1e-12))

    mc_names = ("mc_mean", "mc_variance", "bound_sandwich", "outage_agreement", "clt_normality")
    if mc.trials <= 0:
        checks.extend(_skipped(name) for name in mc_names)
    else:
        seed = batch_seed(mc.seed, ScenarioKind.DRAT, m1, m2, m1 + m2)
        batch = montecarlo.sample_cascade(m1, m2, f, mc.trials, seed, allow_large=mc.allow_large, workers=mc.workers)
        a = batch.samples
        n = batch.trials
        s_mean = float(a.mean())
        s_var = float(a.var(ddof=1))
        m4 = float(((a - s_mean) ** 4).mean())
        se_mean = math.sqrt(s_var / n)
        se_var = math.sqrt(max(m4 - s_var**2, 0.0) / n)
        checks.append(_check("mc_mean", "mc", abs(s_mean - g.mu_a), 4 * se_mean, abs(s_mean - g.mu_a) <= 4 * se_mean))
        checks.append(_check("mc_variance", "mc", abs(s_var - g.var_a), 4 * se_var, abs(s_var - g.var_a) <= 4 * se_var))

        worst, worst_tol, ok = 0.0, 0.0, True
        for pt in pts:
            b = analysis.link_budget(cfg.with_pt_dbm(pt))
            se, e = montecarlo.empirical_se(batch, b)
            excess = max(analysis.se_lower(b, g) - se, se - analysis.se_upper(b, g))
            if excess > worst:
                worst, worst_tol = excess, 3 * e
            ok &= excess <= 3 * e + 1e-12
        checks.append(_check("bound_sandwich", "mc", worst, worst_tol, ok,
                             "max excess of MC SE outside [se_lower, se_upper], tolerance 3 SE"))

        # CLT allowance: the measured KS distance bounds how far the true CDF of
        # A sits from any Gaussian, so implementation errors stand out beyond it
        ks = montecarlo.normality_diagnostic(batch)
        budget_db = 10 * math.log10(analysis.composite_gain(cfg))
        within = strict = total = 0
        for r in run.grids.r_th:
            for pt in _outage_pt_cells(cfg, g, budget_db, r, np.linspace(-2.2, 2.2, 15)):
                b = analysis.link_budget(cfg.with_pt_dbm(pt))
                p_a = analysis.outage_probability(b, g, r)
                if not 0.01 <= p_a <= 0.99:
                    continue
                p_mc, _ = montecarlo.empirical_outage(batch, b, r)
                se = math.sqrt(p_a * (1 - p_a) / n)
                total += 1
                within += abs(p_mc - p_a) <= 3 * se + ks
                strict += abs(p_mc - p_a) <= 3 * se
        frac = within / total if total else 0.0
        checks.append(_check(
            "outage_agreement", "mc", frac, 0.95, total > 0 and frac >= 0.95,
            f"{within}/{total} cells within 3 binomial SE + KS {ks:.2g}; {strict}/{total} within 3 SE alone",
        ))

        if n >= 10**5:
            checks.append(_check("clt_normality", "mc", ks, 0.02, ks < 0.02, "KS distance to N(0,1)"))
        else:
            checks.append(_skipped("clt_normality", "needs at least 1e5 trials"))

    return {
        "scenario": {"m1": m1, "m2": m2, "m": f.m, "omega": f.omega, "trials": mc.trials, "seed": mc.seed},
        "checks": checks,
        "passed": all(c["verdict"] != "fail" for c in checks),
    }
