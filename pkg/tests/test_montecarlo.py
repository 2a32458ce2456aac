import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from dualris import montecarlo
from dualris.analysis import LinkBudget, gaussian_approx, link_budget, outage_probability, se_lower, se_upper
from dualris.channel import FadingParams, ScenarioConfig, nakagami_moments
from dualris.montecarlo import (
    BudgetError,
    RunningStats,
    empirical_outage,
    empirical_se,
    normality_diagnostic,
    sample_cascade,
)

F10 = FadingParams(10.0, 1.0)


@pytest.fixture(scope="module")
def batch10():
    return sample_cascade(10, 10, F10, 10**6, seed=2024)


def test_single_element_mean():
    f = FadingParams(1.5, 2.0)
    b = sample_cascade(1, 1, f, 10**6, seed=1)
    mu, var = nakagami_moments(f)
    assert abs(b.samples.mean() - mu) < 4 * math.sqrt(var / b.trials)


def test_cascade_moments_m10(batch10):
    a = batch10.samples
    assert a.mean() == pytest.approx(98.76, abs=0.02)
    assert a.var(ddof=1) == pytest.approx(2.46, abs=0.05)
    assert np.all(a > 0)
    assert batch10.trials == a.size == 10**6


def test_batch_metadata(batch10):
    assert batch10.seed == 2024
    assert batch10.generator == montecarlo.GENERATOR
    assert batch10.config_digest == montecarlo.config_digest(10, 10, F10)
    assert batch10.config_digest != montecarlo.config_digest(10, 11, F10)


def test_determinism_and_prefix():
    a = sample_cascade(7, 9, F10, 50_000, seed=5)
    b = sample_cascade(7, 9, F10, 50_000, seed=5)
    c = sample_cascade(7, 9, F10, 120_000, seed=5)
    d = sample_cascade(7, 9, F10, 50_000, seed=6)
    assert np.array_equal(a.samples, b.samples)
    assert np.array_equal(a.samples, c.samples[:50_000])
    assert not np.array_equal(a.samples, d.samples)


def test_worker_count_does_not_change_batch():
    one = sample_cascade(30, 30, F10, 20_000, seed=3, workers=1)
    many = sample_cascade(30, 30, F10, 20_000, seed=3, workers=3)
    assert np.array_equal(one.samples, many.samples)


def test_budget_guardrail():
    with pytest.raises(BudgetError):
        sample_cascade(1000, 1000, F10, 10**4 + 1, seed=1)
    with pytest.raises(ValueError):
        sample_cascade(1, 1, F10, 0, seed=1)


@pytest.mark.parametrize("trials", [10**4, 10**5, 10**6])
def test_unbiased_at_sqrt_n_rate(trials):
    g = gaussian_approx(4, 5, F10)
    a = sample_cascade(4, 5, F10, trials, seed=trials).samples
    assert abs(a.mean() - g.mu_a) <= 4 * g.sigma_a / math.sqrt(trials)
    assert abs((a * a).mean() - g.second_moment) <= 4 * a.var() ** 0.5 * 2 * g.mu_a / math.sqrt(trials)


def test_fourth_order_scaling_law():
    ms = np.array([5, 10, 20, 40])
    power = [np.mean(sample_cascade(m, m, F10, 2000, seed=int(m)).samples ** 2) for m in ms]
    slope = np.polyfit(np.log(ms), np.log(power), 1)[0]
    assert 3.8 <= slope <= 4.2


def test_outage_extremes(batch10):
    b = LinkBudget(gain_b=1.88e-19, gamma_bar=1e15)
    assert empirical_outage(batch10, b, 1e-12) == (0.0, 0.0)
    assert empirical_outage(batch10, LinkBudget(1e-19, 0.0), 5.0) == (1.0, 0.0)
    assert empirical_outage(batch10, LinkBudget(1e-19, 1e-300), 5.0)[0] == 1.0


def _pt_for_quantile(g, z, r_th, cfg):
    y = g.mu_a + z * g.sigma_a
    gain_db = 10 * math.log10(link_budget(cfg).gain_b)
    return 10 * math.log10((2**r_th - 1) / y**2) - gain_db + cfg.noise_dbm


def test_outage_mid_range_matches_closed_form():
    # M = 20: skewness of the true sum is already below binomial resolution at 1e6
    g = gaussian_approx(20, 20, F10)
    batch = sample_cascade(20, 20, F10, 10**6, seed=77)
    cfg = ScenarioConfig().with_elements(20)
    for z in (-1.0, 0.0, 1.0):
        b = link_budget(cfg.with_pt_dbm(_pt_for_quantile(g, z, 7.5, cfg)))
        p_a = outage_probability(b, g, 7.5)
        p_mc, se = empirical_outage(batch, b, 7.5)
        assert abs(p_mc - p_a) <= 3 * math.sqrt(p_a * (1 - p_a) / batch.trials)
        assert se == pytest.approx(math.sqrt(p_mc * (1 - p_mc) / batch.trials))


def _nakagami_skewness(f):
    mu, var = nakagami_moments(f)
    e3 = math.exp(special.gammaln(f.m + 1.5) - special.gammaln(f.m)) * (f.omega / f.m) ** 1.5
    return (e3 - 3 * mu * f.omega + 2 * mu**3) / var**1.5


@pytest.mark.parametrize("m", [5, 10])
def test_small_m_outage_gap_is_the_skewness_term(m):
    """At M <= 10 the MC outage departs from the Gaussian CDF by the first Edgeworth term.

    Adding the skewness correction to the Gaussian CDF restores agreement
    within 3 binomial SE, so the departure is a property of the CLT closed
    form, not of the sampler.
    """
    g = gaussian_approx(m, m, F10)
    a = sample_cascade(m, m, F10, 10**6, seed=404).samples
    z = np.linspace(-2.33, 2.33, 31)
    y = g.mu_a + z * g.sigma_a
    emp = np.searchsorted(np.sort(a), y) / a.size
    gauss = stats.norm.cdf(z)
    skew = _nakagami_skewness(F10) / m  # skew of a sum of m*m i.i.d. terms
    edgeworth = gauss - stats.norm.pdf(z) * skew / 6 * (z * z - 1)
    se = np.sqrt(edgeworth * (1 - edgeworth) / a.size)
    assert np.mean(np.abs(emp - edgeworth) <= 3 * se) >= 0.95
    assert np.max(np.abs(emp - gauss) / se) > 3


def test_empirical_se_zero_snr(batch10):
    assert empirical_se(batch10, LinkBudget(1e-19, 0.0))[0] == 0.0


@pytest.mark.parametrize("pt", [0, 15, 30])
def test_empirical_se_within_bounds(batch10, pt):
    b = link_budget(ScenarioConfig().with_pt_dbm(pt))
    g = gaussian_approx(10, 10, F10)
    se, err = empirical_se(batch10, b)
    assert se_lower(b, g) - 3 * err <= se <= se_upper(b, g) + 3 * err


def test_empirical_se_reference_point(batch10):
    se, err = empirical_se(batch10, link_budget(ScenarioConfig()))
    assert se == pytest.approx(1.5037, abs=2e-3)


@settings(max_examples=50)
@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=300), st.integers(1, 50))
def test_running_stats_matches_numpy(xs, chunk):
    acc = RunningStats()
    for i in range(0, len(xs), chunk):
        acc.update(xs[i : i + chunk])
    x = np.array(xs)
    assert acc.n == len(xs)
    assert acc.mean == pytest.approx(x.mean(), rel=1e-9, abs=1e-6)
    assert acc.variance == pytest.approx(x.var(ddof=1), rel=1e-7, abs=1e-3)


def test_normality_diagnostic_ordering():
    ks = [normality_diagnostic(sample_cascade(m, m, F10, 2 * 10**5, seed=9)) for m in (2, 20)]
    assert ks[0] > ks[1]


def test_normality_diagnostic_null_calibration():
    n = 10**6
    z = np.random.default_rng(8).normal(3.0, 2.0, size=n)
    assert normality_diagnostic(z) < 1.63 / math.sqrt(n)
