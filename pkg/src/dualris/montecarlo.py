"""Seeded trial engine for the true double-sum cascaded gain.

Every batch is split into fixed-size shards. Shard ``k`` draws from its own
PCG64 stream seeded by ``SeedSequence(seed, spawn_key=(k,))``, so a batch is
reproducible bit-for-bit regardless of how many worker threads produced it,
and a shorter batch is a prefix of a longer one with the same seed.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .channel import FadingParams, sample_nakagami

__all__ = [
    "GENERATOR",
    "MAX_ELEMENT_DRAWS",
    "BudgetError",
    "TrialBatch",
    "RunningStats",
    "sample_cascade",
    "rate_threshold_amplitude",
    "empirical_outage",
    "empirical_se",
    "normality_diagnostic",
]

GENERATOR = "numpy.PCG64/SeedSequence"
MAX_ELEMENT_DRAWS = 10**10
# amplitudes generated per shard; fixes the shard layout for a given M1*M2
_SHARD_ELEMENTS = 1 << 22


class BudgetError(ValueError):
    """Raised when trials * M1 * M2 exceeds the element-draw guardrail."""


@dataclass(frozen=True)
class TrialBatch:
    samples: np.ndarray
    trials: int
    seed: int
    config_digest: str
    m1: int = 1
    m2: int = 1
    generator: str = GENERATOR

    def __post_init__(self):
        if len(self.samples) != self.trials:
            raise ValueError("samples length must equal trials")


def config_digest(m1, m2, f):
    key = f"cascade:m1={m1}:m2={m2}:m={f.m!r}:omega={f.omega!r}"
    return hashlib.sha256(key.encode()).hexdigest()[:16]


def _shard_rng(seed, k):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(k,))))


def sample_cascade(m1, m2, f: FadingParams, trials, seed, *, allow_large=False, workers=1):
    """Draw ``trials`` realisations of A = sum_ij delta_ij over M1*M2 i.i.d. amplitudes.

    Cost is O(trials * M1 * M2). Above ``MAX_ELEMENT_DRAWS`` total draws the
    call is refused unless ``allow_large`` is set.
    """
    m1, m2, trials, seed = int(m1), int(m2), int(trials), int(seed)
    if m1 < 1 or m2 < 1:
        raise ValueError("element counts must be >= 1")
    if trials < 1:
        raise ValueError("trials must be >= 1")
    k = m1 * m2
    if trials * k > MAX_ELEMENT_DRAWS and not allow_large:
        raise BudgetError(
            f"{trials} trials x {k} elements = {trials * k:.3g} draws exceeds "
            f"{MAX_ELEMENT_DRAWS:.0e}; pass allow_large=True to override"
        )
    shard_trials = max(1, _SHARD_ELEMENTS // k)
    n_shards = math.ceil(trials / shard_trials)

    def run(s):
        n = min(shard_trials, trials - s * shard_trials)
        amp = sample_nakagami(f, _shard_rng(seed, s), size=(n, k))
        return amp.sum(axis=1)

    if workers > 1 and n_shards > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, range(n_shards)))
    else:
        parts = [run(s) for s in range(n_shards)]
    return TrialBatch(
        samples=np.concatenate(parts),
        trials=trials,
        seed=seed,
        config_digest=config_digest(m1, m2, f),
        m1=m1,
        m2=m2,
    )


class RunningStats:
    """Single-pass mean/variance, merged chunk by chunk (Chan et al. update)."""

    def __init__(self):
        self.n = 0
        self.mean = 0.0
        self._m2 = 0.0

    def update(self, chunk):
        chunk = np.asarray(chunk, dtype=float)
        nb = chunk.size
        if nb == 0:
            return self
        mb = float(chunk.mean())
        m2b = float(((chunk - mb) ** 2).sum())
        n = self.n + nb
        delta = mb - self.mean
        self.mean += delta * nb / n
        self._m2 += m2b + delta * delta * self.n * nb / n
        self.n = n
        return self

    @property
    def variance(self):
        return self._m2 / (self.n - 1) if self.n > 1 else 0.0

    @property
    def stderr(self):
        return math.sqrt(self.variance / self.n) if self.n else float("nan")


def rate_threshold_amplitude(budget, r_th):
    """Smallest cascaded amplitude that supports rate ``r_th`` (inf when gamma_bar = 0)."""
    snr_scale = budget.gain_b * budget.gamma_bar
    if snr_scale <= 0:
        return math.inf
    return math.sqrt((2.0**r_th - 1.0) / snr_scale)


def empirical_outage(batch, budget, r_th):
    """Fraction of trials with A below the rate threshold, and its binomial standard error."""
    y = rate_threshold_amplitude(budget, r_th)
    p = float(np.count_nonzero(batch.samples < y)) / batch.trials
    return p, math.sqrt(p * (1.0 - p) / batch.trials)


def empirical_se(batch, budget, chunk=1 << 18):
    """Mean of log2(1 + A^2 B gamma_bar) over the batch, with its standard error."""
    snr_scale = budget.gain_b * budget.gamma_bar
    acc = RunningStats()
    a = batch.samples
    for start in range(0, a.size, chunk):
        part = a[start : start + chunk]
        acc.update(np.log2(1.0 + snr_scale * part * part))
    return acc.mean, acc.stderr


def normality_diagnostic(batch):
    """Kolmogorov-Smirnov distance of the standardised samples from N(0, 1).

    Accepts a ``TrialBatch`` or a plain array.
    """
    x = np.asarray(getattr(batch, "samples", batch), dtype=float)
    z = (x - x.mean()) / x.std(ddof=1)
    return float(stats.kstest(z, "norm").statistic)
