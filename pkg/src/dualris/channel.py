"""Pathloss, Nakagami-m element statistics and scenario geometry."""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .numerics import gamma_ratio

__all__ = [
    "ScenarioKind",
    "FadingParams",
    "Geometry",
    "PowerModel",
    "ScenarioConfig",
    "dbm_to_watt",
    "watt_to_dbm",
    "db_to_linear",
    "pathloss_db",
    "composite_gain_db",
    "composite_gain",
    "nakagami_moments",
    "sample_nakagami",
]

# 3 GHz pathloss constants (intercept dB, slope dB/decade)
_LOS = (-37.5, 22.0)
_NLOS = (-35.1, 36.7)


class ScenarioKind(str, enum.Enum):
    DRAT = "DRAT"  # V -> RIS-1 -> RIS-2 -> BS
    SRAT = "SRAT"  # V -> single RIS near BS -> BS
    DCT = "DCT"  # direct NLOS link


def dbm_to_watt(p_dbm):
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watt_to_dbm(p_w):
    return 10.0 * math.log10(p_w) + 30.0


def db_to_linear(x_db):
    return 10.0 ** (x_db / 10.0)


@dataclass(frozen=True)
class FadingParams:
    """Nakagami-m shape ``m`` and spread ``omega`` (= E[amplitude^2])."""

    m: float = 10.0
    omega: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.m) and self.m >= 0.5):
            raise ValueError(f"Nakagami shape m must be >= 0.5, got {self.m}")
        if not (math.isfinite(self.omega) and self.omega > 0):
            raise ValueError(f"Nakagami spread omega must be > 0, got {self.omega}")


@dataclass(frozen=True)
class Geometry:
    """Segment lengths in meters: vehicle->RIS-1, RIS-1->RIS-2, RIS-2->BS."""

    d1: float = 5.0
    d_rr: float = 100.0
    d2: float = 5.0

    def __post_init__(self):
        for name in ("d1", "d_rr", "d2"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"geometry.{name} must be > 0 m, got {v}")


@dataclass(frozen=True)
class PowerModel:
    """Power terms of the energy-efficiency denominator, all in watts.

    ``xi`` is the HPA overhead so the amplifier draws (1 + xi) * p_t.
    """

    p_t: float = 1.0
    xi: float = 0.2
    p_v_circuit: float = 0.01
    p_bs_circuit: float = 0.01
    p_ris_element: float = 0.01

    def __post_init__(self):
        for name in ("p_t", "p_v_circuit", "p_bs_circuit", "p_ris_element"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"power.{name} must be > 0 W, got {v}")
        if not (math.isfinite(self.xi) and self.xi >= 0):
            raise ValueError(f"power.xi must be >= 0, got {self.xi}")

    @property
    def pt_dbm(self):
        return watt_to_dbm(self.p_t)

    def with_pt_dbm(self, pt_dbm):
        return dataclasses.replace(self, p_t=dbm_to_watt(pt_dbm))


@dataclass(frozen=True)
class ScenarioConfig:
    """One link scenario. Defaults reproduce the evaluation setup (M = 10, N = 2M)."""

    kind: ScenarioKind = ScenarioKind.DRAT
    geometry: Geometry = field(default_factory=Geometry)
    m1_count: int = 10
    m2_count: int = 10
    n_count: int = 20
    fading: FadingParams = field(default_factory=FadingParams)
    direct_fading: FadingParams = field(default_factory=lambda: FadingParams(m=1.0, omega=1.0))
    power: PowerModel = field(default_factory=PowerModel)
    noise_dbm: float = -120.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ScenarioKind(self.kind))
        for name in ("m1_count", "m2_count", "n_count"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {v}")
            object.__setattr__(self, name, int(v))
        if not math.isfinite(self.noise_dbm):
            raise ValueError(f"noise_dbm must be finite, got {self.noise_dbm}")

    @property
    def noise_power(self):
        return dbm_to_watt(self.noise_dbm)

    @property
    def gamma_bar(self):
        """Transmit SNR P_t / sigma^2 (linear)."""
        return self.power.p_t / self.noise_power

    @property
    def total_elements(self):
        if self.kind is ScenarioKind.DRAT:
            return self.m1_count + self.m2_count
        if self.kind is ScenarioKind.SRAT:
            return self.n_count
        return 0

    def as_kind(self, kind):
        """Same link budget under another scenario; SRAT gets N = M1 + M2."""
        kind = ScenarioKind(kind)
        return dataclasses.replace(self, kind=kind, n_count=self.m1_count + self.m2_count)

    def with_elements(self, m):
        """Symmetric split M1 = M2 = m, N = 2m."""
        return dataclasses.replace(self, m1_count=m, m2_count=m, n_count=2 * m)

    def with_pt_dbm(self, pt_dbm):
        return dataclasses.replace(self, power=self.power.with_pt_dbm(pt_dbm))


def pathloss_db(d, los=True):
    """Distance-dependent pathloss in dB at 3 GHz (negative beyond ~1 m)."""
    d = float(d)
    if not (math.isfinite(d) and d > 0):
        raise ValueError(f"distance must be > 0 m, got {d}")
    intercept, slope = _LOS if los else _NLOS
    return intercept - slope * math.log10(d)


def composite_gain_db(config):
    g = config.geometry
    if config.kind is ScenarioKind.DRAT:
        # every hop LOS; the RIS pair multiplies the three segment losses
        return pathloss_db(g.d1) + pathloss_db(g.d_rr) + pathloss_db(g.d2)
    if config.kind is ScenarioKind.SRAT:
        # single RIS adjacent to the BS: long faded hop, short LOS hop
        return pathloss_db(g.d1 + g.d_rr) + pathloss_db(g.d2)
    return pathloss_db(g.d1 + g.d_rr + g.d2, los=False)


def composite_gain(config):
    """End-to-end linear power gain B for the configured scenario."""
    return db_to_linear(composite_gain_db(config))


def nakagami_moments(f):
    """Mean and variance of one Nakagami-m amplitude.

    The variance is written as omega - mean^2 so that mean^2 + var == omega
    holds to rounding.
    """
    mean = gamma_ratio(f.m) * math.sqrt(f.omega / f.m)
    return mean, f.omega - mean * mean


def sample_nakagami(f, rng, size=None):
    """Draw Nakagami-m amplitudes as sqrt(Gamma(shape=m, scale=omega/m)).

    ``rng`` is a ``numpy.random.Generator`` and is the only state touched.
    """
    return np.sqrt(rng.standard_gamma(f.m, size=size) * (f.omega / f.m))
