"""TOML run configuration with flat dotted keys.

Example::

    scenario.kind = "DRAT"
    geometry.d_rr_m = 200
    fading.m = 10
    power.pt_dbm = 30
    sweep.pt_dbm = [-10, 30, 5]     # start, stop (inclusive), step
    sweep.elements = [10, 20, 50]
    mc.trials = 100000
    mc.seed = 7

Nested tables (``[power]`` ...) are equivalent. Absent keys take the
evaluation defaults: m = 10, direct-link m = 1, noise -120 dBm, 10 dBm
circuit and per-element powers, xi = 0.2, distances 5 / 100 / 5 m.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .channel import (
    FadingParams,
    Geometry,
    PowerModel,
    ScenarioConfig,
    ScenarioKind,
    dbm_to_watt,
)

__all__ = ["ConfigError", "Grids", "MCSettings", "RunConfig", "load_config", "parse_config", "pt_grid"]


class ConfigError(ValueError):
    """Bad configuration; the message names the offending key path."""

    def __init__(self, key, message):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


@dataclass(frozen=True)
class Grids:
    pt_dbm: tuple | None = None
    elements: tuple | None = None
    r_th: tuple = (5.0, 7.5, 10.0)


@dataclass(frozen=True)
class MCSettings:
    trials: int = 10_000
    seed: int = 20220501
    # points whose trials * elements exceed this run with fewer trials (or none)
    max_draws_per_point: int = 10**8
    min_trials: int = 100
    allow_large: bool = False
    workers: int = 1


@dataclass(frozen=True)
class RunConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    grids: Grids = field(default_factory=Grids)
    mc: MCSettings = field(default_factory=MCSettings)


def _num(key, v, *, lo=None, lo_open=False, integer=False):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(key, f"expected a number, got {v!r}")
    if integer and int(v) != v:
        raise ConfigError(key, f"expected an integer, got {v!r}")
    if not math.isfinite(v):
        raise ConfigError(key, f"must be finite, got {v!r}")
    if lo is not None and (v <= lo if lo_open else v < lo):
        raise ConfigError(key, f"out of range: must be {'>' if lo_open else '>='} {lo}, got {v!r}")
    return int(v) if integer else float(v)


def _num_list(key, v, **kw):
    if not isinstance(v, list) or not v:
        raise ConfigError(key, f"expected a non-empty list, got {v!r}")
    return tuple(_num(f"{key}[{i}]", x, **kw) for i, x in enumerate(v))


def pt_grid(start, stop, step):
    """Inclusive arithmetic grid, rounded to 1e-9 dB to keep output stable."""
    if step <= 0:
        raise ValueError("step must be > 0")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 9) for i in range(max(n, 0)))


def _parse_pt_sweep(key, v):
    vals = _num_list(key, v)
    if len(vals) != 3:
        raise ConfigError(key, "expected [start, stop, step]")
    start, stop, step = vals
    if step <= 0:
        raise ConfigError(key, f"step must be > 0, got {step}")
    if stop < start:
        raise ConfigError(key, "stop must be >= start")
    return pt_grid(start, stop, step)


def _flatten(tree, prefix=""):
    out = {}
    for k, v in tree.items():
        path = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(_flatten(v, path + "."))
        else:
            out[path] = v
    return out


# key -> (section, field, validator kwargs)
_SCALARS = {
    "scenario.m1": dict(lo=1, integer=True),
    "scenario.m2": dict(lo=1, integer=True),
    "scenario.n": dict(lo=1, integer=True),
    "geometry.d1_m": dict(lo=0, lo_open=True),
    "geometry.d_rr_m": dict(lo=0, lo_open=True),
    "geometry.d2_m": dict(lo=0, lo_open=True),
    "fading.m": dict(lo=0.5),
    "fading.omega": dict(lo=0, lo_open=True),
    "fading.m_direct": dict(lo=0.5),
    "fading.omega_direct": dict(lo=0, lo_open=True),
    "power.pt_dbm": dict(),
    "power.noise_dbm": dict(),
    "power.xi": dict(lo=0),
    "power.p_v_dbm": dict(),
    "power.p_bs_dbm": dict(),
    "power.p_ris_dbm": dict(),
    "mc.trials": dict(lo=0, integer=True),
    "mc.seed": dict(lo=0, integer=True),
    "mc.max_draws_per_point": dict(lo=1, integer=True),
    "mc.min_trials": dict(lo=1, integer=True),
    "mc.workers": dict(lo=1, integer=True),
}
_OTHER = {"scenario.kind", "sweep.pt_dbm", "sweep.elements", "sweep.r_th", "mc.allow_large"}


def parse_config(tree):
    """Validate a parsed key tree and build a :class:`RunConfig`."""
    flat = _flatten(tree)
    for key in flat:
        if key not in _SCALARS and key not in _OTHER:
            raise ConfigError(key, "unknown key")
    v = {k: _num(k, flat[k], **kw) for k, kw in _SCALARS.items() if k in flat}

    kind = flat.get("scenario.kind", "DRAT")
    try:
        kind = ScenarioKind(str(kind).upper())
    except ValueError:
        raise ConfigError("scenario.kind", f"must be one of DRAT, SRAT, DCT, got {kind!r}") from None

    m1 = v.get("scenario.m1", 10)
    m2 = v.get("scenario.m2", 10)
    geometry = Geometry(
        d1=v.get("geometry.d1_m", 5.0),
        d_rr=v.get("geometry.d_rr_m", 100.0),
        d2=v.get("geometry.d2_m", 5.0),
    )
    fading = FadingParams(m=v.get("fading.m", 10.0), omega=v.get("fading.omega", 1.0))
    direct = FadingParams(m=v.get("fading.m_direct", 1.0), omega=v.get("fading.omega_direct", 1.0))
    power = PowerModel(
        p_t=dbm_to_watt(v.get("power.pt_dbm", 30.0)),
        xi=v.get("power.xi", 0.2),
        p_v_circuit=dbm_to_watt(v.get("power.p_v_dbm", 10.0)),
        p_bs_circuit=dbm_to_watt(v.get("power.p_bs_dbm", 10.0)),
        p_ris_element=dbm_to_watt(v.get("power.p_ris_dbm", 10.0)),
    )
    scenario = ScenarioConfig(
        kind=kind,
        geometry=geometry,
        m1_count=m1,
        m2_count=m2,
        n_count=v.get("scenario.n", m1 + m2),
        fading=fading,
        direct_fading=direct,
        power=power,
        noise_dbm=v.get("power.noise_dbm", -120.0),
    )

    grids = Grids(
        pt_dbm=_parse_pt_sweep("sweep.pt_dbm", flat["sweep.pt_dbm"]) if "sweep.pt_dbm" in flat else None,
        elements=_num_list("sweep.elements", flat["sweep.elements"], lo=1, integer=True)
        if "sweep.elements" in flat
        else None,
        r_th=_num_list("sweep.r_th", flat["sweep.r_th"], lo=0, lo_open=True)
        if "sweep.r_th" in flat
        else Grids.r_th,
    )

    allow_large = flat.get("mc.allow_large", False)
    if not isinstance(allow_large, bool):
        raise ConfigError("mc.allow_large", f"expected true/false, got {allow_large!r}")
    defaults = MCSettings()
    mc = MCSettings(
        trials=v.get("mc.trials", defaults.trials),
        seed=v.get("mc.seed", defaults.seed),
        max_draws_per_point=v.get("mc.max_draws_per_point", defaults.max_draws_per_point),
        min_trials=v.get("mc.min_trials", defaults.min_trials),
        allow_large=allow_large,
        workers=v.get("mc.workers", defaults.workers),
    )
    return RunConfig(scenario=scenario, grids=grids, mc=mc)


def load_config(path):
    """Read and validate a TOML config file; an empty file gives all defaults."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            tree = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("", f"{path}: not valid TOML ({exc})") from None
    return parse_config(tree)
