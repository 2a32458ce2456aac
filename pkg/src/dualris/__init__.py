"""Performance evaluation of dual-RIS-assisted V2I uplinks under Nakagami-m fading."""

from .analysis import (
    GaussianApprox,
    LinkBudget,
    cdf_cascade,
    dct_se,
    energy_efficiency,
    gaussian_approx,
    link_budget,
    outage_probability,
    se_approx_large_m,
    se_exact_mc_reference,
    se_lower,
    se_upper,
    srat_stats,
)
from .channel import (
    FadingParams,
    Geometry,
    PowerModel,
    ScenarioConfig,
    ScenarioKind,
    composite_gain,
    nakagami_moments,
    pathloss_db,
    sample_nakagami,
)
from .config import load_config
from .montecarlo import empirical_outage, empirical_se, normality_diagnostic, sample_cascade
from .numerics import gamma_ratio, q_function

__version__ = "0.1.0"
