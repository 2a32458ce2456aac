"""Special functions shared by the closed-form expressions."""

import math

import numpy as np
from scipy import special

__all__ = ["q_function", "gamma_ratio", "exp_e1"]


def q_function(x):
    """Gaussian tail probability Q(x) = P[Z > x] for standard normal Z.

    Evaluated as 0.5 * erfc(x / sqrt(2)), which keeps full relative accuracy
    in the upper tail. Accepts scalars or arrays; non-finite input raises.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"q_function needs finite input, got {x!r}")
    out = 0.5 * special.erfc(arr / math.sqrt(2.0))
    return float(out) if out.ndim == 0 else out


def gamma_ratio(m):
    """Gamma(m + 1/2) / Gamma(m) via log-gamma differences (no overflow for large m)."""
    m = float(m)
    if not m > 0 or not math.isfinite(m):
        raise ValueError(f"gamma_ratio needs m > 0, got {m}")
    return math.exp(special.gammaln(m + 0.5) - special.gammaln(m))


def exp_e1(x):
    """exp(x) * E1(x) for x > 0, stable for large x.

    Direct product below x = 500; above that the asymptotic series
    sum_k (-1)^k k! / x^(k+1) is used, truncated well before divergence.
    """
    x = float(x)
    if not x > 0:
        raise ValueError(f"exp_e1 needs x > 0, got {x}")
    if x < 500.0:
        return math.exp(x) * special.exp1(x)
    total, term = 0.0, 1.0 / x
    for k in range(1, 20):
        total += term
        term *= -k / x
    return total
