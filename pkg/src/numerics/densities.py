"""
Truncated location-scale t and noncentral t densities, in log space.
"""

import logging
import math

import numpy as np
from scipy import special, stats

from src.errors import DomainError

logger = logging.getLogger(__name__)

# Below this the truncation interval carries no usable prior mass.
MIN_TRUNCATED_MASS = 1e-300

# scipy's noncentral t overflows in boost for large df; above this df the
# quadrature form is used instead
NCT_SCIPY_MAX_DF = 300.0

# trapezoid nodes in units of the local width of the log-scale integrand
_TRAPEZOID_STEP = 0.25
_TRAPEZOID_NODES = np.arange(-32.0, 24.0 + _TRAPEZOID_STEP / 2, _TRAPEZOID_STEP)


def _check_t_args(df: float, scale: float, lower: float, upper: float) -> None:
    if not df > 0.0:
        raise DomainError(f"t density needs df > 0, got {df!r}")
    if not scale > 0.0:
        raise DomainError(f"t density needs scale > 0, got {scale!r}")
    if not lower < upper:
        raise DomainError(f"t density needs lower < upper, got [{lower!r}, {upper!r}]")


def truncated_t_mass(df: float, loc: float, scale: float,
                     lower: float = -math.inf, upper: float = math.inf) -> float:
    """Probability the untruncated t assigns to ``[lower, upper]``."""
    _check_t_args(df, scale, lower, upper)
    if lower == -math.inf and upper == math.inf:
        return 1.0
    dist = stats.t(df, loc=loc, scale=scale)
    # use whichever tail keeps the difference well conditioned
    if lower > loc:
        return float(dist.sf(lower) - dist.sf(upper))
    return float(dist.cdf(upper) - dist.cdf(lower))


def t_log_density(x, df: float, loc: float, scale: float,
                  lower: float = -math.inf, upper: float = math.inf):
    """Log density of a t(df, loc, scale) truncated to ``[lower, upper]``."""
    mass = truncated_t_mass(df, loc, scale, lower, upper)
    if mass < MIN_TRUNCATED_MASS:
        raise DomainError(
            f"truncation interval [{lower!r}, {upper!r}] carries no mass "
            f"under t(df={df!r}, loc={loc!r}, scale={scale!r})"
        )

    x = np.asarray(x, dtype=float)
    logpdf = stats.t.logpdf(x, df, loc=loc, scale=scale) - math.log(mass)
    inside = (x >= lower) & (x <= upper)
    out = np.where(inside, logpdf, -np.inf)
    if out.ndim == 0:
        return float(out)
    return out


def t_density(x, df: float, loc: float, scale: float,
              lower: float = -math.inf, upper: float = math.inf):
    return np.exp(t_log_density(x, df, loc, scale, lower, upper))


def _nct_log_density_large_df(x: np.ndarray, df: float, ncp: np.ndarray) -> np.ndarray:
    """
    Noncentral t log density from its mixture form f(t) = E[S phi(t S - ncp)],
    S = sqrt(chi2_df / df), integrated over w = log S by the trapezoid rule.

    In w the log integrand is concave with curvature at least df + 1, so a
    window of fixed width around its closed-form mode holds all the mass.
    """
    x, ncp = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(ncp, dtype=float))
    log_const = (math.log(2.0) + 0.5 * df * math.log(0.5 * df) - special.gammaln(0.5 * df)
                 - 0.5 * math.log(2.0 * math.pi))

    def log_integrand(s):
        return (df + 1.0) * np.log(s) - 0.5 * (x * s - ncp) ** 2 - 0.5 * df * s * s

    # positive root of (df + x^2) s^2 - x ncp s - (df + 1) = 0, in the form free of cancellation
    quad_form = df + x * x
    b = x * ncp
    disc = np.sqrt(b * b + 4.0 * (df + 1.0) * quad_form)
    with np.errstate(divide="ignore", invalid="ignore"):
        mode = np.where(b >= 0.0, (b + disc) / (2.0 * quad_form), 2.0 * (df + 1.0) / (disc - b))
    width = 1.0 / np.sqrt(quad_form * mode * mode + df + 1.0)
    peak = log_integrand(mode)

    total = np.zeros_like(peak)
    for u in _TRAPEZOID_NODES:
        with np.errstate(under="ignore"):
            total += np.exp(log_integrand(mode * np.exp(u * width)) - peak)
    return log_const + peak + np.log(total * width * _TRAPEZOID_STEP)


def _nct_log_density_shifted(x: np.ndarray, df: float, ncp: np.ndarray) -> np.ndarray:
    if df > NCT_SCIPY_MAX_DF:
        return _nct_log_density_large_df(x, df, ncp)
    try:
        with np.errstate(all="ignore"):
            values = stats.nct.logpdf(x, df, ncp)
    except (ArithmeticError, RuntimeError) as e:
        logger.debug(f"scipy nct failed at df={df!r} ({e}); using quadrature form")
        return _nct_log_density_large_df(x, df, ncp)
    values = np.asarray(values, dtype=float)
    bad = np.isnan(values) | np.isposinf(values)
    if np.any(bad):
        values = np.where(bad, _nct_log_density_large_df(x, df, ncp), values)
    return values


def nct_log_density(x, df: float, ncp):
    """
    Log density of the noncentral t distribution.

    ``ncp`` may be an array broadcasting against ``x``; entries with zero
    noncentrality use the central t density exactly.
    """
    if not df > 0.0:
        raise DomainError(f"nct density needs df > 0, got {df!r}")
    x = np.asarray(x, dtype=float)
    ncp = np.asarray(ncp, dtype=float)

    central = stats.t.logpdf(x, df)
    if not np.any(ncp != 0.0):
        out = np.broadcast_to(central, np.broadcast(x, ncp).shape)
    else:
        out = np.where(ncp == 0.0, central, _nct_log_density_shifted(x, df, ncp))

    if np.ndim(out) == 0:
        return float(out)
    return np.array(out)


def nct_density(x, df: float, ncp):
    return np.exp(nct_log_density(x, df, ncp))
