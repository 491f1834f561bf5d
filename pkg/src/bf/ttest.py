"""
Informed t-test Bayes factor.

BF01 compares the central t density of the observed t statistic with its
marginal density under a truncated location-scale t prior on the standardized
mean difference, where the statistic given the effect is noncentral t with
noncentrality ``theta * sqrt(n_eff)``.
"""

import enum
import logging
import math
from typing import Optional

import numpy as np
from scipy import stats

from src.bf.factors import BayesFactor
from src.errors import DomainError, IntegrationError
from src.model.priors import TruncatedTPrior
from src.numerics import integrate, integrate_vec, nct_log_density, t_log_density

logger = logging.getLogger(__name__)


class TTestKind(enum.Enum):
    ONE_SAMPLE = "one-sample"
    TWO_SAMPLE = "two-sample"
    PAIRED = "paired"


def t_design(n: float, kind: TTestKind = TTestKind.TWO_SAMPLE, n2: Optional[float] = None) -> tuple[float, float]:
    """
    Effective sample size and degrees of freedom.

    ``n`` is the size of the first (or only) group, or the number of pairs.
    A two-sample design without ``n2`` is balanced.
    """
    if not n > 0.0:
        raise DomainError(f"n must be positive, got {n!r}")
    if kind is TTestKind.TWO_SAMPLE:
        n2 = n if n2 is None else n2
        if not n2 > 0.0:
            raise DomainError(f"n2 must be positive, got {n2!r}")
        n_eff = 1.0 / (1.0 / n + 1.0 / n2)
        df = n + n2 - 2.0
    else:
        if n2 is not None:
            raise ValueError(f"n2 only applies to two-sample designs, not {kind.value}")
        n_eff = float(n)
        df = n - 1.0
    if not df > 0.0:
        raise DomainError(f"Design leaves {df!r} degrees of freedom")
    return n_eff, df


def _log_prior(theta, prior: TruncatedTPrior):
    return t_log_density(theta, prior.df, prior.location, prior.scale, prior.lower, prior.upper)


def _clip(x, prior: TruncatedTPrior):
    return np.clip(x, prior.lower, prior.upper)


def log_tbf01_at(t: float, n_eff: float, df: float, prior: TruncatedTPrior, rel_tol: float = 1e-8) -> float:
    """log BF01 at a single t statistic, integrating over the full prior support."""
    root_n = math.sqrt(n_eff)
    peak = t / root_n
    width = math.sqrt(1.0 + t * t / (2.0 * df)) / root_n

    def log_integrand(theta: float) -> float:
        return float(nct_log_density(t, df, theta * root_n)) + float(_log_prior(theta, prior))

    ref = max(log_integrand(float(_clip(peak, prior))), log_integrand(float(_clip(prior.location, prior))))
    if not math.isfinite(ref):
        ref = 0.0

    def integrand(theta: float) -> float:
        if abs(theta) * root_n > 1e6:
            return 0.0
        with np.errstate(all="ignore"):
            value = float(np.exp(log_integrand(theta) - ref))
        return value if math.isfinite(value) else 0.0

    points = [prior.location + j * prior.scale for j in (-12.0, 0.0, 12.0)]
    points += [peak + j * width for j in (-8.0, -3.0, 0.0, 3.0, 8.0)]
    marginal = integrate(integrand, prior.lower, prior.upper, rel_tol=rel_tol, breakpoints=points)
    if not marginal > 0.0:
        raise IntegrationError(f"Marginal likelihood vanished at t = {t!r}", marginal, 0.0)

    return float(stats.t.logpdf(t, df)) - (ref + math.log(marginal))


def log_tbf01_values(t_values, n_eff: float, df: float, prior: TruncatedTPrior, rel_tol: float = 1e-6) -> np.ndarray:
    """
    log BF01 for many t statistics in one vector quadrature.

    The prior support is cut to a window holding the prior bulk and every
    likelihood peak, which is where all non-negligible mass lies.
    """
    t_values = np.atleast_1d(np.asarray(t_values, dtype=float))
    root_n = math.sqrt(n_eff)
    peaks = t_values / root_n
    width = float(np.sqrt(1.0 + np.max(t_values ** 2) / (2.0 * df))) / root_n

    lo = max(prior.lower, min(prior.location - 40.0 * prior.scale, peaks.min() - 40.0 * width))
    hi = min(prior.upper, max(prior.location + 40.0 * prior.scale, peaks.max() + 40.0 * width))

    # per-statistic shift so every component is of order one
    at_peak = nct_log_density(t_values, df, _clip(peaks, prior) * root_n) + _log_prior(_clip(peaks, prior), prior)
    loc = float(_clip(prior.location, prior))
    at_loc = nct_log_density(t_values, df, loc * root_n) + _log_prior(loc, prior)
    ref = np.maximum(at_peak, at_loc)
    ref = np.where(np.isfinite(ref), ref, 0.0)

    def integrand(theta: float) -> np.ndarray:
        with np.errstate(all="ignore"):
            values = np.exp(nct_log_density(t_values, df, theta * root_n) + _log_prior(theta, prior) - ref)
        return np.where(np.isfinite(values), values, 0.0)

    points = [prior.location + j * prior.scale for j in (-12.0, -4.0, -2.0, 0.0, 2.0, 4.0, 12.0)]
    points += list(np.linspace(peaks.min() - 8.0 * width, peaks.max() + 8.0 * width, 17))
    marginal = integrate_vec(integrand, lo, hi, rel_tol=rel_tol, breakpoints=points)
    if not np.all(marginal > 0.0):
        raise IntegrationError("Marginal likelihood vanished on part of the t grid",
                               float(np.min(marginal)), 0.0)

    return stats.t.logpdf(t_values, df) - (ref + np.log(marginal))


def tbf01(
    t: float,
    n1: float,
    prior: TruncatedTPrior,
    n2: Optional[float] = None,
    paired: bool = False,
    rel_tol: float = 1e-8,
) -> BayesFactor:
    """
    BF01 for an observed t statistic.

    ``n2`` given means a two-sample test with groups ``n1`` and ``n2``;
    ``paired`` treats ``n1`` as the number of pairs; otherwise one-sample.
    """
    if not isinstance(prior, TruncatedTPrior):
        raise ValueError(f"tbf01 needs a truncated t prior, got {type(prior).__name__}")
    if paired and n2 is not None:
        raise ValueError("A paired design takes the number of pairs only")
    if n2 is not None:
        kind = TTestKind.TWO_SAMPLE
    else:
        kind = TTestKind.PAIRED if paired else TTestKind.ONE_SAMPLE
    n_eff, df = t_design(n1, kind, n2)
    log_value = log_tbf01_at(float(t), n_eff, df, prior, rel_tol)
    logger.debug(f"tbf01(t={t!r}, n_eff={n_eff!r}, df={df!r}) = exp({log_value!r})")
    return BayesFactor(log_value)
