"""
Closed-form power functions of the normal-estimate Bayes factors.

Each function returns Pr(BF01 <= k) for evidence for H1 and its complement
Pr(BF01 > k) for evidence for H0, where the estimate follows the design
predictive distribution N(mu_d, tau_d^2 + unit_variance / n).  Normal moment
priors count n per group of two arms and use twice the unit variance.
"""

import logging
import math
from typing import Iterable

from src.errors import DomainError
from src.model.priors import (
    AnalysisPrior,
    DesignPrior,
    NormalMomentPrior,
    NormalPrior,
    Orientation,
    PointPrior,
    TestSpec,
    TruncatedTPrior,
    estimate_unit_variance,
    predictive_sd,
)
from src.numerics import Branch, lambert_w, std_normal_cdf
from src.parallel import map_ordered
from src.power.results import PowerQuery, PowerResult
from src.power.ttest import limit_t, power_t

logger = logging.getLogger(__name__)


def _oriented(prob_le: float, orientation: Orientation) -> float:
    prob_le = min(max(prob_le, 0.0), 1.0)
    return prob_le if orientation is Orientation.EVIDENCE_FOR_H1 else 1.0 - prob_le


def _is_point_null(test: TestSpec, design: DesignPrior) -> bool:
    return design.is_point and design.mean == test.null


def power_limit_point_analysis(test: TestSpec, analysis: PointPrior, design: DesignPrior) -> float:
    """Power as n grows without bound, for a point analysis prior."""
    if analysis.mean == test.null:
        raise DomainError("Point analysis prior coincides with the null value")
    midpoint = 0.5 * (test.null + analysis.mean)
    if design.is_point:
        gap_alt = abs(design.mean - analysis.mean)
        gap_null = abs(design.mean - test.null)
        if gap_alt < gap_null:
            prob_le = 1.0
        elif gap_alt > gap_null:
            prob_le = 0.0
        else:
            prob_le = 0.5
    else:
        z_lim = (midpoint - design.mean) / design.sd
        prob_le = std_normal_cdf(-z_lim) if analysis.mean > test.null else std_normal_cdf(z_lim)
    return _oriented(prob_le, test.orientation)


def limiting_power(test: TestSpec, analysis: AnalysisPrior, design: DesignPrior) -> float:
    """Limit of the power function as n grows, for any analysis prior."""
    if isinstance(analysis, PointPrior):
        return power_limit_point_analysis(test, analysis, design)
    if isinstance(analysis, TruncatedTPrior):
        return limit_t(analysis, design, test.orientation)
    # normal and normal moment Bayes factors are consistent under any non-null design
    prob_le = 0.0 if _is_point_null(test, design) else 1.0
    return _oriented(prob_le, test.orientation)


def power_point_analysis(query: PowerQuery) -> PowerResult:
    test, prior, design = query.test, query.analysis, query.design
    if prior.mean == test.null:
        raise DomainError("Point analysis prior coincides with the null value; power is undefined")

    variance = test.unit_variance / query.n
    sd = predictive_sd(design, query.n, test.unit_variance)
    z = (variance * test.log_k / (test.null - prior.mean) + 0.5 * (test.null + prior.mean) - design.mean) / sd
    prob_le = std_normal_cdf(-z) if prior.mean > test.null else std_normal_cdf(z)

    return PowerResult(
        probability=_oriented(prob_le, test.orientation),
        limiting_power=power_limit_point_analysis(test, prior, design),
        orientation=test.orientation,
        n=query.n,
        intermediates={"Z": z, "predictive_sd": sd},
    )


def power_normal_analysis(query: PowerQuery) -> PowerResult:
    test, prior, design = query.test, query.analysis, query.design
    variance = test.unit_variance / query.n
    tau2 = prior.sd ** 2
    sd = predictive_sd(design, query.n, test.unit_variance)

    m = (design.mean - test.null - variance / tau2 * (test.null - prior.mean)) / sd
    x = ((math.log1p(tau2 / variance) + (test.null - prior.mean) ** 2 / tau2 - 2.0 * test.log_k)
         * (1.0 + variance / tau2) * variance / (design.sd ** 2 + variance))
    if x < 0.0:
        # BF01 <= k holds for every estimate
        prob_le = 1.0
    else:
        root_x = math.sqrt(x)
        prob_le = std_normal_cdf(-root_x - m) + std_normal_cdf(-root_x + m)

    return PowerResult(
        probability=_oriented(prob_le, test.orientation),
        limiting_power=limiting_power(test, prior, design),
        orientation=test.orientation,
        n=query.n,
        intermediates={"M": m, "X": x, "predictive_sd": sd},
    )


def power_nm_analysis(query: PowerQuery) -> PowerResult:
    test, prior, design = query.test, query.analysis, query.design
    unit_variance = estimate_unit_variance(test, prior)
    variance = unit_variance / query.n
    tau2 = prior.spread ** 2
    sd = predictive_sd(design, query.n, unit_variance)

    # W0 argument c^(3/2) sqrt(e) / (2k) with c = 1 + tau^2 / variance, formed in logs
    log_arg = 1.5 * math.log1p(tau2 / variance) + 0.5 - math.log(2.0 * test.k)
    arg = math.exp(log_arg) if log_arg < 700.0 else math.inf
    if math.isinf(arg):
        # W0(y) = log y - log log y + ... for huge y
        w0 = log_arg - math.log(log_arg) + math.log(log_arg) / log_arg
    else:
        w0 = lambert_w(arg, Branch.PRINCIPAL)
    q = 2.0 * w0 - 1.0

    a = (design.mean - test.null) / sd
    if q <= 0.0:
        # BF01 <= k holds for every estimate
        y = 0.0
        prob_le = 1.0
    else:
        y = q * (1.0 + variance / tau2) / (1.0 + design.sd ** 2 / variance)
        root_y = math.sqrt(y)
        prob_le = std_normal_cdf(-root_y - a) + std_normal_cdf(-root_y + a)

    return PowerResult(
        probability=_oriented(prob_le, test.orientation),
        limiting_power=limiting_power(test, prior, design),
        orientation=test.orientation,
        n=query.n,
        intermediates={"Y": y, "A": a, "W0": w0, "predictive_sd": sd},
    )


def power(query: PowerQuery) -> PowerResult:
    """Dispatch on the analysis prior."""
    prior = query.analysis
    if isinstance(prior, PointPrior):
        return power_point_analysis(query)
    if isinstance(prior, NormalPrior):
        return power_normal_analysis(query)
    if isinstance(prior, NormalMomentPrior):
        return power_nm_analysis(query)
    if isinstance(prior, TruncatedTPrior):
        return power_t(query)
    raise ValueError(f"Unsupported analysis prior {type(prior).__name__}")


def power_curve(query: PowerQuery, n_values: Iterable[float], parallel: bool = True) -> list[PowerResult]:
    """Power at each n, in input order."""
    results = map_ordered(lambda n: power(query.at(n)), n_values, parallel=parallel)
    logger.debug(f"Computed power curve at {len(results)} sample sizes")
    return results


def type_one_error(test: TestSpec, analysis: AnalysisPrior, n: float, **query_options) -> float:
    """Probability of misleading evidence for H1 when the point null generates the data."""
    if test.orientation is not Orientation.EVIDENCE_FOR_H1:
        raise ValueError("Type I error needs a test oriented towards evidence for H1 (k < 1)")
    return power(PowerQuery(test, analysis, DesignPrior(test.null, 0.0), n, **query_options)).probability
