"""
Sample size determination for Bayes factor designs.

Closed forms are used where they exist: point analysis priors under point or
normal design priors, and the Lambert W approximation for a normal analysis
prior centred on the null with a matching design prior.  Everything else goes
through a bracketed root search on log n.  Every closed-form answer is checked
against its power function and replaced by a search if the check fails.
"""

import enum
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

from src.bf.ttest import TTestKind
from src.errors import DomainError, InfeasibleTargetError, MonotonicityError
from src.model.priors import (
    AnalysisPrior,
    DesignPrior,
    NormalMomentPrior,
    NormalPrior,
    Orientation,
    PointPrior,
    TestSpec,
    TruncatedTPrior,
)
from src.numerics import Branch, find_root, lambert_w, std_normal_cdf, std_normal_quantile
from src.numerics.special import INV_E
from src.power import PowerQuery, limiting_power, power

logger = logging.getLogger(__name__)

DEFAULT_N_LO = 1.0
DEFAULT_N_HI = 1e8
# smallest per-group n that leaves degrees of freedom for a t statistic
T_TEST_N_LO = 2.0
# closed-form answers must reproduce the target power this closely
VERIFY_TOL = 1e-6


class SizingMethod(enum.Enum):
    ANALYTIC_NORMAL_DESIGN = "closed form, point analysis prior, normal design prior"
    ANALYTIC_POINT_DESIGN = "closed form, point analysis prior, point design prior"
    ANALYTIC_MATCHED_DESIGN = "closed form, design prior at the alternative"
    LAMBERT_W = "Lambert W approximation, centred normal priors"
    ROOT_SEARCH = "root search on log n"


@dataclass(frozen=True)
class Feasibility:
    feasible: bool
    limiting_power: Optional[float]
    reason: str = ""


@dataclass
class SampleSizeResult:
    """
    Required sample size.  ``n_real`` is the exact solution; ``n_integer`` the
    next larger integer and ``achieved_power`` the power there.
    """
    n_real: float
    method: SizingMethod
    target_power: float
    achieved_power: float
    feasibility: Feasibility
    unit_information_n: Optional[float] = None
    refined_n: Optional[float] = None

    @property
    def n_integer(self) -> int:
        return math.ceil(self.n_real)


@dataclass(frozen=True)
class FrequentistSampleSize:
    n_real: float

    @property
    def n_integer(self) -> int:
        return math.ceil(self.n_real)


def _check_target(target: float) -> None:
    if not 0.0 < target < 1.0:
        raise ValueError(f"Target power must lie in (0, 1), got {target!r}")


def _power_fn(test: TestSpec, analysis: AnalysisPrior, design: DesignPrior,
              t_kind: TTestKind = TTestKind.TWO_SAMPLE, exact_t: bool = False) -> Callable[[float], float]:
    def fn(n: float) -> float:
        return power(PowerQuery(test, analysis, design, n, t_kind, exact_t)).probability
    return fn


def lambert_feasibility(k: float, target: float) -> Feasibility:
    """Whether the Lambert W formula has a solution: -k^2 z^2 >= -1/e."""
    _check_target(target)
    z = std_normal_quantile(target / 2.0)
    arg = -(k ** 2) * z ** 2
    if arg < -INV_E:
        return Feasibility(False, None, f"-k^2 z^2 = {arg:.4g} < -1/e = {-INV_E:.4g} for k = {k:.6g}")
    return Feasibility(True, None)


def feasibility(test: TestSpec, analysis: AnalysisPrior, design: DesignPrior, target: float,
                lambert: bool = False) -> Feasibility:
    """Compare the target with the limiting power and, for the Lambert W path, its domain."""
    _check_target(target)
    if lambert:
        verdict = lambert_feasibility(test.k, target)
        if not verdict.feasible:
            return verdict
    limit = limiting_power(test, analysis, design)
    if target < limit:
        return Feasibility(True, limit)
    return Feasibility(False, limit, f"target power {target:.6g} is not below the limiting power")


def n_search(
    power_fn: Callable[[float], float],
    target: float,
    n_lo: float = DEFAULT_N_LO,
    n_hi: float = DEFAULT_N_HI,
    limit: Optional[float] = None,
) -> SampleSizeResult:
    """
    Smallest real n with power_fn(n) = target, for power increasing in n.

    The bracket grows geometrically from ``n_lo`` so expensive power functions
    are evaluated near the answer; the root is then refined on log n.
    """
    _check_target(target)
    if not 0.0 < n_lo < n_hi:
        raise ValueError(f"Need 0 < n_lo < n_hi, got [{n_lo!r}, {n_hi!r}]")

    def result(n_real: float) -> SampleSizeResult:
        return SampleSizeResult(
            n_real=n_real,
            method=SizingMethod.ROOT_SEARCH,
            target_power=target,
            achieved_power=power_fn(math.ceil(n_real)),
            feasibility=Feasibility(True, limit),
        )

    p_first = power_fn(n_lo)
    if p_first >= target:
        logger.info(f"Target power already reached at the lower bound n = {n_lo:g}")
        return result(n_lo)

    lo, hi = n_lo, min(4.0 * n_lo, n_hi)
    p_hi = power_fn(hi)
    while p_hi < target and hi < n_hi:
        lo, hi = hi, min(4.0 * hi, n_hi)
        p_hi = power_fn(hi)

    if p_hi < target:
        if p_first > p_hi + 1e-9:
            raise MonotonicityError(
                f"Power falls from {p_first:.6g} at n = {n_lo:g} to {p_hi:.6g} at n = {n_hi:g}; "
                "check that the threshold orientation matches the design"
            )
        logger.warning(f"Power {p_hi:.6g} at n = {n_hi:g} stays below target {target:g}")
        raise InfeasibleTargetError(
            f"target power {target:.6g} not reached by n = {n_hi:g}",
            limit if limit is not None else p_hi,
        )

    log_n = find_root(lambda u: power_fn(math.exp(u)) - target, math.log(lo), math.log(hi), tol=1e-12)
    return result(math.exp(log_n))


def _swap_for_h0(test: TestSpec, prior: PointPrior) -> tuple[float, float, float]:
    """(null, alternative, k) oriented so that evidence means BF01 <= k."""
    if test.orientation is Orientation.EVIDENCE_FOR_H0:
        # point-vs-point BF01 at k equals BF10 at 1/k with the hypotheses swapped
        return prior.mean, test.null, 1.0 / test.k
    return test.null, prior.mean, test.k


def n_point_analysis(
    test: TestSpec,
    prior: PointPrior,
    design: DesignPrior,
    target: float,
    lower_root: bool = False,
) -> SampleSizeResult:
    """
    Closed-form sample size for a point analysis prior.

    ``lower_root`` takes the other root of the quadratic in 1/n, which gives a
    power of ``target`` below 50% when the limiting power exceeds 50%.
    """
    _check_target(target)
    if prior.mean == test.null:
        raise DomainError("Point analysis prior coincides with the null value")
    verdict = feasibility(test, prior, design, target)
    if not verdict.feasible:
        raise InfeasibleTargetError(verdict.reason, verdict.limiting_power)

    null, alt, k = _swap_for_h0(test, prior)
    z = std_normal_quantile(1.0 - target) if lower_root else std_normal_quantile(target)
    sign = -1.0 if lower_root else 1.0
    log_k2 = 2.0 * math.log(k)
    d_mu = alt - null
    d_design = 2.0 * design.mean - alt - null
    uv = test.unit_variance

    n_real = math.nan
    if design.is_point and design.mean == alt:
        method = SizingMethod.ANALYTIC_MATCHED_DESIGN
        n_real = uv * (z + sign * math.sqrt(z * z - log_k2)) ** 2 / d_mu ** 2
    elif design.is_point:
        method = SizingMethod.ANALYTIC_POINT_DESIGN
        inner = z * z - d_design / d_mu * log_k2
        if d_design != 0.0 and inner >= 0.0:
            n_real = uv * (z + sign * math.sqrt(inner)) ** 2 / d_design ** 2
    else:
        method = SizingMethod.ANALYTIC_NORMAL_DESIGN
        shift = design.sd * log_k2 / d_mu
        inner = z * z - d_design * log_k2 / d_mu + shift ** 2
        denom = d_design ** 2 - 4.0 * z * z * design.sd ** 2
        if inner >= 0.0 and denom != 0.0:
            n_real = ((z + sign * math.sqrt(inner)) ** 2 - shift ** 2) * uv / denom

    power_fn = _power_fn(test, prior, design)
    if math.isfinite(n_real) and n_real > 0.0 and abs(power_fn(n_real) - target) <= VERIFY_TOL:
        logger.info(f"Sample size by {method.value}: n = {n_real:.6g}")
        return SampleSizeResult(
            n_real=n_real,
            method=method,
            target_power=target,
            achieved_power=power_fn(math.ceil(n_real)),
            feasibility=verdict,
        )

    logger.warning(f"{method.value} gave n = {n_real!r}, which misses the target; searching instead")
    return n_search(power_fn, target, limit=verdict.limiting_power)


def _centred_normal_power(k: float, n: float, unit_variance: float, tau: float) -> float:
    # Pr(BF01 <= k) with analysis and design prior both N(theta0, tau^2)
    ratio = unit_variance / (n * tau ** 2)
    x = (math.log1p(1.0 / ratio) - 2.0 * math.log(k)) * ratio
    if x < 0.0:
        return 1.0
    return 2.0 * std_normal_cdf(-math.sqrt(x))


def n_local_normal(k: float, target: float, unit_variance: float, tau: float) -> SampleSizeResult:
    """
    Approximate sample size for a normal analysis prior centred on the null
    with a design prior equal to it, via the lower branch of Lambert W.

    Also reports the unit information sample size and the exact solution found
    by a root search on the exact power.
    """
    _check_target(target)
    if not k > 0.0:
        raise DomainError(f"Threshold k must be positive, got {k!r}")
    if not (unit_variance > 0.0 and tau > 0.0):
        raise DomainError("Unit variance and prior sd must be positive")

    verdict = lambert_feasibility(k, target)
    if not verdict.feasible:
        raise InfeasibleTargetError(verdict.reason)

    z = std_normal_quantile(target / 2.0)
    w = lambert_w(-(k ** 2) * z ** 2, Branch.NON_PRINCIPAL)
    unit_n = k ** 2 * math.exp(-w)
    n_real = unit_variance / tau ** 2 * unit_n

    def exact(n: float) -> float:
        return _centred_normal_power(k, n, unit_variance, tau)

    try:
        refined = n_search(exact, target).n_real
    except InfeasibleTargetError:
        refined = None
    logger.info(f"Lambert W sample size n = {n_real:.6g} (exact search {refined!r})")

    return SampleSizeResult(
        n_real=n_real,
        method=SizingMethod.LAMBERT_W,
        target_power=target,
        achieved_power=exact(math.ceil(n_real)),
        feasibility=Feasibility(True, 1.0),
        unit_information_n=unit_n,
        refined_n=refined,
    )


def freq_n(alpha: float, target: float, effect: float, sigma: float = 1.0,
           unit_variance: Optional[float] = None) -> FrequentistSampleSize:
    """
    Per-group n of a two-sided z-test with level ``alpha``.  The unit variance
    defaults to 2 sigma^2 (a mean difference of two groups).
    """
    _check_target(target)
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    if effect == 0.0:
        raise DomainError("The effect must differ from zero")
    uv = 2.0 * sigma ** 2 if unit_variance is None else unit_variance
    z_sum = std_normal_quantile(1.0 - alpha / 2.0) + std_normal_quantile(target)
    return FrequentistSampleSize(uv * z_sum ** 2 / effect ** 2)


def _is_centred_local(test: TestSpec, prior: NormalPrior, design: DesignPrior) -> bool:
    return prior.mean == test.null and design.mean == test.null and design.sd == prior.sd


def sample_size(
    test: TestSpec,
    analysis: AnalysisPrior,
    design: DesignPrior,
    target: float,
    *,
    t_kind: TTestKind = TTestKind.TWO_SAMPLE,
    exact_t: bool = False,
    n_lo: Optional[float] = None,
    n_hi: float = DEFAULT_N_HI,
    lower_root: bool = False,
    use_lambert: bool = False,
) -> SampleSizeResult:
    """Pick the closed form that applies, else search."""
    if isinstance(analysis, PointPrior):
        return n_point_analysis(test, analysis, design, target, lower_root=lower_root)

    if use_lambert:
        if not (isinstance(analysis, NormalPrior) and _is_centred_local(test, analysis, design)):
            raise ValueError("The Lambert W formula needs normal analysis and design priors "
                             "both centred on the null with equal sd")
        if test.orientation is not Orientation.EVIDENCE_FOR_H1:
            raise ValueError("The Lambert W formula sizes for evidence for H1 (k < 1)")
        return n_local_normal(test.k, target, test.unit_variance, analysis.sd)

    if not isinstance(analysis, (NormalPrior, NormalMomentPrior, TruncatedTPrior)):
        raise ValueError(f"Unsupported analysis prior {type(analysis).__name__}")

    verdict = feasibility(test, analysis, design, target)
    if not verdict.feasible:
        logger.warning(f"Infeasible design: {verdict.reason}")
        raise InfeasibleTargetError(verdict.reason, verdict.limiting_power)

    if n_lo is None:
        n_lo = T_TEST_N_LO if isinstance(analysis, TruncatedTPrior) else DEFAULT_N_LO
    logger.info(f"Searching n in [{n_lo:g}, {n_hi:g}] for {type(analysis).__name__}")
    return n_search(_power_fn(test, analysis, design, t_kind, exact_t), target, n_lo, n_hi, verdict.limiting_power)
