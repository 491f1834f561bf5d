"""
Two-step power for the informed t-test Bayes factor.

Step one finds the success region {t : BF01(t) <= k}, assumed to be of the
form (-inf, t_lower] U [t_upper, inf).  Step two integrates the design
distribution of the t statistic over that region: a normal approximation by
default, or the exact noncentral t when requested.
"""

import logging
import math

import numpy as np
from scipy import stats

from src.bf.ttest import TTestKind, log_tbf01_at, log_tbf01_values, t_design
from src.errors import BracketError, DomainError, SuccessRegionError
from src.model.priors import DesignPrior, Orientation, TruncatedTPrior
from src.numerics import find_root, integrate, std_normal_cdf
from src.power.results import PowerQuery, PowerResult

logger = logging.getLogger(__name__)

GRID_POINTS = 512
MAX_GRID_POINTS = 8192
GRID_HALF_WIDTH = 10.0


def _scan(n_eff: float, df: float, prior: TruncatedTPrior, log_k: float,
          half_width: float, points: int) -> tuple[np.ndarray, np.ndarray]:
    if prior.is_symmetric:
        half = np.linspace(0.0, half_width, points // 2 + 1)
        values = log_tbf01_values(half, n_eff, df, prior)
        grid = np.concatenate([-half[:0:-1], half])
        log_bf = np.concatenate([values[:0:-1], values])
    else:
        grid = np.linspace(-half_width, half_width, points + 1)
        log_bf = log_tbf01_values(grid, n_eff, df, prior)
    return grid, log_bf - log_k


def _approaching(g: np.ndarray, side: int) -> bool:
    # still outside the region at the edge but moving towards it
    edge, inner = (g[-1], g[-2]) if side > 0 else (g[0], g[1])
    return edge > 0.0 and edge < inner


def _refine(n_eff: float, df: float, prior: TruncatedTPrior, log_k: float,
            grid: np.ndarray, g: np.ndarray, i: int) -> float:
    def h(t: float) -> float:
        return log_tbf01_at(t, n_eff, df, prior) - log_k

    brackets = [(grid[i], grid[i + 1]), (grid[max(i - 1, 0)], grid[min(i + 2, len(grid) - 1)])]
    for lo, hi in brackets:
        try:
            return find_root(h, float(lo), float(hi), tol=1e-9)
        except BracketError:
            continue
    # grid and scalar quadrature disagree on a sliver; interpolate the grid
    logger.warning(f"Falling back to grid interpolation for the crossing near t = {grid[i]:.6g}")
    return float(grid[i] - g[i] * (grid[i + 1] - grid[i]) / (g[i + 1] - g[i]))


def t_success_region(
    n: float,
    prior: TruncatedTPrior,
    k: float,
    kind: TTestKind = TTestKind.TWO_SAMPLE,
    grid_points: int = GRID_POINTS,
) -> tuple[float, float]:
    """
    Critical t values (t_lower, t_upper) with BF01 <= k exactly on
    (-inf, t_lower] U [t_upper, inf).

    A missing crossing is reported as an infinite bound: (-inf, inf) is the
    empty region and (inf, inf) the whole line.  For k > 1 the same region is
    returned; its complement is where BF01 exceeds k.
    """
    if not k > 0.0:
        raise DomainError(f"Threshold k must be positive, got {k!r}")
    n_eff, df = t_design(n, kind)
    log_k = math.log(k)

    half_width, points = GRID_HALF_WIDTH, grid_points
    while True:
        grid, g = _scan(n_eff, df, prior, log_k, half_width, points)
        extend = (_approaching(g, +1) and prior.upper > 0.0) or (_approaching(g, -1) and prior.lower < 0.0)
        if not extend or 2 * points > MAX_GRID_POINTS:
            if extend:
                logger.warning(f"Success region may extend beyond |t| = {half_width:g}")
            break
        half_width, points = 2.0 * half_width, 2 * points
        logger.debug(f"Widening t grid to +-{half_width:g} with {points} points")

    inside = g <= 0.0
    changes = np.flatnonzero(inside[:-1] != inside[1:])
    if len(changes) > 2:
        raise SuccessRegionError(
            f"BF01 crosses k = {k!r} {len(changes)} times for n = {n!r}; expected at most two"
        )

    crossings = [(_refine(n_eff, df, prior, log_k, grid, g, i), bool(inside[i])) for i in changes]
    if not crossings:
        return (math.inf, math.inf) if inside[0] else (-math.inf, math.inf)
    if len(crossings) == 1:
        t_cross, leaving = crossings[0]
        return (t_cross, math.inf) if leaving else (-math.inf, t_cross)

    (t_first, first_leaving), (t_second, _) = crossings
    if not first_leaving:
        raise SuccessRegionError(
            f"BF01 <= k only on a bounded interval [{t_first:.6g}, {t_second:.6g}] for n = {n!r}"
        )
    return t_first, t_second


def _tail_prob(t_lower: float, t_upper: float, dist) -> float:
    below = 0.0 if t_lower == -math.inf else 1.0 if t_lower == math.inf else float(dist.cdf(t_lower))
    above = 0.0 if t_upper == math.inf else float(dist.sf(t_upper))
    return below + above


def _success_probability(t_lower: float, t_upper: float, design: DesignPrior,
                         n_eff: float, df: float, exact: bool) -> tuple[float, float, float]:
    mean = design.mean * math.sqrt(n_eff)
    sd = math.sqrt(1.0 + n_eff * design.sd ** 2)
    if not exact:
        prob = std_normal_cdf((t_lower - mean) / sd) + std_normal_cdf((mean - t_upper) / sd)
        return prob, mean, sd

    def at(theta: float) -> float:
        ncp = theta * math.sqrt(n_eff)
        dist = stats.t(df) if ncp == 0.0 else stats.nct(df, ncp)
        try:
            prob = _tail_prob(t_lower, t_upper, dist)
        except ArithmeticError:
            prob = math.nan
        if not 0.0 <= prob <= 1.0:
            # large-df limit of the noncentral t
            logger.debug(f"scipy nct tails failed at df={df!r}, ncp={ncp!r}; using the normal limit")
            prob = _tail_prob(t_lower, t_upper, stats.norm(ncp, math.sqrt(1.0 + ncp * ncp / (2.0 * df))))
        return prob

    if design.is_point:
        return at(design.mean), mean, sd

    def integrand(z: float) -> float:
        return at(design.mean + design.sd * z) * math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)

    prob = integrate(integrand, -math.inf, math.inf, rel_tol=1e-8, breakpoints=(-8.0, -4.0, -2.0, 0.0, 2.0, 4.0, 8.0))
    return prob, mean, sd


def limit_t(prior: TruncatedTPrior, design: DesignPrior, orientation: Orientation) -> float:
    """
    Limiting power: the design-prior mass inside the prior support, where the
    Bayes factor is consistent for H1.  A point-null design never yields H1
    evidence in the limit.
    """
    if design.is_point:
        if design.mean == 0.0:
            h1 = 0.0
        else:
            h1 = 1.0 if prior.lower < design.mean < prior.upper else 0.0
    else:
        h1 = (std_normal_cdf((prior.upper - design.mean) / design.sd)
              - std_normal_cdf((prior.lower - design.mean) / design.sd))
    h1 = min(max(h1, 0.0), 1.0)
    return h1 if orientation is Orientation.EVIDENCE_FOR_H1 else 1.0 - h1


def power_t(query: PowerQuery) -> PowerResult:
    """Power of the t-test Bayes factor at ``query.n`` per group (or pairs)."""
    prior = query.analysis
    if not isinstance(prior, TruncatedTPrior):
        raise ValueError(f"power_t needs a truncated t prior, got {type(prior).__name__}")
    if query.test.null != 0.0:
        raise DomainError("The t-test Bayes factor tests a standardized effect of zero; set the null to 0")

    n_eff, df = t_design(query.n, query.t_kind)
    t_lower, t_upper = t_success_region(query.n, prior, query.test.k, query.t_kind)
    prob_le, mean, sd = _success_probability(t_lower, t_upper, query.design, n_eff, df, query.exact_t)
    prob_le = min(max(prob_le, 0.0), 1.0)

    orientation = query.test.orientation
    probability = prob_le if orientation is Orientation.EVIDENCE_FOR_H1 else 1.0 - prob_le
    return PowerResult(
        probability=probability,
        limiting_power=limit_t(prior, query.design, orientation),
        orientation=orientation,
        n=query.n,
        intermediates={
            "t_crit_lower": t_lower,
            "t_crit_upper": t_upper,
            "n_eff": n_eff,
            "df": df,
            "t_mean": mean,
            "t_sd": sd,
        },
    )
