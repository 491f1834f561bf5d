"""
Bayes factors for approximately normal estimates.

All factors are oriented as BF01 (values above one favour the null) and are
computed in log space.  The ``log_bf01_*`` kernels accept numpy arrays of
estimates so the simulation layer can evaluate many replicates at once.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import DomainError
from src.model.priors import AnalysisPrior, NormalMomentPrior, NormalPrior, PointPrior


@dataclass(frozen=True)
class BayesFactor:
    """A BF01 value kept on the log scale."""
    log_value: float

    @property
    def value(self) -> float:
        try:
            return math.exp(self.log_value)
        except OverflowError:
            return math.inf

    def __float__(self) -> float:
        return self.value


@dataclass(frozen=True)
class EstimateInput:
    """
    An estimate with either its standard error or a unit variance and
    effective sample size (``se = sqrt(unit_variance / n)``).
    """
    estimate: float
    unit_variance: Optional[float] = None
    n: Optional[float] = None
    se: Optional[float] = None

    def __post_init__(self):
        has_pair = self.unit_variance is not None or self.n is not None
        if has_pair == (self.se is not None):
            raise ValueError("Give either se or both unit_variance and n")
        if has_pair and (self.unit_variance is None or self.n is None):
            raise ValueError("unit_variance and n must be given together")
        if self.se is not None and not self.se > 0.0:
            raise DomainError(f"Standard error must be positive, got {self.se!r}")
        if self.unit_variance is not None and not self.unit_variance > 0.0:
            raise DomainError(f"Unit variance must be positive, got {self.unit_variance!r}")
        if self.n is not None and not self.n > 0.0:
            raise DomainError(f"n must be positive, got {self.n!r}")

    @property
    def variance(self) -> float:
        """Squared standard error of the estimate."""
        if self.se is not None:
            return self.se ** 2
        return self.unit_variance / self.n


def log_bf01_point(estimate, variance: float, null: float, mean: float):
    """Point alternative: a likelihood ratio, linear in the estimate."""
    return (null - mean) * (estimate - 0.5 * (null + mean)) / variance


def log_bf01_normal(estimate, variance: float, null: float, mean: float, sd: float):
    """Normal alternative N(mean, sd^2) against a point null."""
    tau2 = sd ** 2
    return 0.5 * (
        math.log1p(tau2 / variance)
        - (estimate - null) ** 2 / variance
        + (estimate - mean) ** 2 / (tau2 + variance)
    )


def log_bf01_moment(estimate, variance: float, null: float, spread: float):
    """Normal moment alternative centred on the null."""
    tau2 = spread ** 2
    q = (estimate - null) ** 2 / (variance * (1.0 + variance / tau2))
    return 1.5 * math.log1p(tau2 / variance) - 0.5 * q - np.log1p(q)


def bf01(data: EstimateInput, null: float, prior: AnalysisPrior) -> BayesFactor:
    """BF01 for a point or normal analysis prior."""
    if isinstance(prior, PointPrior):
        return BayesFactor(float(log_bf01_point(data.estimate, data.variance, null, prior.mean)))
    if isinstance(prior, NormalPrior):
        return BayesFactor(float(log_bf01_normal(data.estimate, data.variance, null, prior.mean, prior.sd)))
    raise ValueError(f"bf01 needs a point or normal prior, got {type(prior).__name__}")


def nmbf01(data: EstimateInput, null: float, prior: NormalMomentPrior) -> BayesFactor:
    """BF01 for a normal moment analysis prior."""
    if not isinstance(prior, NormalMomentPrior):
        raise ValueError(f"nmbf01 needs a normal moment prior, got {type(prior).__name__}")
    return BayesFactor(float(log_bf01_moment(data.estimate, data.variance, null, prior.spread)))


def log_bf01_values(estimates: np.ndarray, variance: float, null: float, prior: AnalysisPrior) -> np.ndarray:
    """Vectorised log BF01 over an array of estimates sharing one standard error."""
    estimates = np.asarray(estimates, dtype=float)
    if isinstance(prior, PointPrior):
        return log_bf01_point(estimates, variance, null, prior.mean)
    if isinstance(prior, NormalPrior):
        return log_bf01_normal(estimates, variance, null, prior.mean, prior.sd)
    if isinstance(prior, NormalMomentPrior):
        return log_bf01_moment(estimates, variance, null, prior.spread)
    raise ValueError(f"No closed-form Bayes factor for {type(prior).__name__}")
