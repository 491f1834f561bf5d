"""
Priors, test specifications and the predictive distribution of a future estimate.

Analysis priors describe the parameter under H1 inside the Bayes factor; the
design prior describes the parameter that generates the data at planning time.
All types are immutable and validate themselves on construction.
"""

import enum
import math
from dataclasses import dataclass
from typing import Union


class Orientation(enum.Enum):
    """Which hypothesis a design is meant to find evidence for."""
    EVIDENCE_FOR_H1 = "h1"    # Pr(BF01 <= k), k < 1
    EVIDENCE_FOR_H0 = "h0"    # Pr(BF01 > k), k > 1

    @classmethod
    def for_threshold(cls, k: float) -> "Orientation":
        if k < 1.0:
            return cls.EVIDENCE_FOR_H1
        if k > 1.0:
            return cls.EVIDENCE_FOR_H0
        raise ValueError("k = 1 does not determine an orientation; pass one explicitly")


@dataclass(frozen=True)
class PointPrior:
    """All prior mass at ``mean``."""
    mean: float

    def __post_init__(self):
        if not math.isfinite(self.mean):
            raise ValueError(f"Point prior mean must be finite, got {self.mean!r}")

    @property
    def label(self) -> str:
        return f"point:{self.mean!r}"


@dataclass(frozen=True)
class NormalPrior:
    mean: float
    sd: float

    def __post_init__(self):
        if not math.isfinite(self.mean):
            raise ValueError(f"Normal prior mean must be finite, got {self.mean!r}")
        if not (self.sd > 0.0 and math.isfinite(self.sd)):
            raise ValueError(f"Normal prior sd must be positive, got {self.sd!r}")

    @property
    def label(self) -> str:
        return f"normal:{self.mean!r},{self.sd!r}"


@dataclass(frozen=True)
class TruncatedTPrior:
    """
    Location-scale t prior on a standardized mean difference, truncated to
    ``[lower, upper]``.  ``df = 1`` with location 0 is the (scaled Cauchy) JZS
    prior; ``lower = 0`` makes it one-sided.
    """
    location: float
    scale: float
    df: float
    lower: float = -math.inf
    upper: float = math.inf

    def __post_init__(self):
        if not math.isfinite(self.location):
            raise ValueError(f"t prior location must be finite, got {self.location!r}")
        if not (self.scale > 0.0 and math.isfinite(self.scale)):
            raise ValueError(f"t prior scale must be positive, got {self.scale!r}")
        if not self.df > 0.0:
            raise ValueError(f"t prior df must be positive, got {self.df!r}")
        if not self.lower < self.upper:
            raise ValueError(f"t prior needs lower < upper, got [{self.lower!r}, {self.upper!r}]")

    @property
    def is_symmetric(self) -> bool:
        """Symmetric about zero, so BF01(t) = BF01(-t)."""
        return self.location == 0.0 and self.lower == -self.upper

    @property
    def label(self) -> str:
        return f"t:{self.location!r},{self.scale!r},{self.df!r},{self.lower!r},{self.upper!r}"


@dataclass(frozen=True)
class NormalMomentPrior:
    """Non-local prior N(theta; theta0, spread^2) (theta - theta0)^2 / spread^2, centred on the null."""
    spread: float

    def __post_init__(self):
        if not (self.spread > 0.0 and math.isfinite(self.spread)):
            raise ValueError(f"Normal moment spread must be positive, got {self.spread!r}")

    @property
    def label(self) -> str:
        return f"nm:{self.spread!r}"


AnalysisPrior = Union[PointPrior, NormalPrior, TruncatedTPrior, NormalMomentPrior]


@dataclass(frozen=True)
class DesignPrior:
    """Point (``sd == 0``, conditional power) or normal (predictive power) design prior."""
    mean: float
    sd: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.mean):
            raise ValueError(f"Design prior mean must be finite, got {self.mean!r}")
        if not (self.sd >= 0.0 and math.isfinite(self.sd)):
            raise ValueError(f"Design prior sd must be nonnegative, got {self.sd!r}")

    @property
    def is_point(self) -> bool:
        return self.sd == 0.0

    @property
    def label(self) -> str:
        if self.is_point:
            return f"point:{self.mean!r}"
        return f"normal:{self.mean!r},{self.sd!r}"


@dataclass(frozen=True)
class TestSpec:
    """
    What counts as compelling evidence, and the scale of one observation.

    ``unit_variance`` is the variance of one effective observation, so a
    future estimate has standard error ``sqrt(unit_variance / n)``.
    ``parameter_kind`` is free-text metadata, usually a preset key.
    """
    __test__ = False  # not a pytest class

    null: float
    k: float
    orientation: Orientation
    unit_variance: float = 1.0
    parameter_kind: str = ""

    def __post_init__(self):
        if not math.isfinite(self.null):
            raise ValueError(f"Null value must be finite, got {self.null!r}")
        if not (self.k > 0.0 and math.isfinite(self.k)):
            raise ValueError(f"Threshold k must be positive, got {self.k!r}")
        if self.orientation is Orientation.EVIDENCE_FOR_H1 and not self.k < 1.0:
            raise ValueError(f"Evidence for H1 requires k < 1, got k = {self.k!r}")
        if self.orientation is Orientation.EVIDENCE_FOR_H0 and not self.k > 1.0:
            raise ValueError(f"Evidence for H0 requires k > 1, got k = {self.k!r}")
        if not (self.unit_variance > 0.0 and math.isfinite(self.unit_variance)):
            raise ValueError(f"Unit variance must be positive, got {self.unit_variance!r}")

    @property
    def log_k(self) -> float:
        return math.log(self.k)


# normal moment priors count n per group of a balanced two-arm design and
# the unit variance per arm, so the estimate carries twice the unit variance
MOMENT_ARMS = 2.0


def estimate_unit_variance(test: TestSpec, analysis: AnalysisPrior) -> float:
    """Unit variance of the estimate the Bayes factor under ``analysis`` is computed from."""
    if isinstance(analysis, NormalMomentPrior):
        return MOMENT_ARMS * test.unit_variance
    return test.unit_variance


def predictive_sd(design: DesignPrior, n: float, unit_variance: float) -> float:
    """Sd of the future estimate under the design prior: sqrt(sd_d^2 + unit_variance / n)."""
    if not n > 0.0:
        raise ValueError(f"n must be positive, got {n!r}")
    if math.isinf(n):
        return design.sd
    return math.sqrt(design.sd ** 2 + unit_variance / n)


def parse_threshold(text: str) -> float:
    """Parse ``"3"``, ``"0.1"`` or a fraction such as ``"1/10"`` into a positive float."""
    raw = str(text).strip()
    if not raw:
        raise ValueError("Empty threshold")
    parts = raw.split("/")
    if len(parts) > 2:
        raise ValueError(f"Malformed threshold {text!r}")
    try:
        numbers = [float(part) for part in parts]
    except ValueError:
        raise ValueError(f"Malformed threshold {text!r}") from None

    if len(numbers) == 2:
        num, den = numbers
        if not (num > 0.0 and den > 0.0):
            raise ValueError(f"Threshold fraction needs positive parts, got {text!r}")
        value = num / den
    else:
        value = numbers[0]
    if not (value > 0.0 and math.isfinite(value)):
        raise ValueError(f"Threshold must be a positive number, got {text!r}")
    return value
