import math
from dataclasses import dataclass, field
from typing import Optional

from src.bf.ttest import TTestKind
from src.model.priors import AnalysisPrior, DesignPrior, Orientation, TestSpec


@dataclass(frozen=True)
class PowerQuery:
    """One power evaluation: test, analysis prior, design prior and sample size."""
    test: TestSpec
    analysis: AnalysisPrior
    design: DesignPrior
    n: float
    t_kind: TTestKind = TTestKind.TWO_SAMPLE
    exact_t: bool = False

    def __post_init__(self):
        if not (self.n > 0.0 and not math.isnan(self.n)):
            raise ValueError(f"n must be positive, got {self.n!r}")

    def at(self, n: float) -> "PowerQuery":
        return PowerQuery(self.test, self.analysis, self.design, n, self.t_kind, self.exact_t)


@dataclass
class PowerResult:
    """
    Probability of compelling evidence at one sample size.

    ``probability`` is Pr(BF01 <= k) for evidence for H1 and Pr(BF01 > k) for
    evidence for H0; ``intermediates`` holds the named quantities the closed
    form was built from.
    """
    probability: float
    limiting_power: Optional[float]
    orientation: Orientation
    n: float
    intermediates: dict[str, float] = field(default_factory=dict)
