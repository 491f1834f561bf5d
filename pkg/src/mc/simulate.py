"""
Monte Carlo oracle for the analytic power functions.

Replicates are split into a fixed number of partitions, each driven by its own
Philox stream spawned from the seed, so counts do not depend on how many
workers run them.  Normal variates come from uniforms through the package's
own quantile function.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from src.bf.factors import log_bf01_values
from src.bf.ttest import TTestKind, log_tbf01_values, t_design
from src.errors import DomainError, InfeasibleTargetError, MonotonicityError
from src.model.priors import (
    AnalysisPrior,
    DesignPrior,
    NormalPrior,
    Orientation,
    PointPrior,
    TestSpec,
    TruncatedTPrior,
    estimate_unit_variance,
)
from src.numerics import std_normal_quantile
from src.parallel import map_ordered
from src.power import PowerQuery, power
from src.ssd import sample_size

logger = logging.getLogger(__name__)

GENERATOR_NAME = "numpy.random.Philox"
DEFAULT_REPLICATES = 50000
DEFAULT_PARTITIONS = 8

# raw observations held in memory at once on the t-test path
_T_CHUNK_VALUES = 2_000_000
# t statistics per vector quadrature
_T_BLOCK = 256
_TINY_U = 2.0 ** -60


@dataclass(frozen=True)
class McConfig:
    test: TestSpec
    analysis: AnalysisPrior
    design: DesignPrior
    n: float
    replicates: int = DEFAULT_REPLICATES
    seed: int = 0
    t_kind: TTestKind = TTestKind.TWO_SAMPLE
    exact_t: bool = False
    partitions: int = DEFAULT_PARTITIONS

    def __post_init__(self):
        if self.replicates < 100:
            raise ValueError(f"Need at least 100 replicates, got {self.replicates}")
        if self.seed < 0:
            raise ValueError(f"Seed must be nonnegative, got {self.seed}")
        if self.partitions < 1:
            raise ValueError(f"Need at least one partition, got {self.partitions}")
        if not self.n > 0.0:
            raise ValueError(f"n must be positive, got {self.n!r}")

    @property
    def query(self) -> PowerQuery:
        return PowerQuery(self.test, self.analysis, self.design, self.n, self.t_kind, self.exact_t)


@dataclass
class McReport:
    empirical_power: float
    mc_se: float
    analytic_power: float
    discrepancy: float
    successes: int
    replicates: int
    n: float
    seed: int
    generator: str = GENERATOR_NAME


def _normals(rng: np.random.Generator, size) -> np.ndarray:
    u = rng.random(size)
    u[u == 0.0] = _TINY_U
    return std_normal_quantile(u)


def _draw_effects(rng: np.random.Generator, design: DesignPrior, size: int) -> np.ndarray:
    if design.is_point:
        return np.full(size, design.mean)
    return design.mean + design.sd * _normals(rng, size)


def _count(log_bf: np.ndarray, test: TestSpec) -> int:
    if test.orientation is Orientation.EVIDENCE_FOR_H1:
        return int(np.count_nonzero(log_bf <= test.log_k))
    return int(np.count_nonzero(log_bf >= test.log_k))


def _count_normal(config: McConfig, rng: np.random.Generator, size: int) -> int:
    theta = _draw_effects(rng, config.design, size)
    variance = estimate_unit_variance(config.test, config.analysis) / config.n
    estimates = theta + math.sqrt(variance) * _normals(rng, size)
    return _count(log_bf01_values(estimates, variance, config.test.null, config.analysis), config.test)


def _t_statistics(config: McConfig, rng: np.random.Generator, size: int, n: int) -> np.ndarray:
    groups = 2 if config.t_kind is TTestKind.TWO_SAMPLE else 1
    chunk = max(1, _T_CHUNK_VALUES // (groups * n))
    out = []
    for start in range(0, size, chunk):
        m = min(chunk, size - start)
        theta = _draw_effects(rng, config.design, m)
        x = _normals(rng, (m, n)) + theta[:, None]
        if groups == 2:
            y = _normals(rng, (m, n))
            pooled = 0.5 * (x.var(axis=1, ddof=1) + y.var(axis=1, ddof=1))
            out.append((x.mean(axis=1) - y.mean(axis=1)) / np.sqrt(pooled * 2.0 / n))
        else:
            out.append(x.mean(axis=1) / (x.std(axis=1, ddof=1) / math.sqrt(n)))
    return np.concatenate(out)


def _count_t(config: McConfig, rng: np.random.Generator, size: int) -> int:
    n = int(round(config.n))
    if abs(config.n - n) > 1e-9:
        raise ValueError(f"The t-test simulation needs an integer n, got {config.n!r}")
    n_eff, df = t_design(n, config.t_kind)
    t_stats = _t_statistics(config, rng, size, n)

    # sorted blocks keep each quadrature's likelihood peaks close together
    order = np.argsort(t_stats)
    log_bf = np.empty_like(t_stats)
    for start in range(0, size, _T_BLOCK):
        idx = order[start:start + _T_BLOCK]
        log_bf[idx] = log_tbf01_values(t_stats[idx], n_eff, df, config.analysis)
    return _count(log_bf, config.test)


def _partition_sizes(replicates: int, partitions: int) -> list[int]:
    base, extra = divmod(replicates, partitions)
    return [base + (1 if i < extra else 0) for i in range(partitions)]


def simulate_power(config: McConfig, parallel: bool = True) -> McReport:
    """Empirical probability of compelling evidence, next to its analytic value."""
    counter = _count_t if isinstance(config.analysis, TruncatedTPrior) else _count_normal
    streams = np.random.SeedSequence(config.seed).spawn(config.partitions)
    sizes = _partition_sizes(config.replicates, config.partitions)

    def run(part: tuple[np.random.SeedSequence, int]) -> int:
        stream, size = part
        if size == 0:
            return 0
        return counter(config, np.random.Generator(np.random.Philox(stream)), size)

    successes = sum(map_ordered(run, list(zip(streams, sizes)), parallel=parallel))
    empirical = successes / config.replicates
    analytic = power(config.query).probability
    logger.info(f"Simulated power {empirical:.4f} vs analytic {analytic:.4f} at n = {config.n:.6g}")

    return McReport(
        empirical_power=empirical,
        mc_se=math.sqrt(empirical * (1.0 - empirical) / config.replicates),
        analytic_power=analytic,
        discrepancy=empirical - analytic,
        successes=successes,
        replicates=config.replicates,
        n=config.n,
        seed=config.seed,
    )


@dataclass(frozen=True)
class ValidationCondition:
    test: TestSpec
    analysis: AnalysisPrior
    design: DesignPrior
    target: float
    label: str = ""
    t_kind: TTestKind = TTestKind.TWO_SAMPLE


@dataclass
class ValidationCell:
    condition: ValidationCondition
    n: Optional[float] = None
    report: Optional[McReport] = None
    skipped: str = ""


@dataclass
class ValidationSummary:
    cells: list[ValidationCell] = field(default_factory=list)
    max_discrepancy: float = math.nan
    median_discrepancy: float = math.nan

    @property
    def evaluated(self) -> list[ValidationCell]:
        return [cell for cell in self.cells if cell.report is not None]


def _cell_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1, dtype=np.uint64)[0])


def mc_validate(grid: Sequence[ValidationCondition], replicates: int = DEFAULT_REPLICATES,
                seed: int = 0, parallel: bool = True) -> ValidationSummary:
    """
    Size each condition for its target, simulate at that n and summarise the
    absolute discrepancies.  Conditions without a finite sample size are kept
    in the summary, marked as skipped.
    """
    if not grid:
        raise ValueError("Validation grid is empty")

    summary = ValidationSummary()
    for index, condition in enumerate(grid):
        try:
            result = sample_size(condition.test, condition.analysis, condition.design,
                                 condition.target, t_kind=condition.t_kind)
        except (InfeasibleTargetError, DomainError, MonotonicityError) as e:
            logger.info(f"Skipping {condition.label or index}: {e}")
            summary.cells.append(ValidationCell(condition, skipped=str(e)))
            continue

        is_t = isinstance(condition.analysis, TruncatedTPrior)
        n = float(result.n_integer) if is_t else result.n_real
        config = McConfig(condition.test, condition.analysis, condition.design, n,
                          replicates=replicates, seed=_cell_seed(seed, index), t_kind=condition.t_kind)
        summary.cells.append(ValidationCell(condition, n, simulate_power(config, parallel=parallel)))

    discrepancies = [abs(cell.report.discrepancy) for cell in summary.evaluated]
    if discrepancies:
        summary.max_discrepancy = float(np.max(discrepancies))
        summary.median_discrepancy = float(np.median(discrepancies))
    return summary


def validation_grid(k: float = 0.1, target: float = 0.8, unit_variance: float = 2.0,
                    means: Sequence[float] = (0.0, 0.2, 0.5, 0.8),
                    analysis_sds: Sequence[float] = (0.0, 0.5),
                    design_sds: Sequence[float] = (0.0, 0.1)) -> list[ValidationCondition]:
    """Analysis/design prior combinations for standardized mean differences against a null of 0."""
    test = TestSpec(0.0, k, Orientation.for_threshold(k), unit_variance, "smd")
    grid = []
    for a_mean in means:
        for a_sd in analysis_sds:
            analysis = PointPrior(a_mean) if a_sd == 0.0 else NormalPrior(a_mean, a_sd)
            for d_mean in means:
                for d_sd in design_sds:
                    design = DesignPrior(d_mean, d_sd)
                    label = f"analysis={analysis.label} design={design.label}"
                    grid.append(ValidationCondition(test, analysis, design, target, label))
    return grid
