# Priors, test specifications and unit-variance presets
from .presets import UNIT_VARIANCE_PRESETS, UnitVariancePreset, get_preset, unit_variance_for
from .priors import (
    AnalysisPrior,
    DesignPrior,
    NormalMomentPrior,
    NormalPrior,
    Orientation,
    PointPrior,
    TestSpec,
    TruncatedTPrior,
    estimate_unit_variance,
    parse_threshold,
    predictive_sd,
)
