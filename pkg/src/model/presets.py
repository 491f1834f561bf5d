"""
Unit-variance presets for common parameter estimates.

Each preset states the variance of one effective observation and how the
effective sample size n should be read for that estimate.
"""

from dataclasses import dataclass
from typing import Callable, Optional


@dataclass(frozen=True)
class UnitVariancePreset:
    key: str
    outcome: str
    estimate: str
    n_interpretation: str
    rule: Callable[[Optional[float]], float]
    rule_text: str
    needs_sigma: bool = False

    def unit_variance(self, sigma: Optional[float] = None) -> float:
        if self.needs_sigma:
            if sigma is None:
                raise ValueError(f"Preset '{self.key}' needs the per-observation sd sigma")
            if not sigma > 0.0:
                raise ValueError(f"sigma must be positive, got {sigma!r}")
        return self.rule(sigma)


UNIT_VARIANCE_PRESETS = [
    UnitVariancePreset("mean", "Continuous", "Mean", "Sample size",
                       lambda s: s ** 2, "sigma^2", needs_sigma=True),
    UnitVariancePreset("meandiff", "Continuous", "Mean difference", "Sample size per group",
                       lambda s: 2.0 * s ** 2, "2 sigma^2", needs_sigma=True),
    UnitVariancePreset("smd", "Continuous", "Standardized mean difference", "Sample size per group",
                       lambda s: 2.0, "2"),
    UnitVariancePreset("zcor", "Continuous", "z-transformed correlation", "Sample size minus 3",
                       lambda s: 1.0, "1"),
    UnitVariancePreset("arcsine", "Binary", "Arcsine square root difference", "Sample size per group",
                       lambda s: 0.5, "1/2"),
    UnitVariancePreset("logor", "Binary", "Log odds ratio", "Total number of events",
                       lambda s: 4.0, "4"),
    UnitVariancePreset("loghr", "Survival", "Log hazard ratio", "Total number of events",
                       lambda s: 4.0, "4"),
    UnitVariancePreset("logrr", "Count", "Log rate ratio", "Total count",
                       lambda s: 4.0, "4"),
]

PRESET_KEYS = {p.key for p in UNIT_VARIANCE_PRESETS}


def get_preset(kind: str) -> UnitVariancePreset:
    for preset in UNIT_VARIANCE_PRESETS:
        if preset.key == kind:
            return preset
    raise ValueError(f"Unknown unit-variance preset '{kind}'; choose one of {sorted(PRESET_KEYS)}")


def unit_variance_for(kind: str, sigma: Optional[float] = None) -> float:
    """Unit variance of preset ``kind``, using ``sigma`` for the continuous mean rows."""
    return get_preset(kind).unit_variance(sigma)


def get_available_presets() -> list[UnitVariancePreset]:
    return UNIT_VARIANCE_PRESETS
