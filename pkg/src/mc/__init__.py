# Monte Carlo validation of the analytic power functions
from .simulate import (
    GENERATOR_NAME,
    McConfig,
    McReport,
    ValidationCell,
    ValidationCondition,
    ValidationSummary,
    mc_validate,
    simulate_power,
    validation_grid,
)
