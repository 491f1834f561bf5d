# Power functions, limits and the two-step t-test procedure
from .functions import (
    limiting_power,
    power,
    power_curve,
    power_limit_point_analysis,
    power_nm_analysis,
    power_normal_analysis,
    power_point_analysis,
    type_one_error,
)
from .results import PowerQuery, PowerResult
from .ttest import power_t, t_success_region
