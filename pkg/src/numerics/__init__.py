# Special functions, densities and solvers used by every design module
from .densities import nct_density, nct_log_density, t_density, t_log_density
from .solvers import find_root, integrate, integrate_vec
from .special import Branch, lambert_w, std_normal_cdf, std_normal_quantile

__all__ = [
    "Branch",
    "find_root",
    "integrate",
    "integrate_vec",
    "lambert_w",
    "nct_density",
    "nct_log_density",
    "std_normal_cdf",
    "std_normal_quantile",
    "t_density",
    "t_log_density",
]
