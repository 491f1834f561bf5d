# Bayes factors for normal estimates and t statistics
from .factors import BayesFactor, EstimateInput, bf01, log_bf01_values, nmbf01
from .ttest import TTestKind, t_design, tbf01
