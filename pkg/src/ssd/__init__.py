# Sample size determination
from .sample_size import (
    Feasibility,
    FrequentistSampleSize,
    SampleSizeResult,
    SizingMethod,
    feasibility,
    freq_n,
    lambert_feasibility,
    n_local_normal,
    n_point_analysis,
    n_search,
    sample_size,
)
