"""Exact distributions and tests for generalized spacing statistics.

Moments of weighted p-th-power norms of uniform compositions (discrete)
and uniform simplex points (continuous) are computed exactly as rationals,
distributions are reconstructed from moments with certified error bounds,
and the resulting quantiles drive one- and two-sample non-parametric tests
with tunable (p, weights).
"""

from .moments import (
    DegenerateStatisticError,
    MomentSequence,
    StatisticSpec,
    WeightVector,
    continuous_moments,
    discrete_moments,
    moment_decay_limit,
    statistic_scale,
)
from .numeric import (
    Rational,
    TruncatedPoly1,
    TruncatedPoly2,
    binomial,
    factorial,
    poly1_mul,
    poly2_mul,
    product_tree,
    rational,
)
from .oracle import (
    Pmf,
    SizeCapError,
    enumerate_compositions,
    enumeration_pmf,
    exact_pmf,
    mann_whitney_pmf,
    monte_carlo_moments,
    rank_sum_offset,
    sample_composition,
    sample_compositions,
    sample_spacings,
    sample_spacings_batch,
)
from .reconstruct import (
    CdfEstimate,
    InvalidMomentsError,
    bernstein_masses,
    continuous_error_bound,
    discrete_error_bound,
    error_bound,
    moment_count_for_error,
    quantile,
    reconstruct_cdf,
    tail_leading_coefficient,
)
from .stattest import (
    DiscreteNull,
    NullCdfSpec,
    TestResult,
    chi2_uniformity,
    clt_pvalue,
    clt_standardization,
    cvm_one_sample,
    cvm_two_sample,
    ks_one_sample,
    ks_two_sample,
    mann_whitney,
    one_sample_null,
    one_sample_spacings,
    one_sample_test,
    two_sample_null,
    two_sample_spacings,
    two_sample_test,
)
from .power import (
    AlternativeSpec,
    ArrivalDist,
    PowerEstimate,
    TestConfig,
    ensemble_test,
    estimate_power,
    heteroskedastic_objective,
    normal_sampler,
    one_sample_roc_study,
    replicate_pvalues,
    roc_curve,
    search_parameters,
    two_sample_power_study,
    uniform_sampler,
)

__version__ = "0.1.0"
