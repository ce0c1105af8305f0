"""Time-varying and spatio-temporal Granger causality.

Fits piecewise-constant bivariate autoregressive models over change-point
partitions, measures directed influence as average or cumulative log
residual ratios with significance tests, searches for the optimal
partition by BIC, and aggregates voxel-pairwise causality to the ROI
level.  Closed-form calculators, seeded simulators, and a Kalman-filter
baseline support validation.
"""

from .core import (
    ChangePointSet,
    CoefficientSchedule,
    DEFAULT_MIN_WINDOW,
    DegenerateInput,
    DelayTooLarge,
    Direction,
    EmptyRoi,
    EndpointMismatch,
    GcEstimate,
    GcKind,
    InfeasibleConstraint,
    InsufficientData,
    InvalidConfig,
    InvalidDof,
    LabelMismatch,
    LengthMismatch,
    NearCollinear,
    NotIncreasing,
    NumericalDivergence,
    SingularDesign,
    StgcError,
    TimeSeriesPair,
    WindowTooShort,
    refinement_of,
    validate_changepoints,
)
from .stats import FDistParams, f_cdf, f_sf, pearson_correlation, seeded_rng
from .estimator import (
    TvMvarFit,
    WindowStats,
    fit_from_window_stats,
    fit_tvmvar,
    orthogonalize,
    standardize,
    window_stats,
)
from .causality import (
    DEFAULT_MC_DRAWS,
    average_gc,
    classic_gc,
    cumulative_gc,
    gc_for_partition,
    local_gc,
)
from .theory import (
    TheoreticalGcBreakdown,
    check_c1_condition,
    schedule_window_means,
    theoretical_average_gc,
    theoretical_cumulative_gc,
)
from .changepoint import (
    EqualWindowResult,
    PartitionEvaluator,
    SearchConfig,
    SearchObjective,
    equal_window_bic_scan,
    partition_agc,
    partition_error,
    search_optimal_partition,
    uniform_partition,
)
from .simulate import (
    BoldSimConfig,
    HrfParams,
    STEPWISE_SWITCHES,
    bold_config_with_opposite_delay,
    canonical_hrf,
    continuous_schedule,
    realign_bold,
    simulate_bold,
    simulate_continuous,
    simulate_stepwise,
    stepwise_schedule,
    stepwise_true_changepoints,
)
from .spatial import (
    PairOutcome,
    RoiGcResult,
    RoiMatrix,
    reliability,
    stgc,
    voxel_level_gc,
)
from .dkf import DkfConfig, DkfTrace, dkf_fit, dkf_gc

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
