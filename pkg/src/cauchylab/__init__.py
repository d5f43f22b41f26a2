"""cauchylab: numerical diagnostics for finite Radon-type measures.

Builds discrete planar (and d-dimensional) measures and computes the
quantities that govern boundedness and compactness of their singular
integral transforms: Menger curvature, dyadic cube densities, truncated
operator norms and their shell decompositions, plus closed-form Hilbert
transform oracles and a verdict layer that reads the decay trends.
"""

from .analytic import StepFunction, hilbert_step, l2_norm_interval, make_fk
from .curvature import (
    CurvatureResult,
    circumradius,
    curvature_ratio_scan,
    menger_c2,
    menger_c2_point,
)
from .density import (
    DensityProfile,
    density_profile,
    find_separated_pair,
    growth_constant,
    theta,
)
from .diagnostics import (
    CantorCurvatureCheck,
    ConditionTrend,
    DiagnosticsReport,
    MissingDensityWarning,
    TvIdentityResult,
    VerdictThresholds,
    cantor_curvature_check,
    cantor_theta_series,
    compactness_verdict,
    report_to_csv,
    report_to_json,
    tv_identity_residual,
)
from .errors import (
    BreakpointSingularity,
    BudgetExceeded,
    CauchyLabError,
    CoincidentPoints,
    DegenerateTriple,
    DimensionMismatch,
    DuplicatePoint,
    EmptyCube,
    EmptyMeasure,
    InvalidLevel,
    InvalidParameter,
    InvalidRange,
    InvalidScales,
    InvalidSpec,
    KernelDimensionMismatch,
    LengthMismatch,
    NonpositiveWeight,
    OverlappingCubes,
    ParseError,
    ValidationError,
)
from .measure import (
    CantorSpec,
    Cube,
    DiscreteMeasure,
    cantor_squares,
    generate_cantor,
    generate_circle,
    generate_disc,
    generate_segment,
    load_measure,
    new_measure,
    restrict,
    save_measure,
)
from .operator import (
    CAUCHY,
    IM_CAUCHY,
    KernelId,
    NormEstimate,
    OperatorMatrix,
    apply_operator,
    build_truncated,
    indicator_image_norm,
    kernel_eval,
    operator_norm,
    pair_correlation,
    partial_sum_operator,
    riesz,
    shell_operator,
    t1_quantities,
    truncation_gap,
)

__version__ = "0.1.0"
