"""Witness closures and exhaustively verified restriction identities.

Finite and countable metric spaces, extremal witness problems over balls and
shells, closure of a seed set under optimal witnesses, and checks that every
sup/inf formula computed over the whole space equals the same formula over
the closed subset.  See README.md for the tour; the `sepdet` console script
exposes the same operations on JSON descriptors.
"""

from .errors import (
    BadShell,
    DepthExceeded,
    DescriptorError,
    EmptyRegion,
    InvariantViolation,
    IsolatedPoint,
    LipschitzViolation,
    NoCoordinates,
    NonPositiveRadius,
    NotAChain,
    ScoreRangeError,
    SepdetError,
    SpaceMismatch,
    UnknownPoint,
    UnknownSuite,
)
from .extreal import FLOAT_TOL, NEG_INF, POS_INF, Num, close, fmt, parse, pos_part, sub
from .families import (
    FamilyHandle,
    cofinal_extend,
    family_for,
    intersect,
    is_member,
    sigma_union,
)
from .functionals import (
    BUILTIN_FUNCTIONS,
    FunctionOracle,
    PROBLEM_FAMILIES,
    PairSup,
    ScaleGrid,
    ball_pairs_problem,
    builtin_function,
    continuity_check,
    default_radius_grid,
    default_shell_grid,
    level_grid,
    liminf_at,
    limsup_at,
    lip_local_sup,
    lip_modulus,
    lipschitz_second_witness,
    midpoint_grid,
    partial_slope,
    problem_from_descriptor,
    punctured_ball_problem,
    radius_truncation,
    scale_grid_for,
    shell_truncation,
    slope_at,
    torus_slope_problem,
    torus_sup,
    verify_lipschitz_second,
)
from .harness import (
    SUITES,
    SuiteConfig,
    SuiteReport,
    brute_force_optimum,
    dyadic_interval_space,
    random_finite_metric,
    random_table_function,
    replay_check,
    run_suite,
    step_function,
    witness_dump,
)
from .scheme import (
    DeterminacyCheck,
    GeneratedSubspace,
    ParamSpace,
    Provenance,
    WitnessProblem,
    check_inf_reduction,
    check_reduction,
    check_sup_reduction,
    closure_iterate,
    closure_round,
    intersect_problems,
    positive_scalar_params,
    product_closure,
    rational_span_close,
    shell_params,
    sort_points,
    witness_select,
)
from .spaces import (
    FiniteMetricSpace,
    LazyMetricSpace,
    MetricSpace,
    Point,
    ProductSpace,
    Region,
    ball_pairs,
    ball_points,
    punctured_ball_points,
    space_from_descriptor,
    space_to_descriptor,
    torus_points,
)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_FUNCTIONS",
    "BadShell",
    "DepthExceeded",
    "DescriptorError",
    "DeterminacyCheck",
    "EmptyRegion",
    "FLOAT_TOL",
    "FamilyHandle",
    "FiniteMetricSpace",
    "FunctionOracle",
    "GeneratedSubspace",
    "InvariantViolation",
    "IsolatedPoint",
    "LazyMetricSpace",
    "LipschitzViolation",
    "MetricSpace",
    "NEG_INF",
    "NoCoordinates",
    "NonPositiveRadius",
    "NotAChain",
    "Num",
    "POS_INF",
    "PROBLEM_FAMILIES",
    "PairSup",
    "ParamSpace",
    "Point",
    "ProductSpace",
    "Provenance",
    "Region",
    "SUITES",
    "ScaleGrid",
    "ScoreRangeError",
    "SepdetError",
    "SpaceMismatch",
    "SuiteConfig",
    "SuiteReport",
    "UnknownPoint",
    "UnknownSuite",
    "WitnessProblem",
    "ball_pairs",
    "ball_pairs_problem",
    "ball_points",
    "brute_force_optimum",
    "builtin_function",
    "check_inf_reduction",
    "check_reduction",
    "check_sup_reduction",
    "close",
    "closure_iterate",
    "closure_round",
    "cofinal_extend",
    "continuity_check",
    "default_radius_grid",
    "default_shell_grid",
    "dyadic_interval_space",
    "family_for",
    "fmt",
    "intersect",
    "intersect_problems",
    "is_member",
    "level_grid",
    "liminf_at",
    "limsup_at",
    "lip_local_sup",
    "lip_modulus",
    "lipschitz_second_witness",
    "midpoint_grid",
    "parse",
    "partial_slope",
    "pos_part",
    "positive_scalar_params",
    "problem_from_descriptor",
    "product_closure",
    "punctured_ball_points",
    "punctured_ball_problem",
    "radius_truncation",
    "random_finite_metric",
    "random_table_function",
    "rational_span_close",
    "replay_check",
    "run_suite",
    "scale_grid_for",
    "shell_params",
    "shell_truncation",
    "sigma_union",
    "slope_at",
    "sort_points",
    "space_from_descriptor",
    "space_to_descriptor",
    "step_function",
    "sub",
    "torus_points",
    "torus_slope_problem",
    "torus_sup",
    "verify_lipschitz_second",
    "witness_dump",
    "witness_select",
]
