"""Deformed coefficient operators on harmonic multivalent power series.

The package represents truncated harmonic series f = h + conj(g) of a
given valence, applies a two-parameter deformed multiplier operator to
them, and checks class membership two ways: a coefficient margin that is
sufficient by itself, and a sampled analytic condition on disk grids.
Extremal generators, convolution, an integral-transform coefficient map
and a seeded verification harness round out the toolkit; a CLI exposes
everything for batch use.
"""

from .brackets import PQParams, bracket_pq, bracket_q, factorial_pq, pochhammer_pq
from .errors import (
    DegenerateClassError,
    DegenerateClassWarning,
    DomainError,
    NormalizationError,
    QuadratureError,
    SchemaError,
    SingularRatioError,
    ValenceMismatchError,
)
from .series import (
    ANALYTIC,
    CO_ANALYTIC,
    DiskGrid,
    HarmonicSeries,
    eval_part_derivative,
    evaluate,
    linear_combine,
    read_series,
    sense_gap,
    write_series,
)
from .operator import OperatorParams, apply_operator, multiplier, multiplier_row
from .membership import (
    ClassParams,
    ExtremalWeights,
    MembershipReport,
    analytic_ratio,
    bernardi,
    check_membership,
    coefficient_sum,
    convolution_identity,
    convolve,
    extremal_function,
    margin,
    min_re_over_grid,
    re_ge_alpha_modulus,
    sense_gap_over_grid,
    weight_pair,
)
from .verify import (
    SUITE_NAMES,
    SuiteConfig,
    SuiteReport,
    TrialReport,
    bernardi_quadrature_oracle,
    closure_suite,
    recurrence_margin,
    run_single_trial,
    run_suites,
    sample_in_class,
    sufficiency_trial,
    suite_exit_code,
    write_reports,
)
from .estimators import BernardiOperator, MembershipClassifier, MultiplierOperator, as_series_list

__version__ = "0.1.0"

__all__ = [
    "ANALYTIC",
    "CO_ANALYTIC",
    "BernardiOperator",
    "ClassParams",
    "DegenerateClassError",
    "DegenerateClassWarning",
    "DiskGrid",
    "DomainError",
    "ExtremalWeights",
    "HarmonicSeries",
    "MembershipClassifier",
    "MembershipReport",
    "MultiplierOperator",
    "NormalizationError",
    "OperatorParams",
    "PQParams",
    "QuadratureError",
    "SchemaError",
    "SingularRatioError",
    "SUITE_NAMES",
    "SuiteConfig",
    "SuiteReport",
    "TrialReport",
    "ValenceMismatchError",
    "analytic_ratio",
    "apply_operator",
    "as_series_list",
    "bernardi",
    "bernardi_quadrature_oracle",
    "bracket_pq",
    "bracket_q",
    "check_membership",
    "closure_suite",
    "coefficient_sum",
    "convolution_identity",
    "convolve",
    "eval_part_derivative",
    "evaluate",
    "extremal_function",
    "factorial_pq",
    "linear_combine",
    "margin",
    "min_re_over_grid",
    "multiplier",
    "multiplier_row",
    "pochhammer_pq",
    "re_ge_alpha_modulus",
    "read_series",
    "recurrence_margin",
    "run_single_trial",
    "run_suites",
    "sample_in_class",
    "sense_gap",
    "sense_gap_over_grid",
    "sufficiency_trial",
    "suite_exit_code",
    "weight_pair",
    "write_reports",
    "write_series",
]
