"""Homothetic MA - homothetic functions and the homogeneous Monge-Ampere equation."""

from ma_core.report import TOOL_VERSION as __version__
from ma_core.errors import (
    DomainError,
    ExprSyntaxError,
    HomotheticError,
    Inconsistent,
    Mismatch,
    ToleranceExceeded,
)
from ma_core.expr import Expr, VarSpec, eval_scalar, parse, to_text
from ma_core.jets import Jet2, fd_hessian, jet_eval
from ma_core.smalllin import adjugate_quadratic_form, cofactor_matrix, determinant
from ma_core.homogeneity import (
    DegreeEstimate,
    estimate_degree,
    euler_residual,
    mrs,
    radial_affinity_residual,
)
from ma_core.geometry import Flatness, FlatnessVerdict, flatness, gauss_kronecker
from ma_core.homothetic import HomotheticSpec, OuterFamily
from ma_core.theorems import (
    classify_n_input,
    classify_two_input,
    composite_hessian_identity,
    construct_from_profile,
    factorization_identity,
    profile_identity,
    profile_of,
)
from ma_core.models import ACMS, CobbDouglas, PerfectSubstitute, analytic_flatness
from ma_core.tolerances import DEFAULT_TOLERANCES, Tolerances

__all__ = [
    "__version__",
    "DomainError",
    "ExprSyntaxError",
    "HomotheticError",
    "Inconsistent",
    "Mismatch",
    "ToleranceExceeded",
    "Expr",
    "VarSpec",
    "eval_scalar",
    "parse",
    "to_text",
    "Jet2",
    "fd_hessian",
    "jet_eval",
    "adjugate_quadratic_form",
    "cofactor_matrix",
    "determinant",
    "DegreeEstimate",
    "estimate_degree",
    "euler_residual",
    "mrs",
    "radial_affinity_residual",
    "Flatness",
    "FlatnessVerdict",
    "flatness",
    "gauss_kronecker",
    "HomotheticSpec",
    "OuterFamily",
    "classify_n_input",
    "classify_two_input",
    "composite_hessian_identity",
    "construct_from_profile",
    "factorization_identity",
    "profile_identity",
    "profile_of",
    "ACMS",
    "CobbDouglas",
    "PerfectSubstitute",
    "analytic_flatness",
    "DEFAULT_TOLERANCES",
    "Tolerances",
]
