"""Exact construction and verification of a two-parameter 2x2 matrix-weight
orthogonal polynomial family and its algebra of differential operators.
"""

from .exactcore import (
    ExactScalar,
    Poly,
    gegenbauer,
    gegenbauer_identity_suite,
    parse_rational,
    pochhammer,
)
from .matpoly import ConstMat, MatPoly, SingularMatrixError
from .weight import (
    Params,
    ParameterError,
    Weight,
    conjugation_check,
    inner_product_reduced,
    reduced_moment,
    reduction_check,
)
from .families import (
    FamilyCache,
    build_P,
    build_Q,
    norm_report,
    recursion_coeffs,
    verify_family,
)
from .diffop import (
    DiffOp,
    NotInAlgebraError,
    adjoint,
    apply,
    compose,
    eigenvalue_of,
    named_basis,
    relation_suite,
    symmetry_check,
)
from .dwsolve import (
    filtration_report,
    kpr_crosscheck,
    membership_check,
    solve_order,
)

__version__ = "0.1.0"

__all__ = [
    "ExactScalar",
    "Poly",
    "gegenbauer",
    "gegenbauer_identity_suite",
    "parse_rational",
    "pochhammer",
    "ConstMat",
    "MatPoly",
    "SingularMatrixError",
    "Params",
    "ParameterError",
    "Weight",
    "conjugation_check",
    "inner_product_reduced",
    "reduced_moment",
    "reduction_check",
    "FamilyCache",
    "build_P",
    "build_Q",
    "norm_report",
    "recursion_coeffs",
    "verify_family",
    "DiffOp",
    "NotInAlgebraError",
    "adjoint",
    "apply",
    "compose",
    "eigenvalue_of",
    "named_basis",
    "relation_suite",
    "symmetry_check",
    "filtration_report",
    "kpr_crosscheck",
    "membership_check",
    "solve_order",
    "__version__",
]
