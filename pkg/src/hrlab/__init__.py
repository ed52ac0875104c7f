"""Constant (p,q)-forms, Hodge-Riemann certification and pointwise curvature sign checks."""

__version__ = "0.1.0"

from .exterior import (
    DegenerateFormError,
    Form,
    FormError,
    basis,
    brute_wedge,
    conjugate,
    power,
    top_ratio,
    wedge,
)
from .hodge_riemann import (
    HRReport,
    Verdict,
    certify,
    certify_classical,
    certify_mixed_sum,
    certify_timorin,
    find_counterexample,
    hr_type_check,
    primitive_space,
    q_matrix,
)
from .positivity import (
    HermitianCoefficientMatrix,
    NotPositiveError,
    StrongPositivityDecomposition,
    form_from_matrix,
    matrix_from_form,
    michelsohn_root,
    random_positive,
    strongly_positive_form,
)

__all__ = [
    "DegenerateFormError",
    "Form",
    "FormError",
    "basis",
    "brute_wedge",
    "conjugate",
    "power",
    "top_ratio",
    "wedge",
    "HRReport",
    "Verdict",
    "certify",
    "certify_classical",
    "certify_mixed_sum",
    "certify_timorin",
    "find_counterexample",
    "hr_type_check",
    "primitive_space",
    "q_matrix",
    "HermitianCoefficientMatrix",
    "NotPositiveError",
    "StrongPositivityDecomposition",
    "form_from_matrix",
    "matrix_from_form",
    "michelsohn_root",
    "random_positive",
    "strongly_positive_form",
]
