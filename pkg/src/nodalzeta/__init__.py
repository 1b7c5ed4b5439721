"""Zeta functions of nodal projective hypersurfaces over prime fields."""

from .errors import NodalZetaError
from .exact import NumberField, PrimeField, TruncatedPadic
from .forms import DifferentialForm
from .oracle import ExtensionField, count_points, verify_zeta
from .pipeline import Problem, compute_zeta, validate
from .polynomials import HomogeneousPolynomial, groebner_with_cofactors, parse_polynomial
from .singularities import equisingularity_check, is_odp, tau_count, verify_singular_points
from .spectral import E2Basis, b_formula, e2_basis, koszul_dim
from .zeta import ZetaResult, assemble_zeta

__version__ = "0.1.0"

__all__ = [
    "DifferentialForm",
    "E2Basis",
    "ExtensionField",
    "HomogeneousPolynomial",
    "NodalZetaError",
    "NumberField",
    "PrimeField",
    "Problem",
    "TruncatedPadic",
    "ZetaResult",
    "assemble_zeta",
    "b_formula",
    "compute_zeta",
    "count_points",
    "e2_basis",
    "equisingularity_check",
    "groebner_with_cofactors",
    "is_odp",
    "koszul_dim",
    "parse_polynomial",
    "tau_count",
    "validate",
    "verify_singular_points",
    "verify_zeta",
]
