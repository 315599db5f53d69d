"""Exact and p-adic computations with the Psi series and its Witt-vector structure."""
from .padic import FieldContext, PadicScalar, digit_expansion, from_rational, parse_scalar, teichmuller
from .psi import PsiTable, solve_psi, solve_u
from .polygons import Polygon, closed_form_newton, closed_form_valuation, newton_polygon, valuation_polygon
from .witt import Ring, WittVector, phi_polynomials, witt_add
from .analysis import eval_psi, find_zeros, truncation_bound, witt_bivector_decompose

__all__ = [
    "FieldContext", "PadicScalar", "digit_expansion", "from_rational", "parse_scalar", "teichmuller",
    "PsiTable", "solve_psi", "solve_u",
    "Polygon", "closed_form_newton", "closed_form_valuation", "newton_polygon", "valuation_polygon",
    "Ring", "WittVector", "phi_polynomials", "witt_add",
    "eval_psi", "find_zeros", "truncation_bound", "witt_bivector_decompose",
]
__version__ = "0.1.0"
