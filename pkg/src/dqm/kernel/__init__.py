"""Scalar arithmetic, polynomials, linear algebra and special functions."""
from .linalg import (eig_symmetric, matrix_function, max_abs, solve_linear,
                     structure_of, to_float_array)
from .poly import Poly1, interpolate_poly
from .scalar import (QQi, exact_sqrt, gaussian, imag_unit, is_exact,
                     magnitude, parse_scalar, to_exact, to_float)
from .special import log_gamma_complex, pochhammer, q_pochhammer

__all__ = [
    "QQi", "gaussian", "is_exact", "to_exact", "to_float", "magnitude",
    "imag_unit", "exact_sqrt", "parse_scalar",
    "Poly1", "interpolate_poly",
    "solve_linear", "eig_symmetric", "matrix_function", "structure_of",
    "to_float_array", "max_abs",
    "pochhammer", "q_pochhammer", "log_gamma_complex",
]
