"""Pochhammer symbols, q-Pochhammer products and complex log-gamma."""
from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
from scipy.special import loggamma

from ..errors import DomainError

__all__ = ["pochhammer", "q_pochhammer", "log_gamma_complex",
           "QPROD_TOL", "QPROD_MAX_FACTORS"]

QPROD_TOL = 1e-16
QPROD_MAX_FACTORS = 10**5


def pochhammer(a, n: int):
    """Rising factorial a(a+1)...(a+n-1); 1 for n == 0."""
    if n < 0:
        raise ValueError("n must be non-negative")
    result = Fraction(1) if not isinstance(a, float) else 1.0
    for k in range(n):
        result = result * (a + k)
    return result


def q_pochhammer(a, q, n=math.inf, tol: float = QPROD_TOL,
                 max_factors: int = QPROD_MAX_FACTORS):
    """Product prod_{k<n} (1 - a q^k); ``n = math.inf`` for the infinite product.

    The infinite product stops once |a q^k| < tol, i.e. once the next
    factor changes the result by less than ``tol`` relatively, or after
    ``max_factors`` factors.
    """
    if n != math.inf:
        if n < 0:
            raise ValueError("n must be non-negative")
        result = Fraction(1) if not isinstance(a, (float, complex)) else 1.0
        term = a
        for _ in range(int(n)):
            result = result * (1 - term)
            term = term * q
        return result
    if abs(q) >= 1:
        raise DomainError(f"infinite q-product needs |q| < 1, got q={q!r}")
    a = complex(a)
    q = complex(q)
    result = 1.0 + 0j
    term = a
    for _ in range(max_factors):
        if abs(term) < tol:
            break
        result *= 1 - term
        term *= q
    return result.real if result.imag == 0 else result


def log_gamma_complex(s):
    """Principal branch of log Gamma(s) for complex s (scipy backend)."""
    s = complex(s)
    if s.imag == 0 and s.real <= 0 and s.real == math.floor(s.real):
        raise DomainError(f"log Gamma has a pole at {s.real:g}")
    return complex(loggamma(np.complex128(s)))
