"""Orthogonality of the eigenpolynomials under the ground-state weight.

rdQM: exact weighted sums over the lattice.  pdQM/oQM: numerical
quadrature (``scipy.integrate.quad``) of ``phi0(x)^2 P_n(eta(x)) P_m(eta(x))``
over the model's x-domain.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np
from scipy import integrate

from .errors import ValidationError
from .kernel import magnitude, to_float
from .models.base import Model
from .models.catalog import exact_twin
from .polyop import eigenpolynomials

__all__ = ["Gram", "lattice_gram", "quadrature_gram", "DOMAINS"]

# x-domains of the continuous models
DOMAINS = {
    "hermite": (-math.inf, math.inf),
    "laguerre": (0.0, math.inf),
    "jacobi": (0.0, math.pi / 2),
    "continuous_hahn": (-math.inf, math.inf),
    "wilson": (0.0, math.inf),
    "askey_wilson": (0.0, math.pi),
}


@dataclass
class Gram:
    matrix: np.ndarray        # object dtype for exact sums
    exact: bool

    def normalized_offdiag(self) -> float:
        """max |G_nm| / sqrt(G_nn G_mm) over n != m."""
        n = self.matrix.shape[0]
        worst = 0.0
        for i in range(n):
            for j in range(n):
                if i != j:
                    den = math.sqrt(magnitude(self.matrix[i, i]) * magnitude(self.matrix[j, j]))
                    worst = max(worst, magnitude(self.matrix[i, j]) / den)
        return worst

    def max_offdiag(self):
        """Largest off-diagonal entry (exact value in exact mode)."""
        n = self.matrix.shape[0]
        vals = [self.matrix[i, j] for i in range(n) for j in range(n) if i != j]
        return max(vals, key=magnitude, default=0)


def lattice_gram(model: Model, n_max: Optional[int] = None) -> Gram:
    """``sum_x phi0(x)^2 P_n(eta(x)) P_m(eta(x))`` for n, m <= n_max (default N).

    Float models sum in floating point; the values P_n(eta(x)) come from
    the exact twin and are rounded, since float monomial expansions cancel
    catastrophically at high degree.
    """
    if model.kind != "rdQM":
        raise ValidationError(f"{model.family} is not a finite real-shift model")
    n_max = model.N if n_max is None else n_max
    twin = exact_twin(model)
    polys = eigenpolynomials(twin, n_max)
    xs = [Fraction(x) for x in range(model.N + 1)]
    w = [model.product_weight(x) for x in range(model.N + 1)]
    vals = [[p(twin.eta(x)) for x in xs] for p in polys]
    if not model.exact:
        vals = [[to_float(v) for v in row] for row in vals]
    size = n_max + 1
    g = np.empty((size, size), dtype=object)
    for i in range(size):
        for j in range(size):
            g[i, j] = sum((w[x] * vals[i][x] * vals[j][x] for x in range(len(xs))), 0 * model.one)
    return Gram(g, model.exact)


def _coord_eta(model: Model, x: float) -> float:
    """eta as a function of the real x (trigonometric models use z = e^{ix})."""
    c = model.coordinate
    if c.variable == "z":
        return to_float(c.eta(complex(math.cos(x), math.sin(x)))).real
    return float(to_float(c.eta(x)))


def quadrature_gram(model: Model, n_max: int = 5, epsabs: float = 0.0,
                    epsrel: float = 1e-11, limit: int = 400) -> Gram:
    """Gram matrix of P_0..P_n_max by adaptive quadrature against ``model.weight``."""
    if model.kind == "rdQM":
        raise ValidationError("use lattice_gram for finite lattices")
    lo, hi = DOMAINS[model.family]
    polys = [p.map(lambda c: complex(to_float(c))) for p in eigenpolynomials(exact_twin(model), n_max)]
    size = n_max + 1
    g = np.zeros((size, size))
    for i in range(size):
        for j in range(i, size):
            def f(x, i=i, j=j):
                e = _coord_eta(model, x)
                return (model.weight(x) * polys[i](e) * polys[j](e).conjugate()).real
            with warnings.catch_warnings():
                # off-diagonal integrals are ~0, so the relative target is unreachable there
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                val, _ = integrate.quad(f, lo, hi, epsabs=epsabs, epsrel=epsrel, limit=limit)
            g[i, j] = g[j, i] = val
    return Gram(g, False)
