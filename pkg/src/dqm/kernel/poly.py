"""Univariate polynomials over exact or float scalars, and interpolation."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from ..errors import InterpolationError
from .scalar import is_exact, magnitude

__all__ = ["Poly1", "interpolate_poly", "INTERP_SPACING_TOL"]

# minimum abscissa spacing accepted in float mode
INTERP_SPACING_TOL = 1e-12


def _promote(v):
    return Fraction(v) if isinstance(v, int) else v


def _is_zero(c) -> bool:
    return c == 0


@dataclass(frozen=True)
class Poly1:
    """Polynomial with coefficients stored lowest degree first.

    Trailing exact zeros are stripped on construction, so ``degree`` is
    ``len(coeffs) - 1`` and the zero polynomial has degree ``-1``.
    """

    coeffs: tuple = ()
    var: str = "eta"

    def __post_init__(self):
        cs = list(self.coeffs)
        while cs and _is_zero(cs[-1]):
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def monomial(cls, n: int, var: str = "eta", one=Fraction(1)):
        return cls((0,) * n + (one,), var)

    @classmethod
    def constant(cls, c, var: str = "eta"):
        return cls((c,), var)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, k: int):
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else 0

    @property
    def leading(self):
        return self.coeffs[-1] if self.coeffs else 0

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def _other(self, other):
        if isinstance(other, Poly1):
            return other
        return Poly1((other,), self.var)

    def __add__(self, other):
        other = self._other(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Poly1(tuple(self.coeff(k) + other.coeff(k) for k in range(n)), self.var)

    __radd__ = __add__

    def __neg__(self):
        return Poly1(tuple(-c for c in self.coeffs), self.var)

    def __sub__(self, other):
        return self + (-self._other(other))

    def __rsub__(self, other):
        return self._other(other) - self

    def __mul__(self, other):
        if not isinstance(other, Poly1):
            return Poly1(tuple(c * other for c in self.coeffs), self.var)
        if not self.coeffs or not other.coeffs:
            return Poly1((), self.var)
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if _is_zero(a):
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly1(tuple(out), self.var)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        result = Poly1((Fraction(1),), self.var)
        for _ in range(n):
            result = result * self
        return result

    def derivative(self):
        return Poly1(tuple(k * c for k, c in enumerate(self.coeffs) if k), self.var)

    def compose(self, inner: "Poly1"):
        acc = Poly1((), inner.var)
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def truncate(self, degree: int):
        """Part of degree <= ``degree``."""
        return Poly1(self.coeffs[: degree + 1], self.var)

    def max_abs_coeff(self, above: int = -1) -> float:
        """Largest coefficient magnitude of degree > ``above`` (0.0 if none)."""
        return max((magnitude(c) for c in self.coeffs[above + 1:]), default=0.0)

    def monic(self):
        if not self.coeffs:
            raise ZeroDivisionError("zero polynomial has no leading coefficient")
        lead = self.coeffs[-1]
        return Poly1(tuple(c / lead for c in self.coeffs), self.var)

    def map(self, f):
        return Poly1(tuple(f(c) for c in self.coeffs), self.var)

    def __eq__(self, other):
        if isinstance(other, Poly1):
            return self.coeffs == other.coeffs
        return self == self._other(other)

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly1({list(self.coeffs)!r}, var={self.var!r})"


def _newton_to_monomial(xs: Sequence, dd: Sequence) -> list:
    """Expand the Newton form sum dd[k] * prod_{j<k}(x - xs[j])."""
    coeffs = [dd[-1]]
    for k in range(len(dd) - 2, -1, -1):
        # coeffs <- coeffs * (x - xs[k]) + dd[k]
        new = [0] * (len(coeffs) + 1)
        for i, c in enumerate(coeffs):
            new[i + 1] = new[i + 1] + c
            new[i] = new[i] - c * xs[k]
        new[0] = new[0] + dd[k]
        coeffs = new
    return coeffs


def interpolate_poly(
    points: Iterable[tuple],
    degree_bound: int,
    var: str = "eta",
    tol: float = 1e-9,
) -> Poly1:
    """Unique polynomial of degree <= ``degree_bound`` through ``points``.

    The first ``degree_bound + 1`` points define the polynomial (Newton
    divided differences); any further points are checked against it.  In
    exact mode a nonzero check residual raises; in float mode the residual
    must stay below ``tol`` relative to the data scale.
    """
    pts = [(_promote(x), _promote(y)) for x, y in points]
    if len(pts) < degree_bound + 1:
        raise InterpolationError(
            f"need at least {degree_bound + 1} points, got {len(pts)}")
    exact = all(is_exact(x) and is_exact(y) for x, y in pts)
    xs_all = [x for x, _ in pts]
    for i in range(len(xs_all)):
        for j in range(i):
            if exact:
                same = xs_all[i] == xs_all[j]
            else:
                same = abs(complex(xs_all[i]) - complex(xs_all[j])) < INTERP_SPACING_TOL
            if same:
                raise InterpolationError(
                    f"duplicate abscissae at positions {j} and {i}: {xs_all[i]!r}")

    base = pts[: degree_bound + 1]
    xs = [x for x, _ in base]
    dd = [y for _, y in base]
    for level in range(1, len(xs)):
        for i in range(len(xs) - 1, level - 1, -1):
            dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - level])
    poly = Poly1(tuple(_newton_to_monomial(xs, dd)), var)

    extra = pts[degree_bound + 1:]
    if extra:
        residuals = [y - poly(x) for x, y in extra]
        if exact:
            bad = [r for r in residuals if r != 0]
            if bad:
                worst = max(magnitude(r) for r in bad)
                raise InterpolationError(
                    f"data inconsistent with degree {degree_bound}: "
                    f"max residual {worst:.3e}", residual=worst)
        else:
            scale = max(1.0, max(magnitude(y) for _, y in pts))
            worst = max(magnitude(r) for r in residuals)
            if worst > tol * scale:
                raise InterpolationError(
                    f"data inconsistent with degree {degree_bound}: "
                    f"max residual {worst:.3e}", residual=worst)
    return poly
