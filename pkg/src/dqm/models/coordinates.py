"""Shift kinds and sinusoidal coordinates.

Every coordinate is evaluated through an *evaluation variable* ``u``:
``u = x`` for the polynomial coordinates and ``u = z = e^{ix}`` for the
trigonometric ones (Jacobi, Askey-Wilson).  In ``z`` a pure imaginary
shift ``x -> x - i*gamma`` becomes the rational map ``z -> q z`` with
``q = e^gamma``, so identities can be checked exactly at real rational
``z`` by analytic continuation.
"""
from __future__ import annotations

import cmath
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional

from ..kernel import Poly1, exact_sqrt, imag_unit, is_exact

__all__ = [
    "ShiftKind", "SinusoidalCoordinate",
    "LinearCoordinate", "QuadraticCoordinate", "Cos2xCoordinate",
    "CosCoordinate", "RacahCoordinate", "QRacahCoordinate",
    "OQM", "pdqm_shift", "pdqm_q_shift", "rdqm_shift",
]


@dataclass(frozen=True)
class ShiftKind:
    """Which shift operator the Hamiltonian uses.

    ``gamma`` is the real pdQM shift; for z-variable coordinates ``q`` holds
    ``e^gamma`` so that the shift is multiplicative.  ``N`` is the rdQM
    lattice size (``None`` when a lattice is not attached).
    """

    kind: str
    gamma: object = None
    q: object = None
    N: Optional[int] = None

    def __post_init__(self):
        if self.kind not in ("oQM", "pdQM", "rdQM"):
            raise ValueError(f"unknown shift kind {self.kind!r}")
        if self.kind == "pdQM" and self.gamma is None and self.q is None:
            raise ValueError("pdQM needs a nonzero real gamma (or q = e^gamma)")
        if self.kind == "pdQM" and self.gamma is not None and self.gamma == 0:
            raise ValueError("pdQM gamma must be nonzero")
        if self.kind == "rdQM" and self.N is not None and self.N < 0:
            raise ValueError("rdQM lattice size N must be non-negative")

    @property
    def eps(self) -> int:
        """Overall sign of the similarity-transformed Hamiltonian."""
        return -1 if self.kind == "rdQM" else 1

    @property
    def beta(self):
        if self.kind == "rdQM":
            return 1j
        if self.kind == "pdQM":
            return self.gamma if self.gamma is not None else math.log(float(self.q))
        return None


OQM = ShiftKind("oQM")


def pdqm_shift(gamma=Fraction(1)) -> ShiftKind:
    return ShiftKind("pdQM", gamma=gamma)


def pdqm_q_shift(q) -> ShiftKind:
    return ShiftKind("pdQM", gamma=None, q=q)


def rdqm_shift(N=None) -> ShiftKind:
    return ShiftKind("rdQM", N=N)


@dataclass(frozen=True)
class SinusoidalCoordinate:
    """Base class; subclasses give ``eta`` and the oQM derivative data."""

    variable = "x"
    name = "coordinate"

    def eta(self, u):
        raise NotImplementedError

    # -- shifts ---------------------------------------------------------
    def shifted(self, u, s, shift: ShiftKind):
        """Evaluation variable of ``x - s*i*beta``; ``s`` may be +-1 or +-1/2."""
        if shift.kind == "rdQM":
            return u + s
        if shift.kind != "pdQM":
            raise ValueError("oQM has no shift operator")
        if self.variable == "z":
            return u * _q_power(shift.q, s, exact=is_exact(u))
        exact = is_exact(u) and is_exact(shift.gamma)
        return u - s * imag_unit(exact) * shift.gamma

    def eta_shifted(self, u, s, shift: ShiftKind):
        return self.eta(self.shifted(u, s, shift))

    # -- oQM derivative data -------------------------------------------
    def d_eta(self, u):
        raise NotImplementedError(f"{self.name} has no oQM derivative data")

    def d2_eta(self, u):
        raise NotImplementedError(f"{self.name} has no oQM derivative data")

    @property
    def kinetic(self) -> Poly1:
        """eta'(x)^2 as a polynomial in eta."""
        raise NotImplementedError(f"{self.name} has no oQM derivative data")

    # -- evaluation variable ---------------------------------------------
    def from_x(self, x):
        return x

    def candidates(self, exact: bool, shift: ShiftKind) -> Iterator:
        """Deterministic sample points with pairwise distinct eta values."""
        k = 0
        while True:
            if shift.kind == "pdQM":
                v = Fraction(k + 1, 2)
            else:
                v = Fraction(k)
            yield v if exact else float(v)
            k += 1

    def random_point(self, rng: random.Random, exact: bool, shift: ShiftKind):
        v = Fraction(rng.randint(-40, 40), rng.randint(1, 9))
        return v if exact else float(v)


def _q_power(q, s, exact: bool):
    if s == int(s):
        return q ** int(s)
    if s in (Fraction(1, 2), Fraction(-1, 2), 0.5, -0.5):
        root = exact_sqrt(q) if exact and is_exact(q) else None
        if root is None:
            root = math.sqrt(float(q))
        return root if s > 0 else 1 / root
    raise ValueError(f"unsupported shift multiple {s!r}")


@dataclass(frozen=True)
class LinearCoordinate(SinusoidalCoordinate):
    """eta(x) = x."""

    name = "x"

    def eta(self, u):
        return u

    def d_eta(self, u):
        return Fraction(1) if is_exact(u) else 1.0

    def d2_eta(self, u):
        return Fraction(0) if is_exact(u) else 0.0

    @property
    def kinetic(self):
        return Poly1((Fraction(1),))


@dataclass(frozen=True)
class QuadraticCoordinate(SinusoidalCoordinate):
    """eta(x) = x^2."""

    name = "x^2"

    def eta(self, u):
        return u * u

    def d_eta(self, u):
        return 2 * u

    def d2_eta(self, u):
        return Fraction(2) if is_exact(u) else 2.0

    @property
    def kinetic(self):
        return Poly1((0, Fraction(4)))

    def candidates(self, exact, shift):
        k = 1
        while True:
            v = Fraction(k, 2) if shift.kind == "pdQM" else Fraction(k)
            yield v if exact else float(v)
            k += 1

    def random_point(self, rng, exact, shift):
        v = Fraction(rng.randint(1, 60), rng.randint(1, 9))
        return v if exact else float(v)


def _z_candidates(exact):
    k = 2
    while True:
        yield Fraction(k) if exact else float(k)
        k += 1


def _z_random(rng, exact):
    v = Fraction(rng.randint(2, 60), rng.randint(1, 7)) * rng.choice((1, -1))
    return v if exact else float(v)


@dataclass(frozen=True)
class Cos2xCoordinate(SinusoidalCoordinate):
    """eta(x) = cos 2x, evaluated through z = e^{ix}."""

    variable = "z"
    name = "cos 2x"

    def eta(self, z):
        z2 = z * z
        return (z2 + 1 / z2) / 2

    def d_eta(self, z):
        # -2 sin 2x
        z2 = z * z
        return imag_unit(is_exact(z)) * (z2 - 1 / z2)

    def d2_eta(self, z):
        return -4 * self.eta(z)

    @property
    def kinetic(self):
        return Poly1((Fraction(4), 0, Fraction(-4)))

    def from_x(self, x):
        return cmath.exp(1j * x)

    def candidates(self, exact, shift):
        return _z_candidates(exact)

    def random_point(self, rng, exact, shift):
        return _z_random(rng, exact)


@dataclass(frozen=True)
class CosCoordinate(SinusoidalCoordinate):
    """eta(x) = cos x, evaluated through z = e^{ix}."""

    variable = "z"
    name = "cos x"

    def eta(self, z):
        return (z + 1 / z) / 2

    def d_eta(self, z):
        return imag_unit(is_exact(z)) * (z - 1 / z) / 2

    def d2_eta(self, z):
        return -self.eta(z)

    @property
    def kinetic(self):
        return Poly1((Fraction(1), 0, Fraction(-1)))

    def from_x(self, x):
        return cmath.exp(1j * x)

    def candidates(self, exact, shift):
        return _z_candidates(exact)

    def random_point(self, rng, exact, shift):
        return _z_random(rng, exact)


@dataclass(frozen=True)
class RacahCoordinate(SinusoidalCoordinate):
    """eta(x) = x(x + d)."""

    d: object = Fraction(1)
    name = "x(x+d)"

    def eta(self, u):
        return u * (u + self.d)


@dataclass(frozen=True)
class QRacahCoordinate(SinusoidalCoordinate):
    """eta(x) = (q^{-x} - 1)(1 - d q^x); sampled at integer x only."""

    q: object = Fraction(1, 2)
    d: object = Fraction(1, 2)
    name = "(q^-x - 1)(1 - d q^x)"

    def eta(self, u):
        qx = self.q ** u
        return (1 / qx - 1) * (1 - self.d * qx)

    def random_point(self, rng, exact, shift):
        v = rng.randint(-6, 20)
        return Fraction(v) if exact else float(v)
