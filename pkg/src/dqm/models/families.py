"""The nine catalog families.

Each class is a frozen dataclass whose fields are the family parameters.
Range constraints are enforced on construction, so :meth:`Model.shifted`
also checks that the shifted parameters stay admissible.
"""
from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from itertools import combinations

from ..errors import DomainError, ValidationError
from ..kernel import (Poly1, exact_sqrt, is_exact, log_gamma_complex,
                      pochhammer, q_pochhammer, to_float)
from .base import ClosureData, Model, conj, require
from .coordinates import (OQM, Cos2xCoordinate, CosCoordinate,
                          LinearCoordinate, QRacahCoordinate,
                          QuadraticCoordinate, RacahCoordinate, ShiftKind,
                          pdqm_q_shift, pdqm_shift, rdqm_shift)

__all__ = [
    "Hermite", "Laguerre", "Jacobi", "ContinuousHahn", "Wilson",
    "AskeyWilson", "Hahn", "Racah", "QRacah",
]


def _y(*coeffs) -> Poly1:
    return Poly1(tuple(coeffs), "y")


def _real(v) -> float:
    v = to_float(v)
    if isinstance(v, complex):
        return v.real
    return v


def _require_real(name, v):
    if isinstance(v, complex) or (hasattr(v, "imag") and v.imag != 0):
        raise ValidationError(f"{name} must be real (got {v})")


def _elementary(values, k):
    """k-th elementary symmetric function."""
    total = 0
    for combo in combinations(values, k):
        term = 1
        for c in combo:
            term = term * c
        total = total + term
    return total


def _conjugation_closed(values) -> bool:
    if all(is_exact(v) for v in values):
        key = lambda v: (v.real, getattr(v, "imag", 0))
        return Counter(map(key, values)) == Counter(map(key, (conj(v) for v in values)))
    rest = [complex(to_float(v)) for v in values]
    for v in [complex(to_float(v)) for v in values]:
        target = v.conjugate()
        match = next((i for i, w in enumerate(rest)
                      if abs(w - target) <= 1e-12 * max(1.0, abs(v))), None)
        if match is None:
            return False
        rest.pop(match)
    return True


def _sqrt_q(q):
    if is_exact(q):
        r = exact_sqrt(q)
        if r is not None:
            return r
    return math.sqrt(float(q))


def _as_int_N(N):
    if isinstance(N, float):
        if N != int(N):
            raise ValidationError(f"N must be an integer (got {N})")
        return int(N)
    if isinstance(N, Fraction):
        if N.denominator != 1:
            raise ValidationError(f"N must be an integer (got {N})")
        return int(N)
    if not isinstance(N, int):
        raise ValidationError(f"N must be an integer (got {N!r})")
    return N


# ---------------------------------------------------------------------------
# ordinary QM


@dataclass(frozen=True)
class _OQMModel(Model):
    kind = "oQM"

    @property
    def shift(self) -> ShiftKind:
        return OQM

    def w_prime(self, u):
        raise NotImplementedError

    def w_second(self, u):
        raise NotImplementedError

    @property
    def drift(self) -> Poly1:
        """eta'' + 2 w' eta' as a polynomial in eta."""
        raise NotImplementedError

    @property
    def kinetic(self) -> Poly1:
        return self.coordinate.kinetic

    def _v_plus(self, u):
        return self.w_prime(u)

    def _v_minus(self, u):
        return self.one

    def potential_U(self, u):
        """U = w'^2 + w''."""
        wp = self.w_prime(u)
        return wp * wp + self.w_second(u)


@dataclass(frozen=True)
class Hermite(_OQMModel):
    family = "hermite"

    @property
    def exact(self) -> bool:
        return True

    @cached_property
    def coordinate(self):
        return LinearCoordinate()

    def w_prime(self, u):
        return -u

    def w_second(self, u):
        return -1 * (Fraction(1) if is_exact(u) else 1.0)

    @property
    def drift(self):
        return Poly1((0, Fraction(-2)))

    def _energy(self, n):
        return Fraction(2 * n)

    def closure_table(self):
        return ClosureData(_y(Fraction(4)), _y(), _y())

    def weight(self, x):
        return math.exp(-float(x) ** 2)


@dataclass(frozen=True)
class Laguerre(_OQMModel):
    g: object = Fraction(2)
    family = "laguerre"

    def validate(self):
        _require_real("g", self.g)
        require(self.g > 1, "g>1", g=self.g)

    @cached_property
    def coordinate(self):
        return QuadraticCoordinate()

    def w_prime(self, u):
        return -u + self.g / u

    def w_second(self, u):
        return -1 - self.g / (u * u)

    @property
    def drift(self):
        return Poly1((2 + 4 * self.g, -4 * self.one))

    def _energy(self, n):
        return 4 * n * self.one

    @property
    def delta(self):
        return {"g": 1}

    def _shift_once(self):
        return replace(self, g=self.g + 1)

    def closure_table(self):
        return ClosureData(_y(16 * self.one), _y(), _y(-8 * (2 * self.g + 1), -8 * self.one))

    def weight(self, x):
        x = float(x)
        return math.exp(-x * x) * x ** (2 * float(self.g))


@dataclass(frozen=True)
class Jacobi(_OQMModel):
    g: object = Fraction(2)
    h: object = Fraction(3)
    family = "jacobi"

    def validate(self):
        _require_real("g", self.g)
        _require_real("h", self.h)
        require(self.g > 1, "g>1", g=self.g)
        require(self.h > 1, "h>1", h=self.h)

    @cached_property
    def coordinate(self):
        return Cos2xCoordinate()

    def _sin_cos(self, z):
        i = self.I if is_exact(z) else 1j
        return (z - 1 / z) / (2 * i), (z + 1 / z) / 2

    def w_prime(self, z):
        s, c = self._sin_cos(z)
        return self.g * c / s - self.h * s / c

    def w_second(self, z):
        s, c = self._sin_cos(z)
        return -self.g / (s * s) - self.h / (c * c)

    @property
    def drift(self):
        return Poly1((-4 * (self.g - self.h), -4 * (1 + self.g + self.h)))

    def _energy(self, n):
        return 4 * n * (n + self.g + self.h)

    @property
    def delta(self):
        return {"g": 1, "h": 1}

    def _shift_once(self):
        return replace(self, g=self.g + 1, h=self.h + 1)

    def closure_table(self):
        gh = self.g + self.h
        return ClosureData(_y(16 * gh * gh, 16 * self.one), _y(),
                           _y(16 * (self.g - self.h) * (gh - 1)))

    def weight(self, x):
        x = float(x)
        return math.sin(x) ** (2 * float(self.g)) * math.cos(x) ** (2 * float(self.h))


# ---------------------------------------------------------------------------
# pure imaginary shifts


@dataclass(frozen=True)
class _PDQMModel(Model):
    kind = "pdQM"

    @property
    def gamma(self):
        return self.one


@dataclass(frozen=True)
class ContinuousHahn(_PDQMModel):
    a1: object = Fraction(1)
    a2: object = Fraction(1)
    family = "continuous_hahn"
    printed_energy_factor = 4
    printed_energy_note = "printed energy carries an extra factor 4"

    def validate(self):
        for name in ("a1", "a2"):
            v = getattr(self, name)
            require(_real(v.real) > 0, f"Re({name})>0", **{name: v})

    @cached_property
    def coordinate(self):
        return LinearCoordinate()

    @cached_property
    def shift(self):
        return pdqm_shift(self.one)

    @property
    def b1(self):
        return self.a1 + self.a2 + conj(self.a1) + conj(self.a2)

    def derived(self):
        return {"b1": self.b1}

    def _v_plus(self, x):
        i = self.I if is_exact(x) else 1j
        return (self.a1 + i * x) * (self.a2 + i * x)

    def _v_minus(self, x):
        i = self.I if is_exact(x) else 1j
        return (conj(self.a1) - i * x) * (conj(self.a2) - i * x)

    def _energy(self, n):
        return n * (n + self.b1 - 1)

    @property
    def delta(self):
        return {"a1": Fraction(1, 2), "a2": Fraction(1, 2)}

    def _shift_once(self):
        h = Fraction(1, 2) if self.exact else 0.5
        return replace(self, a1=self.a1 + h, a2=self.a2 + h)

    def closure_table(self):
        s = self.a1 + self.a2
        re, im = s.real, s.imag
        im12 = (self.a1 * self.a2).imag
        return ClosureData(_y(4 * re * (re - 1), 4 * self.one), _y(2 * self.one),
                           _y(4 * (re - 1) * im12, 2 * im))

    def weight(self, x):
        x = float(x)
        total = 0j
        for a in (self.a1, self.a2):
            a = complex(to_float(a))
            total += log_gamma_complex(a + 1j * x) + log_gamma_complex(a.conjugate() - 1j * x)
        return math.exp(total.real)


@dataclass(frozen=True)
class Wilson(_PDQMModel):
    a1: object = Fraction(1)
    a2: object = Fraction(1)
    a3: object = Fraction(1)
    a4: object = Fraction(1)
    family = "wilson"
    printed_energy_factor = 4
    printed_energy_note = "printed energy carries an extra factor 4"

    @property
    def a(self):
        return (self.a1, self.a2, self.a3, self.a4)

    def validate(self):
        for k, v in enumerate(self.a, 1):
            require(_real(v.real) > 0, f"Re(a{k})>0", **{f"a{k}": v})
        require(_conjugation_closed(self.a), "{a1*,a2*,a3*,a4*}={a1,a2,a3,a4}")

    @cached_property
    def coordinate(self):
        return QuadraticCoordinate()

    @cached_property
    def shift(self):
        return pdqm_shift(self.one)

    @property
    def b1(self):
        return _elementary(self.a, 1)

    @property
    def b2(self):
        return _elementary(self.a, 2)

    @property
    def b3(self):
        return _elementary(self.a, 3)

    @property
    def b4(self):
        return _elementary(self.a, 4)

    def derived(self):
        return {"b1": self.b1, "b2": self.b2, "b3": self.b3, "b4": self.b4}

    def _v_plus(self, x):
        i = self.I if is_exact(x) else 1j
        num = 1
        for a in self.a:
            num = num * (a + i * x)
        return num / (2 * i * x * (2 * i * x + 1))

    def _v_minus(self, x):
        i = self.I if is_exact(x) else 1j
        num = 1
        for a in self.a:
            num = num * (conj(a) - i * x)
        return num / (-2 * i * x * (-2 * i * x + 1))

    def _energy(self, n):
        return n * (n + self.b1 - 1)

    @property
    def delta(self):
        return {f"a{k}": Fraction(1, 2) for k in range(1, 5)}

    def _shift_once(self):
        h = Fraction(1, 2) if self.exact else 0.5
        return replace(self, a1=self.a1 + h, a2=self.a2 + h, a3=self.a3 + h, a4=self.a4 + h)

    def closure_table(self):
        b1, b2, b3 = self.b1, self.b2, self.b3
        return ClosureData(_y(b1 * (b1 - 2), 4 * self.one), _y(2 * self.one),
                           _y((2 - b1) * b3, b1 - 2 * b2, -2 * self.one))

    def weight(self, x):
        x = float(x)
        total = 0j
        for a in self.a:
            a = complex(to_float(a))
            total += log_gamma_complex(a + 1j * x) + log_gamma_complex(a - 1j * x)
        # 1/(Gamma(2ix) Gamma(-2ix)) = 2x sinh(2 pi x) / pi
        if x == 0:
            raise DomainError("Wilson weight vanishes at x=0 (boundary point)")
        ax = abs(x)
        log_sinh = 2 * math.pi * ax + math.log1p(-math.exp(-4 * math.pi * ax)) - math.log(2)
        return math.exp(total.real + log_sinh + math.log(2 * ax / math.pi))


@dataclass(frozen=True)
class AskeyWilson(_PDQMModel):
    a1: object = Fraction(1, 2)
    a2: object = Fraction(1, 3)
    a3: object = Fraction(1, 5)
    a4: object = Fraction(1, 7)
    q: object = Fraction(1, 4)
    family = "askey_wilson"

    @property
    def a(self):
        return (self.a1, self.a2, self.a3, self.a4)

    def validate(self):
        _require_real("q", self.q)
        require(0 < self.q < 1, "0<q<1", q=self.q)
        for k, v in enumerate(self.a, 1):
            require(abs(complex(to_float(v))) < 1, f"|a{k}|<1", **{f"a{k}": v})
        require(_conjugation_closed(self.a), "{a1*,a2*,a3*,a4*}={a1,a2,a3,a4}")

    @cached_property
    def coordinate(self):
        return CosCoordinate()

    @cached_property
    def shift(self):
        return pdqm_q_shift(self.q)

    @property
    def gamma(self):
        return math.log(float(self.q))

    @property
    def b1(self):
        return _elementary(self.a, 1)

    @property
    def b2(self):
        return _elementary(self.a, 2)

    @property
    def b3(self):
        return _elementary(self.a, 3)

    @property
    def b4(self):
        return _elementary(self.a, 4)

    def derived(self):
        return {"b1": self.b1, "b2": self.b2, "b3": self.b3, "b4": self.b4}

    def _v_plus(self, z):
        num = 1
        for a in self.a:
            num = num * (1 - a * z)
        return num / ((1 - z * z) * (1 - self.q * z * z))

    def _v_minus(self, z):
        num = 1
        for a in self.a:
            num = num * (1 - conj(a) / z)
        return num / ((1 - 1 / (z * z)) * (1 - self.q / (z * z)))

    def _energy(self, n):
        q = self.q
        return (q ** -n - 1) * (1 - self.b4 * q ** (n - 1))

    @property
    def delta(self):
        return {f"a{k}": "q^(1/2)" for k in range(1, 5)}

    @property
    def kappa(self):
        return 1 / self.q

    def _shift_once(self):
        r = _sqrt_q(self.q)
        if is_exact(r):
            return replace(self, a1=self.a1 * r, a2=self.a2 * r, a3=self.a3 * r, a4=self.a4 * r)
        # q is not a rational square: continue in float mode
        f = lambda v: to_float(v) * r
        return replace(self, a1=f(self.a1), a2=f(self.a2), a3=f(self.a3), a4=f(self.a4),
                       q=float(self.q))

    def closure_table(self):
        q = self.q
        k = 1 / q - 2 + q             # (q^{-1/2} - q^{1/2})^2
        b1, b3, b4 = self.b1, self.b3, self.b4
        yp = _y(1 + b4 / q, self.one)  # y' = y + 1 + b4/q
        R1 = yp * k
        R0 = (yp * yp - (1 + 1 / q) ** 2 * b4) * k
        Rm1 = (yp * (b1 + b3 / q) - (1 + 1 / q) * (b3 + b1 * b4 / q)) * (-k / 2)
        return ClosureData(R0, R1, Rm1)

    def weight(self, x):
        x = float(x)
        q = float(self.q)
        z = cmath.exp(1j * x)
        num = q_pochhammer(z * z, q) * q_pochhammer(1 / (z * z), q)
        den = 1
        for a in self.a:
            a = complex(to_float(a))
            den *= q_pochhammer(a * z, q) * q_pochhammer(a / z, q)
        return (num / den).real


# ---------------------------------------------------------------------------
# real shifts


@dataclass(frozen=True)
class _RDQMModel(Model):
    kind = "rdQM"

    @cached_property
    def shift(self):
        return rdqm_shift(self.N)

    def v_minus(self, u):
        # boundary condition; the closed form is 0/0 here at Racah d=1 or q-Racah d=q
        if u == 0:
            return 0 * self.one
        return super().v_minus(u)

    def B(self, x):
        return self.v_plus(x)

    def D(self, x):
        return self.v_minus(x)

    def _check_lattice_N(self):
        object.__setattr__(self, "N", _as_int_N(self.N))
        require(self.N >= 0, "N>=0", N=self.N)

    def product_weight(self, x: int):
        """prod_{y<x} B(y)/D(y+1)."""
        w = self.one
        for y in range(x):
            w = w * self.B(y) / self.D(y + 1)
        return w


@dataclass(frozen=True)
class Hahn(_RDQMModel):
    a: object = Fraction(1)
    b: object = Fraction(1)
    N: int = 1
    family = "hahn"
    printed_energy_factor = 4
    printed_energy_note = "printed energy carries an extra factor 4"

    def validate(self):
        self._check_lattice_N()
        _require_real("a", self.a)
        _require_real("b", self.b)
        require(self.a > 0, "a>0", a=self.a)
        require(self.b > 0, "b>0", b=self.b)

    @property
    def exact(self):
        return is_exact(self.a) and is_exact(self.b)

    @cached_property
    def coordinate(self):
        return LinearCoordinate()

    def _v_plus(self, x):
        return (x + self.a) * (self.N - x)

    def _v_minus(self, x):
        return x * (self.b + self.N - x)

    def _energy(self, n):
        return n * (n + self.a + self.b - 1)

    @property
    def delta(self):
        return {"a": 1, "b": 1, "N": -1}

    def _shift_once(self):
        return replace(self, a=self.a + 1, b=self.b + 1, N=self.N - 1)

    def closure_table(self):
        a, b, N = self.a, self.b, self.N
        return ClosureData(_y((a + b - 2) * (a + b), 4 * self.one), _y(2 * self.one),
                           _y(-a * (a + b - 2) * N, -(2 * N - a + b)))

    def weight(self, x):
        x = int(x)
        a, b, N = self.a, self.b, self.N
        return (math.comb(N, x) * pochhammer(a, x) * pochhammer(b, N - x)
                / pochhammer(b, N))


@dataclass(frozen=True)
class Racah(_RDQMModel):
    a: object = Fraction(7)
    b: object = Fraction(1)
    d: object = Fraction(3, 2)
    N: int = 2
    family = "racah"
    printed_energy_factor = 4
    printed_energy_note = "printed energy carries an extra factor 4"

    def validate(self):
        self._check_lattice_N()
        for name in ("a", "b", "d"):
            _require_real(name, getattr(self, name))
        a, b, d, N = self.a, self.b, self.d, self.N
        require(a >= b, "a>=b", a=a, b=b)
        require(0 < b < 1 + d, "0<b<1+d", b=b, d=d)
        require(d > 0, "d>0", d=d)
        require(a > N + d, "a>N+d", a=a, N=N, d=d)

    @property
    def exact(self):
        return all(is_exact(v) for v in (self.a, self.b, self.d))

    @property
    def c(self):
        return -self.N * self.one

    @property
    def d_tilde(self):
        return self.a + self.b + self.c - self.d - 1

    def derived(self):
        return {"c": self.c, "d_tilde": self.d_tilde}

    @cached_property
    def coordinate(self):
        return RacahCoordinate(self.d)

    def _v_plus(self, x):
        a, b, c, d = self.a, self.b, self.c, self.d
        return -(x + a) * (x + b) * (x + c) * (x + d) / ((2 * x + d) * (2 * x + 1 + d))

    def _v_minus(self, x):
        a, b, c, d = self.a, self.b, self.c, self.d
        return -(x + d - a) * (x + d - b) * (x + d - c) * x / ((2 * x - 1 + d) * (2 * x + d))

    def _energy(self, n):
        return n * (n + self.d_tilde)

    @property
    def delta(self):
        return {"a": 1, "b": 1, "d": 1, "N": -1}

    def _shift_once(self):
        return replace(self, a=self.a + 1, b=self.b + 1, d=self.d + 1, N=self.N - 1)

    def closure_table(self):
        a, b, c, d, dt = self.a, self.b, self.c, self.d, self.d_tilde
        e2 = a * b + b * c + c * a
        return ClosureData(_y(dt * dt - 1, 4 * self.one), _y(2 * self.one),
                           _y(a * b * c * (dt - 1), 2 * e2 - (1 + d) * (1 + dt), 2 * self.one))

    def weight(self, x):
        x = int(x)
        a, b, c, d = self.a, self.b, self.c, self.d
        num = pochhammer(a, x) * pochhammer(b, x) * pochhammer(c, x) * pochhammer(d, x)
        den = (pochhammer(1 + d - a, x) * pochhammer(1 + d - b, x)
               * pochhammer(1 + d - c, x) * pochhammer(1, x))
        return num / den * (2 * x + d) / d


@dataclass(frozen=True)
class QRacah(_RDQMModel):
    a: object = Fraction(3, 8192)
    b: object = Fraction(1, 2)
    d: object = Fraction(3, 4)
    q: object = Fraction(1, 2)
    N: int = 10
    family = "q_racah"
    printed_energy_note = "printed energy has d~ q^(n-1) where B, D and the closure table give d~ q^n"

    def validate(self):
        self._check_lattice_N()
        for name in ("a", "b", "d", "q"):
            _require_real(name, getattr(self, name))
        a, b, d, q, N = self.a, self.b, self.d, self.q, self.N
        require(0 < q < 1, "0<q<1", q=q)
        require(a <= b, "a<=b", a=a, b=b)
        require(0 < d < 1, "0<d<1", d=d)
        require(0 < a < q ** N * d, "0<a<q^N d", a=a, q=q, N=N, d=d)
        require(q * d < b < 1, "qd<b<1", q=q, d=d, b=b)
        require(self.d_tilde < 1 / q, "d~<q^-1", d_tilde=self.d_tilde, q=q)

    @property
    def exact(self):
        return all(is_exact(v) for v in (self.a, self.b, self.d, self.q))

    @property
    def c(self):
        return self.q ** (-self.N)

    @property
    def d_tilde(self):
        return self.a * self.b * self.c / (self.d * self.q)

    def derived(self):
        return {"c": self.c, "d_tilde": self.d_tilde}

    @cached_property
    def coordinate(self):
        return QRacahCoordinate(self.q, self.d)

    def _v_plus(self, x):
        a, b, c, d, q = self.a, self.b, self.c, self.d, self.q
        qx = q ** x
        return -((1 - a * qx) * (1 - b * qx) * (1 - c * qx) * (1 - d * qx)
                 / ((1 - d * qx * qx) * (1 - d * qx * qx * q)))

    def _v_minus(self, x):
        a, b, c, d, q = self.a, self.b, self.c, self.d, self.q
        qx = q ** x
        return -self.d_tilde * ((1 - d * qx / a) * (1 - d * qx / b) * (1 - d * qx / c) * (1 - qx)
                                / ((1 - d * qx * qx / q) * (1 - d * qx * qx)))

    def _energy(self, n):
        q = self.q
        return (q ** -n - 1) * (1 - self.d_tilde * q ** n)

    def _printed_energy(self, n):
        q = self.q
        return (q ** -n - 1) * (1 - self.d_tilde * q ** (n - 1))

    @property
    def delta(self):
        return {"a": "q", "b": "q", "d": "q", "N": -1}

    @property
    def kappa(self):
        return 1 / self.q

    def _shift_once(self):
        q = self.q
        return replace(self, a=self.a * q, b=self.b * q, d=self.d * q, N=self.N - 1)

    def closure_table(self):
        a, b, c, d, q, dt = self.a, self.b, self.c, self.d, self.q, self.d_tilde
        k = 1 / q - 2 + q             # (q^{-1/2} - q^{1/2})^2
        s = 1 / q + 2 + q             # (q^{-1/2} + q^{1/2})^2
        e2 = a * b + b * c + c * a
        yp = _y(1 + dt, self.one)     # y' = y + 1 + d~
        R0 = (yp * yp - s * dt) * k
        R1 = yp * k
        const = ((1 - a) * (1 - b) * (1 - c) * (1 - dt / q)
                 + (a + b + c - 1 - d * dt + e2 / q)) * (1 + dt)
        Rm1 = (yp * yp * (1 + d) - yp * (a + b + c + d + dt + e2 / q) + const) * k
        return ClosureData(R0, R1, Rm1)

    def weight(self, x):
        x = int(x)
        a, b, c, d, q, dt = self.a, self.b, self.c, self.d, self.q, self.d_tilde
        num = (q_pochhammer(a, q, x) * q_pochhammer(b, q, x)
               * q_pochhammer(c, q, x) * q_pochhammer(d, q, x))
        den = (q_pochhammer(d * q / a, q, x) * q_pochhammer(d * q / b, q, x)
               * q_pochhammer(d * q / c, q, x) * q_pochhammer(q, q, x) * dt ** x)
        return num / den * (1 - d * q ** (2 * x)) / (1 - d)
