"""Exact Gaussian-rational scalars and helpers for mixed exact/float code.

Exact mode uses :class:`fractions.Fraction` for real values and
:class:`QQi` for values with a non-zero imaginary part.  Float mode uses
Python ``float``/``complex``.  Arithmetic between the two exact types is
closed, and any operation with a float drops to ``complex``.
"""
from __future__ import annotations

import math
import numbers
import re
from fractions import Fraction

__all__ = [
    "QQi",
    "gaussian",
    "is_exact",
    "to_exact",
    "to_float",
    "magnitude",
    "imag_unit",
    "exact_sqrt",
    "parse_scalar",
]

_RATIONAL = (int, Fraction)


class QQi:
    """Gaussian rational ``re + im*i`` with :class:`Fraction` parts.

    Use :func:`gaussian` to build values: it returns a plain ``Fraction``
    when the imaginary part vanishes, which keeps real computations fast.
    """

    __slots__ = ("real", "imag")

    def __init__(self, re_part, im_part=0):
        object.__setattr__(self, "real", Fraction(re_part))
        object.__setattr__(self, "imag", Fraction(im_part))

    def __setattr__(self, name, value):
        raise AttributeError("QQi is immutable")

    # -- conversion -----------------------------------------------------
    def __complex__(self):
        return complex(float(self.real), float(self.imag))

    def __repr__(self):
        return f"QQi({self.real}, {self.imag})"

    def __str__(self):
        sign = "+" if self.imag >= 0 else "-"
        return f"{self.real}{sign}{abs(self.imag)}i"

    def __hash__(self):
        if self.imag == 0:
            return hash(self.real)
        return hash((self.real, self.imag))

    def __bool__(self):
        return bool(self.real) or bool(self.imag)

    def conjugate(self):
        return gaussian(self.real, -self.imag)

    def __abs__(self):
        return math.hypot(float(self.real), float(self.imag))

    # -- arithmetic -----------------------------------------------------
    @staticmethod
    def _coerce(other):
        if isinstance(other, QQi):
            return other.real, other.imag
        if isinstance(other, _RATIONAL):
            return Fraction(other), Fraction(0)
        return None

    def __eq__(self, other):
        parts = self._coerce(other)
        if parts is None:
            if isinstance(other, numbers.Complex):
                return complex(self) == complex(other)
            return NotImplemented
        return self.real == parts[0] and self.imag == parts[1]

    def __neg__(self):
        return gaussian(-self.real, -self.imag)

    def __pos__(self):
        return self

    def __add__(self, other):
        parts = self._coerce(other)
        if parts is None:
            if isinstance(other, numbers.Complex):
                return complex(self) + other
            return NotImplemented
        return gaussian(self.real + parts[0], self.imag + parts[1])

    __radd__ = __add__

    def __sub__(self, other):
        parts = self._coerce(other)
        if parts is None:
            if isinstance(other, numbers.Complex):
                return complex(self) - other
            return NotImplemented
        return gaussian(self.real - parts[0], self.imag - parts[1])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        parts = self._coerce(other)
        if parts is None:
            if isinstance(other, numbers.Complex):
                return complex(self) * other
            return NotImplemented
        c, d = parts
        a, b = self.real, self.imag
        return gaussian(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def _inverse(self):
        den = self.real * self.real + self.imag * self.imag
        if den == 0:
            raise ZeroDivisionError("QQi division by zero")
        return gaussian(self.real / den, -self.imag / den)

    def __truediv__(self, other):
        parts = self._coerce(other)
        if parts is None:
            if isinstance(other, numbers.Complex):
                return complex(self) / other
            return NotImplemented
        return self * QQi(*parts)._inverse()

    def __rtruediv__(self, other):
        parts = self._coerce(other)
        if parts is None:
            if isinstance(other, numbers.Complex):
                return other / complex(self)
            return NotImplemented
        return self._inverse() * QQi(*parts)

    def __pow__(self, exponent):
        if not isinstance(exponent, int):
            return complex(self) ** exponent
        if exponent < 0:
            return self._inverse() ** (-exponent)
        result, base = Fraction(1), self
        while exponent:
            if exponent & 1:
                result = base * result
            base = base * base
            exponent >>= 1
        return result


numbers.Complex.register(QQi)


def gaussian(re_part, im_part=0):
    """Exact Gaussian rational, demoted to ``Fraction`` when real."""
    im_part = Fraction(im_part)
    if im_part == 0:
        return Fraction(re_part)
    return QQi(re_part, im_part)


def is_exact(value) -> bool:
    return isinstance(value, (int, Fraction, QQi))


def to_exact(value):
    """Convert ints, Fractions, rational strings or short floats to exact form.

    Floats go through their shortest ``repr`` so ``1.5`` becomes ``3/2``
    and ``0.1`` becomes ``1/10`` instead of the binary expansion.
    """
    if isinstance(value, (Fraction, QQi)):
        return value
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(repr(value))
    if isinstance(value, complex):
        return gaussian(to_exact(value.real), to_exact(value.imag))
    if isinstance(value, str):
        return parse_scalar(value, exact=True)
    raise TypeError(f"cannot convert {value!r} to an exact scalar")


def to_float(value):
    """Float (or complex, if the imaginary part is non-zero) image of a scalar."""
    if isinstance(value, QQi):
        return complex(value)
    if isinstance(value, complex):
        return value
    return float(value)


def magnitude(value) -> float:
    return abs(complex(value)) if isinstance(value, QQi) else float(abs(value))


def imag_unit(exact: bool):
    return QQi(0, 1) if exact else 1j


def exact_sqrt(value):
    """Square root of a non-negative Fraction if it is a perfect square, else None."""
    value = Fraction(value)
    if value < 0:
        return None
    n, d = value.numerator, value.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


_COMPLEX_RE = re.compile(
    r"^\s*(?P<re>[+-]?[0-9./eE]+(?![0-9./eE]*[ij]))?\s*"
    r"(?:(?P<sign>[+-])?\s*(?P<im>[0-9./eE]*)\s*\*?\s*[ij])?\s*$"
)


def parse_scalar(text: str, exact: bool = True):
    """Parse ``"3/2"``, ``"0.25"``, ``"1/2+1/3i"`` or ``"2-1j"``.

    Raises ``ValueError`` on anything else.
    """
    text = text.strip()
    if not text:
        raise ValueError("empty scalar")
    try:
        value = Fraction(text)
    except ValueError:
        value = None
    if value is not None:
        return value if exact else float(value)
    m = _COMPLEX_RE.match(text)
    if not m or (m.group("re") is None and "i" not in text and "j" not in text):
        raise ValueError(f"cannot parse scalar {text!r}")
    re_part = Fraction(m.group("re")) if m.group("re") else Fraction(0)
    im_txt = m.group("im")
    im_part = Fraction(im_txt) if im_txt else Fraction(1)
    if m.group("sign") == "-":
        im_part = -im_part
    if exact:
        return gaussian(re_part, im_part)
    return complex(float(re_part), float(im_part))
