"""Model base class and closure data."""
from __future__ import annotations

import random
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from typing import ClassVar, Optional

from ..errors import DomainError, PoleError, ValidationError
from ..kernel import Poly1, imag_unit, is_exact, to_float
from .coordinates import ShiftKind, SinusoidalCoordinate

__all__ = ["ClosureData", "Model", "conj", "real_part", "imag_part", "require"]


def conj(v):
    return v.conjugate()


def real_part(v):
    return v.real


def imag_part(v):
    return v.imag if not isinstance(v, (int, Fraction, float)) else v * 0


def require(condition: bool, inequality: str, **values):
    """Raise ValidationError naming ``inequality`` unless ``condition`` holds."""
    if not condition:
        shown = ", ".join(f"{k}={v}" for k, v in values.items())
        raise ValidationError(f"{inequality} violated" + (f" ({shown})" if shown else ""))


@dataclass(frozen=True)
class ClosureData:
    """Closure polynomials R0, R1, R-1 in the variable y."""

    R0: Poly1
    R1: Poly1
    Rm1: Poly1
    provenance: str = "paper-table"

    def __post_init__(self):
        if self.provenance not in ("paper-table", "fitted"):
            raise ValueError(f"unknown provenance {self.provenance!r}")
        for name, limit in (("R0", 2), ("R1", 1), ("Rm1", 2)):
            p = getattr(self, name)
            if p.degree > limit:
                raise ValueError(f"{name} has degree {p.degree} > {limit}")

    def polys(self):
        return self.R0, self.R1, self.Rm1

    def coefficients(self) -> dict:
        """Flat map like ``{"R0[0]": ..., "R0[1]": ...}`` up to the degree bounds."""
        out = {}
        for name, limit in (("R0", 2), ("R1", 1), ("Rm1", 2)):
            p = getattr(self, name)
            for k in range(limit + 1):
                out[f"{name}[{k}]"] = p.coeff(k)
        return out

    def matches(self, other: "ClosureData", tol: float = 0.0) -> bool:
        a, b = self.coefficients(), other.coefficients()
        if tol == 0.0:
            return all(a[k] == b[k] for k in a)
        return all(abs(complex(to_float(a[k])) - complex(to_float(b[k]))) <= tol for k in a)

    def mismatches(self, other: "ClosureData") -> list:
        a, b = self.coefficients(), other.coefficients()
        return [k for k in a if a[k] != b[k]]


@dataclass(frozen=True)
class Model:
    """One of the nine catalog families with validated parameters.

    Subclasses are frozen dataclasses whose fields are the family
    parameters.  Exact mode means every parameter is an exact scalar.
    """

    family: ClassVar[str] = "model"
    kind: ClassVar[str] = "oQM"
    # reference energies carry an overall factor that H = A^dagger A does not produce
    printed_energy_factor: ClassVar[int] = 1
    # short description of how the printed energy differs (None if it agrees)
    printed_energy_note: ClassVar[Optional[str]] = None

    def __post_init__(self):
        self.validate()

    # -- parameters -------------------------------------------------------
    def params(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.params().values())

    def validate(self):
        pass

    def derived(self) -> dict:
        """Derived quantities such as b1 or d~ (family specific)."""
        return {}

    @property
    def one(self):
        return Fraction(1) if self.exact else 1.0

    @property
    def I(self):
        return imag_unit(self.exact)

    # -- geometry ---------------------------------------------------------
    @property
    def coordinate(self) -> SinusoidalCoordinate:
        raise NotImplementedError

    @property
    def shift(self) -> ShiftKind:
        raise NotImplementedError

    @property
    def eps(self) -> int:
        return self.shift.eps

    @property
    def N(self) -> Optional[int]:
        return None

    def eta(self, u):
        return self.coordinate.eta(u)

    # -- potentials -------------------------------------------------------
    def _v_plus(self, u):
        raise NotImplementedError

    def _v_minus(self, u):
        raise NotImplementedError

    def v_plus(self, u):
        """V(x) for pdQM, B(x) for rdQM, w'(x) for oQM."""
        try:
            return self._v_plus(u)
        except ZeroDivisionError as exc:
            raise PoleError(f"{self.family}: V+ has a pole at {u!r}") from exc

    def v_minus(self, u):
        """V*(x) for pdQM, D(x) for rdQM; oQM returns the constant 1."""
        try:
            return self._v_minus(u)
        except ZeroDivisionError as exc:
            raise PoleError(f"{self.family}: V- has a pole at {u!r}") from exc

    # -- spectrum ---------------------------------------------------------
    def _energy(self, n: int):
        raise NotImplementedError

    def energy(self, n: int, printed: bool = False):
        if n < 0:
            raise DomainError(f"level n={n} must be non-negative")
        if self.N is not None and n > self.N:
            raise DomainError(f"level n={n} exceeds lattice size N={self.N}")
        return self._printed_energy(n) if printed else self._energy(n)

    def _printed_energy(self, n: int):
        return self._energy(n) * self.printed_energy_factor

    @property
    def delta(self) -> dict:
        """Parameter shift applied by :meth:`shifted` (multiplicative for q-families)."""
        return {}

    @property
    def kappa(self):
        return self.one

    def shifted(self, s: int = 1) -> "Model":
        m = self
        for _ in range(s):
            m = m._shift_once()
        return m

    def _shift_once(self) -> "Model":
        return self

    def closure_table(self) -> ClosureData:
        raise NotImplementedError

    def weight(self, x):
        """Squared ground state phi_0(x)^2 at a real point of the domain."""
        raise NotImplementedError

    # -- sampling ---------------------------------------------------------
    def _usable(self, u) -> bool:
        try:
            if self.kind == "oQM":
                self.v_plus(u)
                self.coordinate.d_eta(u)
            else:
                self.v_plus(u)
                self.v_minus(u)
                for s in (1, -1):
                    self.coordinate.eta_shifted(u, s, self.shift)
            self.eta(u)
        except (PoleError, ZeroDivisionError):
            return False
        return True

    def sample_points(self, count: int, exact: Optional[bool] = None,
                      rng: Optional[random.Random] = None) -> list:
        """``count`` evaluation points with distinct eta and no poles.

        Deterministic candidates are used unless ``rng`` is given.
        """
        exact = self.exact if exact is None else exact
        if rng is None:
            source = self.coordinate.candidates(exact, self.shift)
        else:
            source = iter(lambda: self.coordinate.random_point(rng, exact, self.shift), None)
        out, etas = [], []
        tries = 0
        for u in source:
            tries += 1
            if tries > 100 * count + 1000:
                raise DomainError(f"{self.family}: could not find {count} usable sample points")
            if not self._usable(u):
                continue
            e = self.eta(u)
            if any(_close(e, f, exact) for f in etas):
                continue
            out.append(u)
            etas.append(e)
            if len(out) == count:
                break
        return out

    # -- reporting --------------------------------------------------------
    def describe(self) -> dict:
        return {"family": self.family, "kind": self.kind,
                "params": {k: _show(v) for k, v in self.params().items()}}


def _close(a, b, exact):
    if exact:
        return a == b
    return abs(complex(a) - complex(b)) < 1e-9 * max(1.0, abs(complex(a)))


def _show(v):
    if isinstance(v, (int, bool)):
        return v
    if isinstance(v, float):
        return v
    return str(v)


def replace_params(model: Model, **changes) -> Model:
    return replace(model, **changes)
