"""Quasi-exactly solvable Hamiltonians from the unified construction with L = 3, 4.

For L = 3 the operator Ht raises the degree of a polynomial in eta by one,
so subtracting ``e0 * eta`` with ``e0`` the leading coefficient of
``Ht eta^M`` keeps V_M = span{1, ..., eta^M} invariant.  For L = 4 the
compensation is ``e0 * eta^2 + e1 * eta``; full invariance additionally
requires the leading coefficient of ``Ht eta^(M-1)`` to equal that of
``Ht eta^M``, which is a linear condition on the v_{k,l}.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Mapping, Optional

import numpy as np

from .errors import InconsistentSystemError, UnsupportedError, ValidationError
from .kernel import Poly1, magnitude, parse_scalar, solve_linear, to_float
from .models.catalog import ConfigError
from .models.coordinates import (OQM, Cos2xCoordinate, CosCoordinate, LinearCoordinate,
                                 QRacahCoordinate, QuadraticCoordinate, RacahCoordinate,
                                 ShiftKind, SinusoidalCoordinate, pdqm_q_shift, pdqm_shift,
                                 rdqm_shift)
from .polyop import PotentialCoefficients, UnifiedPotential, apply_htilde

__all__ = [
    "QesSpec", "QesInfeasible", "solve_compensation", "l4_constraint",
    "enforce_l4_constraint", "certify_invariance", "restriction_matrix",
    "QesSpectrum", "qes_spectrum", "qes_from_config", "coordinate_from_name",
    "spec_to_config",
]

IMAG_THRESHOLD = 1e-9


@dataclass(frozen=True)
class QesSpec:
    coordinate: SinusoidalCoordinate
    shift: ShiftKind
    coeffs: PotentialCoefficients
    M: int
    e0: object = 0
    e1: object = None
    coordinate_key: str = ""
    coordinate_params: dict = field(default_factory=dict)

    @property
    def L(self) -> int:
        return self.coeffs.L

    @property
    def potential(self) -> UnifiedPotential:
        return UnifiedPotential(self.coeffs, self.coordinate, self.shift)

    @property
    def exact(self) -> bool:
        return self.potential.exact

    def compensation(self) -> Poly1:
        """The polynomial multiplying f in ``Ht' f = Ht f - comp * f``."""
        zero = Fraction(0) if self.exact else 0.0
        if self.L == 4:
            return Poly1((zero, self.e1 if self.e1 is not None else zero, self.e0), "eta")
        if self.L == 3:
            return Poly1((zero, self.e0), "eta")
        return Poly1((), "eta")

    def apply(self, p: Poly1) -> Poly1:
        """Ht' p."""
        return apply_htilde(self.potential, p, self.exact) - self.compensation() * p

    def to_dict(self) -> dict:
        return {"L": self.L, "M": self.M, "coordinate": self.coordinate.name,
                "shift": self.shift.kind, "e0": str(self.e0),
                "e1": None if self.e1 is None else str(self.e1),
                "v": {k: str(v) for k, v in self.coeffs.as_dict().items()}}


@dataclass(frozen=True)
class QesInfeasible:
    """L = 4 system without a solution: the residual and the linear v-constraint."""

    M: int
    residual: object
    constraint: dict          # {"v_k_l": coefficient}; sum coefficient * v = 0 is required
    e0: object
    e1: object

    def describe(self) -> str:
        terms = " + ".join(f"({c})*{k}" for k, c in self.constraint.items()) or "0"
        return (f"L=4, M={self.M}: no (e0, e1) make V_M invariant; leading coefficients of "
                f"Ht eta^M and Ht eta^(M-1) differ by {self.residual}; need {terms} = 0")

    def to_dict(self) -> dict:
        return {"feasible": False, "M": self.M, "residual": str(self.residual),
                "constraint": {k: str(v) for k, v in self.constraint.items()},
                "e0": str(self.e0), "e1": str(self.e1), "message": self.describe()}


def _images(pot: UnifiedPotential, degree: int) -> Poly1:
    one = Fraction(1) if pot.exact else 1.0
    return apply_htilde(pot, Poly1.monomial(degree, one=one), pot.exact)


def _l4_gap(pot: UnifiedPotential, M: int):
    """top(Ht eta^M) - top(Ht eta^(M-1)), both at degree m + 2."""
    return _images(pot, M).coeff(M + 2) - _images(pot, M - 1).coeff(M + 1)


def l4_constraint(coeffs: PotentialCoefficients, coord: SinusoidalCoordinate,
                  shift: ShiftKind, M: int) -> dict:
    """Coefficients c_{k,l} of the linear condition sum c_{k,l} v_{k,l} = 0 (L = 4)."""
    out = {}
    one = Fraction(1) if coeffs.exact else 1.0
    for key in coeffs.keys():
        unit = PotentialCoefficients(coeffs.L, {key: one}, allow_degenerate=True)
        c = _l4_gap(UnifiedPotential(unit, coord, shift), M)
        if c != 0:
            out[f"v_{key[0]}_{key[1]}"] = c
    return out


def enforce_l4_constraint(coeffs: PotentialCoefficients, coord: SinusoidalCoordinate,
                          shift: ShiftKind, M: int, key=None) -> PotentialCoefficients:
    """Adjust one v_{k,l} (the first one with a nonzero constraint weight by
    default) so that the L = 4 invariance condition holds."""
    cons = l4_constraint(coeffs, coord, shift, M)
    if not cons:
        return coeffs
    if key is not None:
        name = key if isinstance(key, str) else f"v_{key[0]}_{key[1]}"
        if name not in cons:
            raise ValidationError(f"{name} does not enter the L=4 constraint")
        candidates = [name]
    else:
        candidates = list(cons)
    for name in candidates:
        k, l = (int(s) for s in name.split("_")[1:])
        rest = sum((c * coeffs.get(*map(int, n.split("_")[1:]))
                    for n, c in cons.items() if n != name), 0)
        v = dict(coeffs.v)
        v[(k, l)] = -rest / cons[name]
        try:
            return PotentialCoefficients(coeffs.L, v, coeffs.allow_degenerate)
        except ValidationError:
            continue  # this choice empties the top coefficients
    raise ValidationError("no single v_{k,l} adjustment satisfies the L=4 constraint")


def solve_compensation(coeffs: PotentialCoefficients, coord: SinusoidalCoordinate,
                       shift: ShiftKind, M: int):
    """Compensation making V_M invariant; a :class:`QesInfeasible` for inconsistent L = 4."""
    if coeffs.L not in (2, 3, 4):
        raise UnsupportedError(f"L={coeffs.L} is not supported (L must be 3 or 4)")
    if M < 0:
        raise ValidationError(f"M={M} must be non-negative")
    pot = UnifiedPotential(coeffs, coord, shift)
    zero = Fraction(0) if pot.exact else 0.0
    if coeffs.L == 2:
        # already exactly solvable: no compensation needed
        return QesSpec(coord, shift, coeffs, M, zero)
    top = _images(pot, M)
    if coeffs.L == 3:
        return QesSpec(coord, shift, coeffs, M, top.coeff(M + 1))
    a_M, b_M = top.coeff(M + 2), top.coeff(M + 1)
    if M == 0:
        return QesSpec(coord, shift, coeffs, M, a_M, b_M)
    a_prev = _images(pot, M - 1).coeff(M + 1)
    rows = [[1, 0], [0, 1], [1, 0]]
    if not pot.exact:
        rows = [[float(v) for v in r] for r in rows]
    try:
        e0, e1 = solve_linear(rows, [a_M, b_M, a_prev])
    except InconsistentSystemError:
        return QesInfeasible(M, a_M - a_prev, l4_constraint(coeffs, coord, shift, M), a_M, b_M)
    return QesSpec(coord, shift, coeffs, M, e0, e1)


def certify_invariance(spec: QesSpec) -> float:
    """Largest |coefficient| of degree > M in Ht' eta^m, m = 0..M."""
    one = Fraction(1) if spec.exact else 1.0
    worst = 0.0
    for m in range(spec.M + 1):
        img = spec.apply(Poly1.monomial(m, one=one))
        for k in range(spec.M + 1, img.degree + 1):
            worst = max(worst, magnitude(img.coeff(k)))
    return worst


def restriction_matrix(spec: QesSpec) -> np.ndarray:
    """(M+1) x (M+1) matrix of Ht' on V_M in the monomial basis (column m = image of eta^m)."""
    one = Fraction(1) if spec.exact else 1.0
    n = spec.M + 1
    m = np.empty((n, n), dtype=object)
    for j in range(n):
        img = spec.apply(Poly1.monomial(j, one=one))
        for i in range(n):
            m[i, j] = img.coeff(i)
    return m


@dataclass
class QesSpectrum:
    eigenvalues: list
    exact: Optional[list]
    max_imag: float
    real: bool

    def to_dict(self) -> dict:
        return {"eigenvalues": [[float(np.real(v)), float(np.imag(v))] for v in self.eigenvalues],
                "exact": None if self.exact is None else [str(v) for v in self.exact],
                "max_imag": self.max_imag, "real": self.real}


def qes_spectrum(spec: QesSpec, threshold: float = IMAG_THRESHOLD) -> QesSpectrum:
    """Eigenvalues of the restriction of Ht' to V_M, sorted by real part.

    Exact values are returned when the restriction is triangular.  Realness
    is reported, not assumed.
    """
    m = restriction_matrix(spec)
    n = m.shape[0]
    exact_vals = None
    if spec.exact and all(m[i, j] == 0 for i in range(n) for j in range(i)):
        exact_vals = sorted((m[i, i] for i in range(n)), key=lambda v: complex(to_float(v)).real)
    mf = np.array([[complex(to_float(v)) for v in row] for row in m])
    vals = np.linalg.eigvals(mf)
    vals = sorted(vals, key=lambda v: (v.real, v.imag))
    scale = max(1.0, max((abs(v) for v in vals), default=1.0))
    max_imag = max((abs(v.imag) for v in vals), default=0.0)
    return QesSpectrum([complex(v) for v in vals], exact_vals, max_imag,
                       bool(max_imag <= threshold * scale))


# ---------------------------------------------------------------------------
# config


def coordinate_from_name(name: str, params: Mapping) -> SinusoidalCoordinate:
    name = name.strip().lower().replace(" ", "")
    if name in ("x", "linear"):
        return LinearCoordinate()
    if name in ("x2", "x^2", "quadratic"):
        return QuadraticCoordinate()
    if name in ("cos2x",):
        return Cos2xCoordinate()
    if name in ("cosx", "cos"):
        return CosCoordinate()
    if name == "racah":
        return RacahCoordinate(params["d"])
    if name in ("q_racah", "qracah"):
        return QRacahCoordinate(params["q"], params["d"])
    raise ValidationError(f"unknown coordinate {name!r}")


def _shift_from(kind: str, coord: SinusoidalCoordinate, params: Mapping) -> ShiftKind:
    kind = kind.strip()
    if kind == "oQM":
        return OQM
    if kind == "pdQM":
        if coord.variable == "z":
            return pdqm_q_shift(params["shift_q"])
        return pdqm_shift(params.get("gamma", Fraction(1)))
    if kind == "rdQM":
        return rdqm_shift(params.get("N"))
    raise ValidationError(f"unknown shift kind {kind!r} (oQM, pdQM or rdQM)")


def qes_from_config(cfg: Mapping, exact: Optional[bool] = None):
    """Build and solve a QES spec from ``key = value`` entries.

    Keys: ``coordinate``, ``shift``, ``L``, ``M``, ``v_k_l`` entries and,
    depending on the coordinate and shift, ``d``, ``q``, ``gamma``,
    ``shift_q`` (the multiplicative pdQM shift for cos x / cos 2x) and ``N``.
    Returns a :class:`QesSpec` or a :class:`QesInfeasible`.
    """
    cfg = dict(cfg)
    lines = cfg.pop("_lines", {})
    exact = True if exact is None else exact

    def need(key):
        if key not in cfg:
            raise ConfigError(f"missing required key {key!r}", field=key)
        return cfg[key]

    def as_int(key):
        try:
            return int(need(key))
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {cfg[key]!r}",
                              line=lines.get(key), field=key) from None

    def scalar(key):
        try:
            return parse_scalar(cfg[key], exact)
        except ValueError as exc:
            raise ConfigError(str(exc), line=lines.get(key), field=key) from None

    L, M = as_int("L"), as_int("M")
    if L not in (2, 3, 4):
        raise UnsupportedError(f"L={L} is not supported (L must be 3 or 4)")
    params = {}
    for key in ("d", "q", "gamma", "shift_q"):
        if key in cfg:
            params[key] = scalar(key)
    if "N" in cfg:
        params["N"] = as_int("N")
    v = {}
    known = {"coordinate", "shift", "L", "M", "d", "q", "gamma", "shift_q", "N", "name",
             "description"}
    for key in cfg:
        if key.startswith("v_"):
            parts = key.split("_")
            if len(parts) != 3 or not all(p.isdigit() for p in parts[1:]):
                raise ConfigError(f"bad coefficient key {key!r} (use v_k_l)",
                                  line=lines.get(key), field=key)
            v[(int(parts[1]), int(parts[2]))] = scalar(key)
        elif key not in known:
            raise ConfigError(f"unknown key {key!r}", line=lines.get(key), field=key)
    try:
        coord = coordinate_from_name(need("coordinate"), params)
        shift = _shift_from(need("shift"), coord, params)
        coeffs = PotentialCoefficients(L, v)
    except KeyError as exc:
        raise ConfigError(f"missing required key {exc.args[0]!r}", field=exc.args[0]) from None
    except ConfigError:
        raise
    except ValidationError as exc:
        raise ConfigError(str(exc)) from None
    result = solve_compensation(coeffs, coord, shift, M)
    if isinstance(result, QesSpec):
        result = replace(result, coordinate_key=cfg["coordinate"], coordinate_params=params)
    return result


def spec_to_config(spec: QesSpec) -> str:
    """Serialize the inputs of ``spec`` in the key-value config format."""
    lines = [f"coordinate = {spec.coordinate_key or spec.coordinate.name}",
             f"shift = {spec.shift.kind}", f"L = {spec.L}", f"M = {spec.M}"]
    for k, v in sorted(spec.coordinate_params.items()):
        lines.append(f"{k} = {v}")
    for key, val in spec.coeffs.as_dict().items():
        if val != 0:
            lines.append(f"{key} = {val}")
    return "\n".join(lines) + "\n"


def spec_json(result) -> str:
    return json.dumps(result.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)
