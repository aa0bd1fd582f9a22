"""Closure relation, frequencies, Heisenberg solution and ladder operators.

The closure relation ``[H,[H,eta]] = eta R0(H) + [H,eta] R1(H) + R-1(H)``
only involves commutators with the multiplication operator eta, so it may
be checked for Ht = phi0^-1 H phi0 instead of H.  For oQM and pdQM models
this is done on polynomials in eta; for rdQM models it is also done with
exact lattice matrices (Ht) and float matrices (H).
"""
from __future__ import annotations

import cmath
import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import citations
from .errors import DomainError, InconsistentSystemError, ValidationError
from .kernel import Poly1, eig_symmetric, exact_sqrt, is_exact, magnitude, solve_linear, to_float
from .lattice import build_H, eta_matrix, htilde_lattice
from .models.base import ClosureData, Model
from .models.catalog import exact_twin
from .polyop import apply_htilde, htilde_matrix, operator_of, three_term_recurrence

__all__ = [
    "FrequencyPair", "closure_residual", "closure_check", "closure_fit",
    "ClosureComparison", "compare_closure", "SpectrumFromClosure",
    "spectrum_from_closure", "spectrum_for_model", "heisenberg_check", "LadderOperators",
    "build_ladder", "recurrence_vs_ladder", "verification_report",
]

# highest test monomial used when fitting; degree bounds need 8 unknowns
_FIT_DEGREE = 5


def _num(v):
    """Float (real if possible) image of a scalar."""
    v = to_float(v)
    if isinstance(v, complex) and v.imag == 0:
        return v.real
    return v


def _exact_real(v):
    if isinstance(v, Fraction) or isinstance(v, int):
        return Fraction(v)
    if is_exact(v) and v.imag == 0:
        return Fraction(v.real)
    return None


# ---------------------------------------------------------------------------
# frequencies


@dataclass(frozen=True)
class FrequencyPair:
    """``alpha_pm(y) = (R1(y) +- sqrt(R1(y)^2 + 4 R0(y))) / 2``."""

    data: ClosureData

    def discriminant(self, y):
        r1 = self.data.R1(y)
        return r1 * r1 + 4 * self.data.R0(y)

    def sqrt_disc(self, y):
        """Exact root when the discriminant is a rational square, else float."""
        d = self.discriminant(y)
        ed = _exact_real(d)
        if ed is not None:
            if ed < 0:
                raise DomainError(f"negative discriminant R1^2+4R0 = {ed} at y={y}")
            root = exact_sqrt(ed)
            if root is not None:
                return root
            return math.sqrt(ed)
        d = _num(d)
        if isinstance(d, complex):
            return cmath.sqrt(d)
        if d < 0:
            raise DomainError(f"negative discriminant R1^2+4R0 = {d} at y={y}")
        return math.sqrt(d)

    def alpha_plus(self, y):
        return (self.data.R1(y) + self.sqrt_disc(y)) / 2

    def alpha_minus(self, y):
        return (self.data.R1(y) - self.sqrt_disc(y)) / 2

    def identity_residual(self, samples: int = 20, seed: int = 0) -> float:
        """Max of |a+ + a- - R1| and |a+ a- + R0| on random y with a real root."""
        rng = random.Random(seed)
        worst, used = 0.0, 0
        while used < samples:
            y = float(rng.uniform(0, 50))
            try:
                ap, am = self.alpha_plus(y), self.alpha_minus(y)
            except DomainError:
                continue
            r0, r1 = _num(self.data.R0(y)), _num(self.data.R1(y))
            worst = max(worst, abs(ap + am - r1) / max(1, abs(r1)),
                        abs(ap * am + r0) / max(1, abs(r0)))
            used += 1
        return worst


# ---------------------------------------------------------------------------
# polynomial-space closure machinery


class _PolySpace:
    """Ht as an upper triangular matrix on polynomials of degree <= dim-1."""

    def __init__(self, model, degree: int, exact: Optional[bool]):
        self.exact = model.exact if exact is None else exact
        self.m = htilde_matrix(model, degree, self.exact, allow_beyond_lattice=True)
        if self.m.shape[0] != self.m.shape[1]:
            raise ValidationError("closure analysis needs a degree-preserving Ht")
        self.dim = self.m.shape[0]
        self.zero = Fraction(0) if self.exact else 0.0

    def basis(self, j):
        v = [self.zero] * self.dim
        v[j] = Fraction(1) if self.exact else 1.0
        return v

    def H(self, v):
        return [sum((self.m[i, j] * v[j] for j in range(i, self.dim)), self.zero)
                for i in range(self.dim)]

    def Hk(self, v, k):
        for _ in range(k):
            v = self.H(v)
        return v

    def eta(self, v):
        if v[-1] != 0:
            raise DomainError("polynomial degree overflow in closure evaluation")
        return [self.zero] + v[:-1]

    def comm(self, v):
        """[Ht, eta] v."""
        return _sub(self.H(self.eta(v)), self.eta(self.H(v)))

    def lhs(self, v):
        return _sub(self.H(self.comm(v)), self.comm(self.H(v)))

    def terms(self, v):
        """Images of the 8 basis terms of the right-hand side, in unknown order."""
        hv = [v, self.H(v), self.Hk(v, 2)]
        return ([self.eta(h) for h in hv] + [self.comm(h) for h in hv[:2]] + hv)


def _sub(a, b):
    return [x - y for x, y in zip(a, b)]


_UNKNOWNS = ("R0[0]", "R0[1]", "R0[2]", "R1[0]", "R1[1]", "Rm1[0]", "Rm1[1]", "Rm1[2]")


def _data_vector(data: ClosureData) -> list:
    c = data.coefficients()
    return [c[k] for k in _UNKNOWNS]


def _data_from_vector(x, provenance="fitted") -> ClosureData:
    return ClosureData(Poly1(tuple(x[0:3]), "y"), Poly1(tuple(x[3:5]), "y"),
                       Poly1(tuple(x[5:8]), "y"), provenance)


def _space(model, exact):
    return _PolySpace(model, _FIT_DEGREE + 1, exact)


def closure_residual(model: Model, data: ClosureData, exact: Optional[bool] = None) -> float:
    """Largest coefficient of LHS - RHS over the test monomials 1..eta^5 (polynomial space).

    Float residuals are relative to the largest LHS coefficient.
    """
    sp = _space(model, exact)
    x = _data_vector(data)
    worst, scale = 0.0, 1.0
    for j in range(_FIT_DEGREE + 1):
        v = sp.basis(j)
        rhs = [sp.zero] * sp.dim
        for coef, t in zip(x, sp.terms(v)):
            rhs = [r + coef * ti for r, ti in zip(rhs, t)]
        lhs = sp.lhs(v)
        worst = max(worst, max(magnitude(a - b) for a, b in zip(lhs, rhs)))
        scale = max(scale, max(magnitude(a) for a in lhs))
    return worst if sp.exact else worst / scale


def closure_fit(model: Model, exact: Optional[bool] = None) -> ClosureData:
    """Solve the closure relation for R0 (deg <= 2), R1 (deg <= 1), R-1 (deg <= 2).

    Both sides are expanded coefficient by coefficient on the test
    monomials 1..eta^5; the over-determined exact system must be consistent.
    """
    sp = _space(model, exact)
    rows, rhs = [], []
    for j in range(_FIT_DEGREE + 1):
        v = sp.basis(j)
        cols = sp.terms(v)
        lhs = sp.lhs(v)
        for i in range(sp.dim):
            rows.append([c[i] for c in cols])
            rhs.append(lhs[i])
    try:
        x = solve_linear(rows, rhs)
    except InconsistentSystemError as exc:
        raise InconsistentSystemError(f"closure relation fails for this model: {exc}",
                                      residual=getattr(exc, "residual", None)) from exc
    if not sp.exact:
        x = [_num(v) for v in x]
    return _data_from_vector(x)


def _pointwise_check(model: Model, data: ClosureData, trials: int, seed: int,
                     exact: Optional[bool]) -> float:
    """Closure relation in the Ht frame at random points on random test polynomials."""
    from .errors import PoleError

    op = operator_of(model, exact)
    rng = random.Random(seed)
    one = Fraction(1) if op.exact else 1.0
    eta_p = Poly1((0, one), "eta")
    R0, R1, Rm1 = data.polys()

    def Hp(p):
        return apply_htilde(op, p, op.exact)

    def fn(poly_y, p):
        """R(Ht) p for a polynomial R in y."""
        out, cur = Poly1((), "eta"), p
        for k in range(poly_y.degree + 1):
            out = out + cur * poly_y.coeff(k)
            cur = Hp(cur)
        return out

    def comm(p):
        return Hp(eta_p * p) - eta_p * Hp(p)

    worst = 0.0
    for _ in range(trials):
        deg = rng.randint(0, 4)
        cs = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(deg + 1)]
        cs[-1] = cs[-1] or one
        f = Poly1(tuple(c if op.exact else float(c) for c in cs), "eta")
        cf = comm(f)
        c_hf = comm(Hp(f))
        r0f, r1f, rmf = fn(R0, f), fn(R1, f), fn(Rm1, f)
        while True:
            u = model.sample_points(1, exact=op.exact, rng=rng)[0]
            e = op.coordinate.eta(u)
            try:
                lhs = op.value(cf, u) - c_hf(e)
                rhs = (e * r0f(e) + op.value(eta_p * r1f, u) - e * op.value(r1f, u) + rmf(e))
            except (PoleError, ZeroDivisionError):
                continue
            break
        scale = 1.0 if op.exact else max(1.0, magnitude(lhs))
        worst = max(worst, magnitude(lhs - rhs) / scale)
    return worst


def _matrix_poly(m, poly_y, eye):
    out = eye * poly_y.coeff(0)
    cur = eye
    for k in range(1, poly_y.degree + 1):
        cur = cur @ m
        out = out + cur * poly_y.coeff(k)
    return out


def _lattice_residual(H, eta, data: ClosureData, eye, float_mode: bool) -> float:
    C = H @ eta - eta @ H
    lhs = H @ C - C @ H
    rhs = eta @ _matrix_poly(H, data.R0, eye) + C @ _matrix_poly(H, data.R1, eye) \
        + _matrix_poly(H, data.Rm1, eye)
    diff = lhs - rhs
    worst = max((magnitude(v) for v in np.ravel(diff)), default=0.0)
    if float_mode:
        worst /= max(1.0, max(magnitude(v) for v in np.ravel(lhs)))
    return worst


def closure_check(model: Model, data: ClosureData, trials: int = 20, seed: int = 0,
                  exact: Optional[bool] = None) -> float:
    """Max residual of the closure relation for ``data``.

    rdQM: exact Ht lattice matrices (exact mode) or the float H matrix.
    oQM/pdQM: pointwise in the Ht frame on random test polynomials.
    Float residuals are relative to the size of the left-hand side.
    """
    exact = model.exact if exact is None else exact
    if model.kind == "rdQM":
        if exact:
            Ht = htilde_lattice(model)
            eye = np.empty(Ht.shape, dtype=object)
            eye[:, :] = Fraction(0)
            for i in range(Ht.shape[0]):
                eye[i, i] = Fraction(1)
            return _lattice_residual(Ht, eta_matrix(model, exact=True), data, eye, False)
        fdata = ClosureData(*(p.map(_num) for p in data.polys()), data.provenance)
        H = build_H(model).matrix
        return _lattice_residual(H, eta_matrix(model), fdata, np.eye(H.shape[0]), True)
    return _pointwise_check(model, data, trials, seed, exact)


@dataclass
class ClosureComparison:
    family: str
    printed: ClosureData
    fitted: ClosureData
    printed_residual: float
    fitted_residual: float
    mismatches: list
    citation: Optional[str]

    @property
    def matches(self) -> bool:
        return not self.mismatches

    def side_by_side(self) -> list:
        p, f = self.printed.coefficients(), self.fitted.coefficients()
        return [{"coefficient": k, "printed": str(p[k]), "fitted": str(f[k]),
                 "agree": k not in self.mismatches} for k in _UNKNOWNS]

    def summary(self) -> str:
        if self.matches:
            return f"{self.family}: fitted closure table equals the printed table"
        verdict = "satisfies" if self.printed_residual == 0 else "violates"
        return (f"{self.family}: printed closure table differs in {', '.join(self.mismatches)}; "
                f"printed table {verdict} the closure relation (residual {self.printed_residual:g}), "
                f"fitted table residual {self.fitted_residual:g}")

    def to_dict(self) -> dict:
        return {"matches": self.matches, "mismatches": self.mismatches,
                "printed_residual": self.printed_residual,
                "fitted_residual": self.fitted_residual,
                "table": self.side_by_side(), "summary": self.summary(),
                "citation": self.citation}


def compare_closure(model: Model, exact: Optional[bool] = None) -> ClosureComparison:
    """Fit the closure data and compare it with the reference table."""
    exact = model.exact if exact is None else exact
    fitted = closure_fit(model, exact)
    printed = model.closure_table()
    if exact:
        mism = fitted.mismatches(printed)
    else:
        a, b = fitted.coefficients(), printed.coefficients()
        mism = [k for k in _UNKNOWNS
                if abs(complex(_num(a[k])) - complex(_num(b[k]))) > 1e-8 * max(1, abs(complex(_num(b[k]))))]
    citation = None
    if mism:
        citation = {"jacobi": citations.JACOBI_CLOSURE,
                    "q_racah": citations.QRACAH_CLOSURE}.get(model.family, citations.CLOSURE_TABLE)
    return ClosureComparison(model.family, printed, fitted,
                             closure_residual(model, printed, exact),
                             closure_residual(model, fitted, exact), mism, citation)


# ---------------------------------------------------------------------------
# spectrum by recursion


@dataclass
class SpectrumFromClosure:
    energies: list
    backward_residuals: list
    exact: bool
    tol: float = 1e-10
    # both roots at E(0) = 0 are positive, so the data alone cannot tell
    # E(1) from the continued level E(-1)
    ambiguous_start: bool = False
    start: str = "plus"

    @property
    def consistent(self) -> bool:
        if self.exact:
            return all(r == 0 for r in self.backward_residuals)
        return all(r <= self.tol for r in self.backward_residuals)


def spectrum_from_closure(data: ClosureData, n_max: int, tol: float = 1e-10,
                          start: str = "plus") -> SpectrumFromClosure:
    """``E(0) = 0``, ``E(n+1) = E(n) + alpha_+(E(n))``, checked by ``E(n-1) = E(n) + alpha_-(E(n))``.

    When ``R0(0) < 0`` both frequencies are positive at the ground level and
    the first step is ambiguous; ``start="minus"`` takes alpha_-(0) there.
    Later steps always use alpha_+.
    """
    if n_max < 0:
        raise ValidationError("n_max must be non-negative")
    if start not in ("plus", "minus"):
        raise ValidationError(f"start must be 'plus' or 'minus', got {start!r}")
    freq = FrequencyPair(data)
    E = [Fraction(0) if all(is_exact(v) for v in data.coefficients().values()) else 0.0]
    r0 = complex(_num(data.R0(E[0])))
    ambiguous = r0.imag == 0 and r0.real < 0
    for n in range(n_max):
        step = freq.alpha_minus if (n == 0 and start == "minus") else freq.alpha_plus
        E.append(E[-1] + step(E[-1]))
    back = []
    for n in range(1, n_max + 1):
        r = E[n] + freq.alpha_minus(E[n]) - E[n - 1]
        back.append(magnitude(r) / max(1.0, magnitude(E[n])))
    exact = all(is_exact(v) for v in E)
    return SpectrumFromClosure(E, back, exact, tol, ambiguous, start)


def spectrum_for_model(model: Model, n_max: Optional[int] = None,
                       data: Optional[ClosureData] = None) -> SpectrumFromClosure:
    """Recursion spectrum, resolving an ambiguous first step with E(1) of the model."""
    data = closure_fit(model) if data is None else data
    if n_max is None:
        n_max = model.N if model.N is not None else 10
    out = spectrum_from_closure(data, n_max)
    if out.ambiguous_start and n_max >= 1 and out.energies[1] != model.energy(1):
        out = spectrum_from_closure(data, n_max, start="minus")
    return out


# ---------------------------------------------------------------------------
# Heisenberg solution and ladder operators


def _float_data(data: ClosureData) -> ClosureData:
    return ClosureData(*(p.map(_num) for p in data.polys()), data.provenance)


def _spectral(model: Model, data: ClosureData):
    """Float H, eta, eigen-decomposition and alpha_pm, R-1/R0 on the spectrum."""
    if model.kind != "rdQM":
        raise ValidationError(f"{model.family} is not a finite real-shift model")
    R0 = data.R0
    # refuse on exact roots of R0 on the spectrum, then on numerical ones
    for n in range(model.N + 1):
        if magnitude(R0(model.energy(n))) <= 1e-12:
            raise DomainError(f"R0(E({n})) = 0: ladder / Heisenberg solution undefined")
    fdata = _float_data(data)
    H = build_H(model).matrix
    eta = eta_matrix(model)
    vals, vecs = eig_symmetric(H)
    freq = FrequencyPair(fdata)
    ap = np.array([float(np.real(freq.alpha_plus(float(v)))) for v in vals])
    am = np.array([float(np.real(freq.alpha_minus(float(v)))) for v in vals])
    if np.any(np.abs(ap - am) <= 1e-12 * np.maximum(1, np.abs(ap))):
        raise DomainError("alpha_+ = alpha_- on the spectrum")
    g = np.array([fdata.Rm1(float(v)) / fdata.R0(float(v)) for v in vals])
    return H, eta, vals, vecs, ap, am, g


def _fn(vecs, values):
    return (vecs * values) @ vecs.T


def heisenberg_check(model: Model, ts: Sequence[float] = (0.1, 1.0, 3.0),
                     data: Optional[ClosureData] = None) -> float:
    """Max entrywise |U(t) eta U(t)^dagger - RHS(t)| over ``ts`` (U = e^{itH})."""
    data = closure_fit(exact_twin(model)) if data is None else data
    H, eta, vals, vecs, ap, am, g = _spectral(model, data)
    C = H @ eta - eta @ H
    G = _fn(vecs, g)
    worst = 0.0
    for t in ts:
        u = _fn(vecs, np.exp(1j * vals * t))
        lhs = u @ eta @ u.conj().T
        ep, em = np.exp(1j * ap * t), np.exp(1j * am * t)
        F1 = _fn(vecs, (ep - em) / (ap - am))
        F2 = _fn(vecs, (-am * ep + ap * em) / (ap - am))
        rhs = C @ F1 - G + (eta + G) @ F2
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


@dataclass
class LadderOperators:
    a_plus: np.ndarray
    a_minus: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    offset: np.ndarray        # R-1(H) R0(H)^-1
    eta: np.ndarray
    alpha_plus: np.ndarray
    alpha_minus: np.ndarray
    data: ClosureData

    def in_eigenbasis(self, m):
        return self.eigenvectors.T @ m @ self.eigenvectors

    def annihilation_residual(self) -> float:
        return float(np.linalg.norm(self.a_minus @ self.eigenvectors[:, 0]))

    def leakage(self) -> dict:
        """Largest eigenbasis entries of a+ off (n+1, n) and of a- off (n-1, n)."""
        P, M = self.in_eigenbasis(self.a_plus), self.in_eigenbasis(self.a_minus)
        n = P.shape[0]
        band_p = np.zeros_like(P, dtype=bool)
        band_m = np.zeros_like(M, dtype=bool)
        for k in range(n - 1):
            band_p[k + 1, k] = True
            band_m[k, k + 1] = True
        return {"plus": float(np.max(np.abs(P[~band_p]), initial=0.0)),
                "minus": float(np.max(np.abs(M[~band_m]), initial=0.0))}

    def sum_rule_residual(self) -> float:
        return float(np.max(np.abs(self.a_plus + self.a_minus - (self.eta + self.offset))))

    def decomposition_residual(self, ts=(0.1, 1.0, 3.0)) -> float:
        vals, vecs = self.eigenvalues, self.eigenvectors
        worst = 0.0
        for t in ts:
            u = _fn(vecs, np.exp(1j * vals * t))
            lhs = u @ self.eta @ u.conj().T
            rhs = (self.a_plus @ _fn(vecs, np.exp(1j * self.alpha_plus * t))
                   + self.a_minus @ _fn(vecs, np.exp(1j * self.alpha_minus * t)) - self.offset)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
        return worst

    def nilpotency_residual(self) -> float:
        """max |(a-)^{N+1}| relative to max|a-|^{N+1} (zero up to rounding)."""
        n = self.a_minus.shape[0]
        scale = max(1.0, float(np.max(np.abs(self.a_minus)))) ** n
        return float(np.max(np.abs(np.linalg.matrix_power(self.a_minus, n)))) / scale

    def report(self) -> dict:
        return {"annihilation": self.annihilation_residual(), "leakage": self.leakage(),
                "sum_rule": self.sum_rule_residual(),
                "decomposition": self.decomposition_residual(),
                "nilpotency": self.nilpotency_residual()}


def build_ladder(model: Model, data: Optional[ClosureData] = None) -> LadderOperators:
    """``a+- = +-([H,eta] - (eta + R-1 R0^-1) alpha_-+(H)) (alpha_+ - alpha_-)^-1``."""
    data = closure_fit(exact_twin(model)) if data is None else data
    H, eta, vals, vecs, ap, am, g = _spectral(model, data)
    C = H @ eta - eta @ H
    G = _fn(vecs, g)
    inv = _fn(vecs, 1.0 / (ap - am))
    a_plus = (C - (eta + G) @ _fn(vecs, am)) @ inv
    a_minus = -(C - (eta + G) @ _fn(vecs, ap)) @ inv
    return LadderOperators(a_plus, a_minus, vals, vecs, G, eta, ap, am, data)


def recurrence_vs_ladder(model: Model, data: Optional[ClosureData] = None,
                         tol: float = 1e-9) -> dict:
    """Eigenbasis matrix of eta against the recurrence coefficients (and the ladder sum rule).

    With orthonormal phi_n the eigenbasis eta has diagonal B_n and squared
    off-diagonal A_{n-1} C_n for the monic recurrence.  A float model takes
    its recurrence from an exact copy of its parameters, since the monomial
    expansion loses too many digits in floating point.
    """
    if model.kind != "rdQM":
        raise ValidationError(f"{model.family} is not a finite real-shift model")
    H = build_H(model).matrix
    eta = eta_matrix(model)
    vals, vecs = eig_symmetric(H)
    E = vecs.T @ eta @ vecs
    n = E.shape[0]
    band = np.abs(np.subtract.outer(np.arange(n), np.arange(n))) <= 1
    twin = exact_twin(model)
    rec = three_term_recurrence(twin, model.N, tol=tol)
    diag_res = max(abs(E[k, k] - _num(rec.B[k])) for k in range(n))
    pos = rec.positivity()
    off_res = max((abs(E[k, k - 1] ** 2 - _num(pos[k - 1])) for k in range(1, n)), default=0.0)
    out = {"tridiagonal_defect": float(np.max(np.abs(E[~band]), initial=0.0)),
           "diagonal_residual": float(diag_res), "offdiag_sq_residual": float(off_res),
           "off_diagonal": [float(E[k, k - 1]) for k in range(1, n)]}
    try:
        lad = build_ladder(model, data)
    except DomainError as exc:
        out["ladder"] = f"skipped: {exc}"
    else:
        out["ladder_sum_rule"] = lad.sum_rule_residual()
    return out


# ---------------------------------------------------------------------------
# report


def verification_report(model: Model, exact: Optional[bool] = None) -> dict:
    """JSON-ready comparison of the printed and fitted closure tables."""
    cmp = compare_closure(model, exact)
    disc = []
    if not cmp.matches:
        disc.append({"kind": "closure-table", "citation": cmp.citation, "message": cmp.summary(),
                     "coefficients": cmp.mismatches})
    return {
        "model": model.family,
        "params": model.describe()["params"],
        "printed_table": {k: str(v) for k, v in cmp.printed.coefficients().items()},
        "fitted_table": {k: str(v) for k, v in cmp.fitted.coefficients().items()},
        "residuals": {"printed": cmp.printed_residual, "fitted": cmp.fitted_residual},
        "discrepancies": disc,
        "frame": "Ht (conjugation by phi0 preserves commutators with eta)",
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False)
