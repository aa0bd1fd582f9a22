"""The similarity-transformed Hamiltonian acting on polynomials in eta.

``Ht`` (H-tilde) is applied by evaluating its defining difference or
differential expression at sample coordinates with distinct eta values and
interpolating the result in eta.  In exact mode this is an identity check
as well as a computation: an image that is not a polynomial of the
expected degree raises :class:`InterpolationError`.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .errors import (DomainError, InterpolationError, PoleError,
                     StructureError, UnsupportedError, ValidationError)
from .kernel import (Poly1, interpolate_poly, is_exact, magnitude,
                     solve_linear, to_float)
from .models.base import Model
from .models.coordinates import ShiftKind, SinusoidalCoordinate

__all__ = [
    "HtildeOperator", "operator_of", "apply_htilde", "htilde_matrix",
    "eigenpolynomial", "eigenpolynomials", "PotentialCoefficients",
    "UnifiedPotential", "build_unified_potential", "recover_vkl",
    "dual_closure_polys", "dual_closure_check", "Recurrence",
    "three_term_recurrence", "EXTRA_CHECK_POINTS",
]

# sample points beyond the interpolation minimum, used as consistency checks
EXTRA_CHECK_POINTS = 2


@dataclass(frozen=True)
class HtildeOperator:
    """Pointwise form of Ht plus a sampler of admissible coordinates.

    dQM: ``Ht f = eps * (V+ (f(x - i beta) - f) + V- (f(x + i beta) - f))``.
    oQM: either ``w'`` (pointwise, chain rule) or the polynomial pair
    ``(S, T)`` with ``Ht = -S d^2/deta^2 - T d/deta``.
    """

    coordinate: SinusoidalCoordinate
    shift: ShiftKind
    exact: bool
    L: int = 2
    v_plus: Optional[Callable] = None
    v_minus: Optional[Callable] = None
    w_prime: Optional[Callable] = None
    kinetic: Optional[Poly1] = None
    drift: Optional[Poly1] = None
    sampler: Optional[Callable] = None
    label: str = ""

    @property
    def eps(self) -> int:
        return self.shift.eps

    def value(self, p: Poly1, u):
        """(Ht p)(u) for a polynomial p in eta."""
        coord = self.coordinate
        e = coord.eta(u)
        if self.shift.kind == "oQM":
            dp, d2p = p.derivative(), p.derivative().derivative()
            if self.w_prime is not None:
                eta1, eta2 = coord.d_eta(u), coord.d2_eta(u)
                # (P o eta)'' = P'' eta'^2 + P' eta''
                return -(d2p(e) * eta1 * eta1 + dp(e) * eta2) - 2 * self.w_prime(u) * eta1 * dp(e)
            return -self.kinetic(e) * d2p(e) - self.drift(e) * dp(e)
        pe = p(e)
        up = coord.eta_shifted(u, 1, self.shift)
        dn = coord.eta_shifted(u, -1, self.shift)
        return self.eps * (self.v_plus(u) * (p(up) - pe) + self.v_minus(u) * (p(dn) - pe))

    def polynomial_image(self, p: Poly1) -> Optional[Poly1]:
        """Direct polynomial image for the (S, T) oQM form, else None."""
        if self.shift.kind == "oQM" and self.kinetic is not None and self.drift is not None:
            dp = p.derivative()
            return -(self.kinetic * dp.derivative()) - self.drift * dp
        return None

    def samples(self, count: int):
        return self.sampler(count)


def operator_of(model: Model, exact: Optional[bool] = None) -> HtildeOperator:
    exact = model.exact if exact is None else exact
    sampler = lambda count: model.sample_points(count, exact=exact)
    if model.kind == "oQM":
        return HtildeOperator(model.coordinate, model.shift, exact, 2,
                              w_prime=model.w_prime, sampler=sampler, label=model.family)
    return HtildeOperator(model.coordinate, model.shift, exact, 2,
                          v_plus=model.v_plus, v_minus=model.v_minus,
                          sampler=sampler, label=model.family)


def _as_operator(obj, exact=None) -> HtildeOperator:
    if isinstance(obj, HtildeOperator):
        return obj
    if isinstance(obj, Model):
        return operator_of(obj, exact)
    if isinstance(obj, UnifiedPotential):
        return obj.operator()
    raise TypeError(f"cannot build Ht from {type(obj).__name__}")


def _float_poly(p: Poly1) -> Poly1:
    return p.map(to_float)


def apply_htilde(model, p: Poly1, exact: Optional[bool] = None,
                 degree_bound: Optional[int] = None, tol: float = 1e-8) -> Poly1:
    """Image of ``p`` under Ht, as a polynomial in eta.

    ``model`` may be a catalog :class:`Model`, a :class:`UnifiedPotential`
    or an :class:`HtildeOperator`.  The image is interpolated through
    ``degree_bound + 1`` points (default ``deg p + L - 2``) and checked on
    ``EXTRA_CHECK_POINTS`` more.
    """
    op = _as_operator(model, exact)
    if not op.exact:
        p = _float_poly(p)
    if p.is_zero():
        return Poly1((), "eta")
    direct = op.polynomial_image(p)
    if direct is not None:
        return direct
    bound = degree_bound if degree_bound is not None else max(p.degree + op.L - 2, 0)
    points = op.samples(bound + 1 + EXTRA_CHECK_POINTS)
    data = [(op.coordinate.eta(u), op.value(p, u)) for u in points]
    if not op.exact:
        data = [(complex(x), complex(y)) for x, y in data]
    image = interpolate_poly(data, bound, "eta", tol=tol)
    if not op.exact:
        image = _clean_float_poly(image)
    return image


def _clean_float_poly(p: Poly1) -> Poly1:
    """Drop negligible imaginary parts left by complex float evaluation."""
    scale = max(1.0, p.max_abs_coeff())
    out = []
    for c in p.coeffs:
        c = complex(c)
        if abs(c.imag) <= 1e-10 * scale:
            c = c.real
        out.append(c)
    while out and abs(out[-1]) <= 1e-11 * scale:
        out.pop()
    return Poly1(tuple(out), p.var)


def htilde_matrix(model, n: int, exact: Optional[bool] = None,
                  allow_beyond_lattice: bool = False) -> np.ndarray:
    """Matrix of Ht from V_n to V_{n+L-2} in the monomial basis.

    Column j holds the coefficients of ``Ht eta^j``.  For the catalog
    models (L = 2) the matrix is square and upper triangular.
    """
    if n < 0:
        raise DomainError(f"n={n} must be non-negative")
    if isinstance(model, Model) and model.N is not None and n > model.N and not allow_beyond_lattice:
        raise DomainError(f"n={n} exceeds lattice size N={model.N}")
    op = _as_operator(model, exact)
    rows = n + max(op.L - 2, 0) + 1
    one = Fraction(1) if op.exact else 1.0
    m = np.empty((rows, n + 1), dtype=object)
    m[:, :] = 0 * one
    for j in range(n + 1):
        img = apply_htilde(op, Poly1.monomial(j, one=one))
        if img.degree >= rows:
            raise StructureError(f"Ht eta^{j} has degree {img.degree} > {rows - 1}")
        for k, c in enumerate(img.coeffs):
            m[k, j] = c
    return m


def _energy_unchecked(model: Model, n: int):
    return model._energy(n)


def eigenpolynomials(model, n_max: int, exact: Optional[bool] = None,
                     allow_beyond_lattice: bool = False) -> list:
    """Monic P_0..P_{n_max} by back-substitution on the triangular Ht matrix."""
    m = htilde_matrix(model, n_max, exact, allow_beyond_lattice)
    if m.shape[0] != m.shape[1]:
        raise UnsupportedError("eigenpolynomials need a square (L = 2) Ht matrix")
    tol = 0 if all(is_exact(v) for v in m.ravel()) else 1e-10
    size = n_max + 1
    scale = max(1.0, max(magnitude(v) for v in m.ravel()))
    for i in range(size):
        for j in range(i):
            if magnitude(m[i, j]) > tol * scale:
                raise StructureError(f"Ht matrix is not upper triangular at ({i}, {j})")
    polys = []
    for n in range(size):
        E = m[n, n]
        c = [0] * (n + 1)
        c[n] = Fraction(1) if tol == 0 else 1.0
        for j in range(n - 1, -1, -1):
            gap = m[j, j] - E
            if magnitude(gap) <= tol * scale:
                raise StructureError(f"degenerate diagonal: E({j}) = E({n})")
            acc = sum((m[j, k] * c[k] for k in range(j + 1, n + 1)), 0)
            c[j] = -acc / gap
        polys.append(Poly1(tuple(c), "eta"))
    return polys


def eigenpolynomial(model, n: int, exact: Optional[bool] = None) -> Poly1:
    """Monic P_n with Ht P_n = E(n) P_n."""
    return eigenpolynomials(model, n, exact)[n]


# ---------------------------------------------------------------------------
# unified v_{k,l} potentials


@dataclass(frozen=True)
class PotentialCoefficients:
    """Constants v_{k,l} with l in {0, 1} and k + l <= L.

    ``v`` maps ``(k, l)`` to a scalar; missing entries are zero.  The top
    coefficients (k + l = L) may not all vanish unless ``allow_degenerate``.
    """

    L: int
    v: Dict[Tuple[int, int], object] = field(default_factory=dict)
    allow_degenerate: bool = False

    def __post_init__(self):
        if self.L < 0:
            raise ValidationError(f"L={self.L} must be non-negative")
        clean = {}
        for key, val in self.v.items():
            k, l = key
            if l not in (0, 1):
                raise ValidationError(f"v_{{{k},{l}}}: only l in {{0,1}} is kept")
            if k < 0 or k + l > self.L:
                raise ValidationError(f"v_{{{k},{l}}}: k+l<=L={self.L} violated")
            clean[(k, l)] = val
        object.__setattr__(self, "v", clean)
        if not self.allow_degenerate and all(self.get(k, self.L - k) == 0
                                             for k in range(self.L - 1, self.L + 1)):
            raise ValidationError(f"sum of v_{{k,l}}^2 over k+l=L={self.L} must be nonzero")

    def get(self, k: int, l: int):
        return self.v.get((k, l), 0)

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.v.values())

    def tilde(self, e, e_shift):
        """sum_k v_{k,0} e^k + e_shift * sum_k v_{k,1} e^k."""
        return self.part(0)(e) + e_shift * self.part(1)(e)

    def part(self, l: int) -> Poly1:
        top = self.L - l
        return Poly1(tuple(self.get(k, l) for k in range(top + 1)), "eta")

    def keys(self):
        return [(k, l) for l in (0, 1) for k in range(self.L - l + 1)]

    def as_dict(self) -> dict:
        return {f"v_{k}_{l}": self.get(k, l) for k, l in self.keys()}


@dataclass(frozen=True)
class UnifiedPotential:
    """V+- built from v_{k,l} on a given coordinate and shift.

    dQM: ``V+-(x) = Vt+-(x) / ((eta(x-+i b) - eta(x)) (eta(x-+i b) - eta(x+-i b)))``
    with ``Vt+- = sum v_{k,l} eta(x)^k eta(x-+i b)^l``.
    oQM: ``S = sum v_{k,0} eta^k`` and ``T = sum v_{k,1} eta^k`` so that
    ``Ht = -S d^2/deta^2 - T d/deta``; V- reports S/eta'^2 and V+ the
    matching ``w' = (T - eta'')/(2 eta')``.
    """

    coeffs: PotentialCoefficients
    coordinate: SinusoidalCoordinate
    shift: ShiftKind

    @property
    def L(self) -> int:
        return self.coeffs.L

    @property
    def exact(self) -> bool:
        return self.coeffs.exact and (self.shift.kind != "pdQM" or self.coordinate.variable == "z"
                                      or is_exact(self.shift.gamma))

    def _denominator(self, u, s):
        c, sh = self.coordinate, self.shift
        e = c.eta(u)
        e_near = c.eta_shifted(u, s, sh)
        e_far = c.eta_shifted(u, -s, sh)
        return (e_near - e) * (e_near - e_far), e, e_near

    def _dqm(self, u, s):
        den, e, e_near = self._denominator(u, s)
        if den == 0:
            raise PoleError(f"unified potential denominator vanishes at {u!r}")
        return self.coeffs.tilde(e, e_near) / den

    def v_plus(self, u):
        if self.shift.kind == "oQM":
            c = self.coordinate
            eta1 = c.d_eta(u)
            if eta1 == 0:
                raise PoleError(f"eta'(x) vanishes at {u!r}")
            return (self.coeffs.part(1)(c.eta(u)) - c.d2_eta(u)) / (2 * eta1)
        return self._dqm(u, 1)

    def v_minus(self, u):
        if self.shift.kind == "oQM":
            c = self.coordinate
            eta1 = c.d_eta(u)
            if eta1 == 0:
                raise PoleError(f"eta'(x) vanishes at {u!r}")
            return self.coeffs.part(0)(c.eta(u)) / (eta1 * eta1)
        return self._dqm(u, -1)

    def sample_points(self, count: int, exact: Optional[bool] = None,
                      rng: Optional[random.Random] = None) -> list:
        exact = self.exact if exact is None else exact
        if rng is None:
            source = self.coordinate.candidates(exact, self.shift)
        else:
            source = iter(lambda: self.coordinate.random_point(rng, exact, self.shift), None)
        out, etas = [], []
        for tries, u in enumerate(source):
            if tries > 100 * count + 1000:
                raise DomainError(f"could not find {count} usable sample points")
            try:
                e = self.coordinate.eta(u)
                if self.shift.kind != "oQM":
                    self.v_plus(u)
                    self.v_minus(u)
            except (PoleError, ZeroDivisionError):
                continue
            if any((e == f) if exact else abs(complex(e) - complex(f)) < 1e-9 for f in etas):
                continue
            out.append(u)
            etas.append(e)
            if len(out) == count:
                break
        return out

    def operator(self) -> HtildeOperator:
        exact = self.exact
        sampler = lambda count: self.sample_points(count, exact=exact)
        if self.shift.kind == "oQM":
            return HtildeOperator(self.coordinate, self.shift, exact, self.L,
                                  kinetic=self.coeffs.part(0), drift=self.coeffs.part(1),
                                  sampler=sampler, label=f"unified L={self.L}")
        return HtildeOperator(self.coordinate, self.shift, exact, self.L,
                              v_plus=self.v_plus, v_minus=self.v_minus,
                              sampler=sampler, label=f"unified L={self.L}")


def build_unified_potential(coeffs: PotentialCoefficients, coord: SinusoidalCoordinate,
                            shift: ShiftKind) -> UnifiedPotential:
    return UnifiedPotential(coeffs, coord, shift)


def recover_vkl(model: Model, n_points: int = 8, exact: Optional[bool] = None) -> PotentialCoefficients:
    """Solve for the L = 2 constants v_{k,l} reproducing ``model``'s potentials.

    Each sample point contributes one equation for V+ and one for V-; the
    system is over-determined and solved exactly, so any inconsistency is
    reported as :class:`InconsistentSystemError`.
    """
    if n_points < 3:
        raise ValidationError("need at least 3 sample points (6 equations)")
    exact = model.exact if exact is None else exact
    keys = [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1)]
    c, sh = model.coordinate, model.shift
    rows, rhs = [], []
    probe = UnifiedPotential(PotentialCoefficients(2, {(2, 0): 1}), c, sh)
    pts = []
    for u in c.candidates(exact, sh):
        if len(pts) == n_points:
            break
        if not model._usable(u):
            continue
        try:
            if sh.kind != "oQM":
                for s in (1, -1):
                    den, _, _ = probe._denominator(u, s)
                    if den == 0:
                        raise PoleError("denominator")
        except (PoleError, ZeroDivisionError):
            continue
        pts.append(u)
    for u in pts:
        e = c.eta(u)
        if sh.kind == "oQM":
            eta1 = c.d_eta(u)
            # S(eta) = eta'^2 * V-, T(eta) = eta'' + 2 w' eta'
            rows.append([e ** k if l == 0 else 0 for k, l in keys])
            rhs.append(eta1 * eta1 * model.v_minus(u))
            rows.append([e ** k if l == 1 else 0 for k, l in keys])
            rhs.append(c.d2_eta(u) + 2 * model.v_plus(u) * eta1)
            continue
        for s, value in ((1, model.v_plus(u)), (-1, model.v_minus(u))):
            den, e, e_near = probe._denominator(u, s)
            rows.append([e ** k * e_near ** l for k, l in keys])
            rhs.append(value * den)
    sol = solve_linear(rows, rhs)
    if not exact:
        sol = [complex(v).real if abs(complex(v).imag) < 1e-10 else complex(v) for v in sol]
    return PotentialCoefficients(2, dict(zip(keys, sol)), allow_degenerate=True)


# ---------------------------------------------------------------------------
# dual closure


def dual_closure_polys(model, exact: Optional[bool] = None) -> tuple:
    """(R0_dual, R1_dual, R-1_dual) as polynomials in eta.

    oQM uses the beta -> 0 limit: R0 = R1 = 0 and R-1 = -2 eta'^2.
    """
    op = _as_operator(model, exact)
    c, sh = op.coordinate, op.shift
    if sh.kind == "oQM":
        kinetic = op.kinetic if op.kinetic is not None else c.kinetic
        zero = Poly1((), "eta")
        return zero, zero, kinetic * (-2)
    deg_bound = 2 * max(op.L - 2, 0) + 4
    pts = op.samples(deg_bound + 1 + EXTRA_CHECK_POINTS)
    d1, d0, dm1 = [], [], []
    for u in pts:
        e = c.eta(u)
        up = c.eta_shifted(u, 1, sh) - e
        dn = c.eta_shifted(u, -1, sh) - e
        r0 = -up * dn
        d1.append((e, up + dn))
        d0.append((e, r0))
        dm1.append((e, op.eps * (op.v_plus(u) + op.v_minus(u)) * r0))
    fit = lambda data, bound: interpolate_poly(
        data if op.exact else [(complex(x), complex(y)) for x, y in data], bound, "eta")
    return fit(d0, 2), fit(d1, 1), fit(dm1, deg_bound)


def _random_poly(rng: random.Random, degree: int, exact: bool) -> Poly1:
    cs = [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(degree + 1)]
    if cs[-1] == 0:
        cs[-1] = Fraction(1)
    if not exact:
        cs = [float(v) for v in cs]
    return Poly1(tuple(cs), "eta")


def dual_closure_check(model, trials: int = 20, seed: int = 0,
                       exact: Optional[bool] = None, relative: bool = False,
                       polys: Optional[tuple] = None) -> float:
    """Max pointwise residual of the dual closure relation.

    At random points u and for random test polynomials f (degree <= 6):
    ``[eta,[eta,Ht]] f - (Ht (R0d f) + [eta,Ht](R1d f) + R-1d f)``.
    With ``relative`` each residual is divided by the largest term.
    ``polys`` overrides the interpolated (R0d, R1d, R-1d).
    """
    op = _as_operator(model, exact)
    rng = random.Random(seed)
    R0, R1, Rm1 = dual_closure_polys(op) if polys is None else polys
    eta_p = Poly1((0, Fraction(1) if op.exact else 1.0), "eta")
    if isinstance(model, Model):
        sampler = lambda: model.sample_points(1, exact=op.exact, rng=rng)[0]
    elif isinstance(model, UnifiedPotential):
        sampler = lambda: model.sample_points(1, exact=op.exact, rng=rng)[0]
    else:
        sampler = lambda: op.samples(1)[0]
    worst = 0.0
    for _ in range(trials):
        f = _random_poly(rng, rng.randint(0, 6), op.exact)
        u = sampler()
        e = op.coordinate.eta(u)
        H = lambda g: op.value(g, u)
        comm = lambda g: e * H(g) - H(eta_p * g)      # [eta, Ht] g at u
        lhs = e * comm(f) - comm(eta_p * f)
        rhs = H(R0 * f) + comm(R1 * f) + Rm1(e) * f(e)
        res = magnitude(lhs - rhs)
        if relative:
            res /= max(1.0, magnitude(lhs), magnitude(rhs))
        worst = max(worst, res)
    return worst


# ---------------------------------------------------------------------------
# three-term recurrence


@dataclass(frozen=True)
class Recurrence:
    """eta P_n = A_n P_{n+1} + B_n P_n + C_n P_{n-1} for n = 0..n_max."""

    A: tuple
    B: tuple
    C: tuple
    polys: tuple = ()

    def positivity(self) -> list:
        """A_{n-1} C_n for n = 1..n_max."""
        return [self.A[n - 1] * self.C[n] for n in range(1, len(self.C))]


def three_term_recurrence(model, n_max: int, exact: Optional[bool] = None,
                          tol: float = 1e-9) -> Recurrence:
    """Expand eta P_n in the eigenpolynomial basis (monic normalization).

    The expansion is an exact triangular solve; any component outside
    P_{n-1}, P_n, P_{n+1} beyond ``tol`` raises.  For finite lattices the
    polynomial P_{n_max+1} may lie one degree beyond N.
    """
    if n_max < 0:
        raise ValidationError("n_max must be non-negative")
    polys = eigenpolynomials(model, n_max + 1, exact, allow_beyond_lattice=True)
    A, B, C = [], [], []
    for n in range(n_max + 1):
        target = Poly1((0, Fraction(1)), "eta") * polys[n]
        coeffs = _expand(target, polys[: n + 2])
        exact_mode = all(is_exact(v) for v in coeffs)
        scale = max(1.0, max(magnitude(v) for v in coeffs))
        for k, v in enumerate(coeffs):
            if k < n - 1 and (v != 0 if exact_mode else magnitude(v) > tol * scale):
                raise StructureError(f"eta P_{n} has a P_{k} component {v}")
        A.append(coeffs[n + 1])
        B.append(coeffs[n])
        C.append(coeffs[n - 1] if n >= 1 else 0 * coeffs[n])
    return Recurrence(tuple(A), tuple(B), tuple(C), tuple(polys))


def _expand(target: Poly1, basis: list) -> list:
    """Coefficients of target in a triangular (degree k) basis by peeling."""
    rem = target
    out = [0] * len(basis)
    for k in range(len(basis) - 1, -1, -1):
        lead = basis[k].leading
        c = rem.coeff(k) / lead
        out[k] = c
        rem = rem - basis[k] * c
    if not rem.is_zero() and rem.max_abs_coeff() > 1e-9 * max(1.0, target.max_abs_coeff()):
        raise InterpolationError(f"target not in span of basis (residual {rem.max_abs_coeff():.3e})")
    return out
