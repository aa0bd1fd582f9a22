"""Real-shift models as finite matrices on the lattice x = 0..N.

``A`` is the N x (N+1) bidiagonal matrix with ``sqrt(B(x))`` at (x, x) and
``-sqrt(D(x+1))`` at (x, x+1); ``H = A^T A``.  Square roots are taken in
floating point.  Exact checks use the squared tridiagonal data
``(diag, off_sq)`` instead, since a symmetric tridiagonal matrix with
non-positive off-diagonal is fixed by its diagonal and off-diagonal squares.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import DiscrepancyWarning, DomainError, ValidationError
from .kernel import eig_symmetric, magnitude, to_float
from .models.base import Model
from .models.catalog import energy_discrepancy, exact_twin

__all__ = [
    "LatticeOperator", "tridiagonal_data", "partner_data", "build_A", "build_H",
    "htilde_lattice", "groundstate_weights", "groundstate_vector",
    "SpectrumReport", "diagonalize", "ShapeReport", "shape_invariance_check",
    "pdqm_shape_invariance_check", "oqm_shape_invariance_check", "CrumReport",
    "crum_step", "factorize_tridiagonal", "crum_chain",
    "deletion_set_admissible", "RodriguesReport", "rodrigues_chain",
    "eta_matrix",
]

SPECTRUM_TOL = 1e-10


def _require_rdqm(model: Model):
    if model.kind != "rdQM" or model.N is None:
        raise ValidationError(f"{model.family} is not a finite real-shift model")


@dataclass(frozen=True)
class LatticeOperator:
    """A lattice matrix plus its role (``A``, ``Adag``, ``H`` or ``H1``)."""

    matrix: np.ndarray
    role: str
    diag: Optional[tuple] = None
    off_sq: Optional[tuple] = None

    @property
    def shape(self):
        return self.matrix.shape


def tridiagonal_data(model: Model) -> tuple:
    """Exact ``(diag, off_sq)`` of H: ``B(x)+D(x)`` and ``B(x) D(x+1)``."""
    _require_rdqm(model)
    N = model.N
    B = [model.B(x) for x in range(N + 1)]
    D = [model.D(x) for x in range(N + 1)]
    for x in range(N + 1):
        if _negative(B[x]) or _negative(D[x]):
            raise ValidationError(f"{model.family}: B(x)>=0, D(x)>=0 violated at x={x}")
    diag = tuple(B[x] + D[x] for x in range(N + 1))
    off_sq = tuple(B[x] * D[x + 1] for x in range(N))
    return diag, off_sq


def partner_data(model: Model) -> tuple:
    """Exact ``(diag, off_sq)`` of A A^T: ``B(x)+D(x+1)``, ``B(x+1) D(x+1)``."""
    _require_rdqm(model)
    N = model.N
    diag = tuple(model.B(x) + model.D(x + 1) for x in range(N))
    off_sq = tuple(model.B(x + 1) * model.D(x + 1) for x in range(N - 1))
    return diag, off_sq


def _negative(v) -> bool:
    v = to_float(v)
    if isinstance(v, complex):
        return abs(v.imag) > 0 or v.real < 0
    # tiny negative round-off at B(N) = 0 in float mode is not a violation
    return v < -1e-14


def _sqrt(v) -> float:
    v = to_float(v)
    if isinstance(v, complex):
        v = v.real
    return math.sqrt(max(v, 0.0))


def build_A(model: Model) -> LatticeOperator:
    _require_rdqm(model)
    N = model.N
    a = np.zeros((N, N + 1))
    for x in range(N):
        b, d = model.B(x), model.D(x + 1)
        if _negative(b) or _negative(d):
            raise ValidationError(f"{model.family}: B(x)>=0, D(x)>=0 violated near x={x}")
        a[x, x] = _sqrt(b)
        a[x, x + 1] = -_sqrt(d)
    return LatticeOperator(a, "A")


def build_H(model: Model) -> LatticeOperator:
    """H from its entry formulas (not by multiplying A)."""
    diag, off_sq = tridiagonal_data(model)
    n = len(diag)
    h = np.zeros((n, n))
    for x in range(n):
        h[x, x] = float(to_float(diag[x]).real if isinstance(to_float(diag[x]), complex)
                        else to_float(diag[x]))
    for x in range(n - 1):
        h[x, x + 1] = h[x + 1, x] = -_sqrt(off_sq[x])
    return LatticeOperator(h, "H", diag, off_sq)


def htilde_lattice(model: Model) -> np.ndarray:
    """Exact lattice matrix of Ht = phi0^-1 H phi0 (object dtype).

    Row x: ``B(x)+D(x)`` on the diagonal, ``-B(x)`` at x+1, ``-D(x)`` at x-1.
    """
    _require_rdqm(model)
    N = model.N
    one = model.one
    m = np.empty((N + 1, N + 1), dtype=object)
    m[:, :] = 0 * one
    for x in range(N + 1):
        b, d = model.B(x), model.D(x)
        m[x, x] = b + d
        if x < N:
            m[x, x + 1] = -b
        if x > 0:
            m[x, x - 1] = -d
    return m


def eta_matrix(model: Model, exact: bool = False) -> np.ndarray:
    _require_rdqm(model)
    vals = [model.eta(Fraction(x) if model.exact else float(x)) for x in range(model.N + 1)]
    if exact:
        m = np.empty((len(vals), len(vals)), dtype=object)
        m[:, :] = 0 * model.one
        for i, v in enumerate(vals):
            m[i, i] = v
        return m
    return np.diag([float(to_float(v)) for v in vals])


def groundstate_weights(model: Model) -> list:
    """phi0(x)^2 = prod_{y<x} B(y)/D(y+1), exact in exact mode."""
    _require_rdqm(model)
    return [model.product_weight(x) for x in range(model.N + 1)]


def groundstate_vector(model: Model) -> np.ndarray:
    w = np.array([float(to_float(v)) for v in groundstate_weights(model)])
    v = np.sqrt(w)
    return v / np.linalg.norm(v)


# ---------------------------------------------------------------------------
# spectrum


@dataclass
class SpectrumReport:
    family: str
    params: dict
    eigenvalues: list
    energies: list
    residuals: list
    eig_residuals: list
    orthogonality_defect: float
    eigvec_defect: list
    flags: list = field(default_factory=list)
    tol: float = SPECTRUM_TOL
    eigenvectors: Optional[np.ndarray] = None

    @property
    def passed(self) -> bool:
        return (all(r <= self.tol for r in self.residuals)
                and self.orthogonality_defect <= 1e-12 * max(1, len(self.eigenvalues))
                and all(r <= 1e-8 for r in self.eigvec_defect))

    def rows(self, n_max: Optional[int] = None) -> list:
        n = len(self.eigenvalues) if n_max is None else min(n_max + 1, len(self.eigenvalues))
        return [{"n": k, "E_formula": float(to_float(self.energies[k])),
                 "E_computed": float(self.eigenvalues[k]), "residual": float(self.residuals[k])}
                for k in range(n)]

    def to_csv(self, n_max: Optional[int] = None) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=["n", "E_formula", "E_computed", "residual"],
                           lineterminator="\r\n")
        w.writeheader()
        for row in self.rows(n_max):
            w.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in row.items()})
        return buf.getvalue()

    def to_dict(self, n_max: Optional[int] = None) -> dict:
        return {"family": self.family, "params": self.params, "rows": self.rows(n_max),
                "orthogonality_defect": self.orthogonality_defect,
                "max_eigvec_defect": max(self.eigvec_defect, default=0.0),
                "flags": self.flags, "tol": self.tol, "passed": self.passed}

    def to_json(self, n_max: Optional[int] = None) -> str:
        return json.dumps(self.to_dict(n_max), indent=2, sort_keys=True, ensure_ascii=False)


def _rel(a, b) -> float:
    b = float(to_float(b).real if isinstance(to_float(b), complex) else to_float(b))
    return abs(float(a) - b) / max(1.0, abs(b))


def diagonalize(model: Model, tol: float = SPECTRUM_TOL, warn: bool = True) -> SpectrumReport:
    """Full spectrum of H with comparisons to the energy formula and eigenpolynomials."""
    from .polyop import eigenpolynomials

    _require_rdqm(model)
    H = build_H(model).matrix
    vals, vecs = eig_symmetric(H)
    N = model.N
    energies = [model.energy(n) for n in range(N + 1)]
    residuals = [_rel(vals[n], energies[n]) for n in range(N + 1)]
    scale = max(1.0, float(np.max(np.abs(H))))
    eig_res = [float(np.linalg.norm(H @ vecs[:, n] - vals[n] * vecs[:, n])) / scale
               for n in range(N + 1)]
    ortho = float(np.max(np.abs(vecs.T @ vecs - np.eye(N + 1))))
    # phi_n(x) = phi0(x) P_n(eta(x)), compared up to sign
    phi0 = groundstate_vector(model)
    twin = exact_twin(model)
    polys = eigenpolynomials(twin, N)
    etas = [twin.eta(Fraction(x)) for x in range(N + 1)]
    defects = []
    for n, p in enumerate(polys):
        v = phi0 * np.array([float(to_float(p(e)).real if isinstance(to_float(p(e)), complex)
                                   else to_float(p(e))) for e in etas])
        v /= np.linalg.norm(v)
        col = vecs[:, n]
        defects.append(float(min(np.max(np.abs(v - col)), np.max(np.abs(v + col)))))
    flags = []
    flag = energy_discrepancy(model)
    if flag is not None:
        printed = [float(to_float(model.energy(n, printed=True))) for n in range(N + 1)]
        flag = dict(flag, max_printed_deviation=max(_rel(vals[n], printed[n]) for n in range(N + 1)))
        flags.append(flag)
        if warn:
            warnings.warn(f"{flag['message']} [{flag['citation']}]", DiscrepancyWarning, stacklevel=2)
    return SpectrumReport(model.family, model.describe()["params"], list(map(float, vals)),
                          energies, residuals, eig_res, ortho, defects, flags, tol, vecs)


# ---------------------------------------------------------------------------
# shape invariance


@dataclass
class ShapeReport:
    exact_residual: float
    matrix_residual: float
    product_residual: float
    sum_residual: float
    kappa: object
    e1: object

    @property
    def residual(self) -> float:
        return max(self.exact_residual, self.product_residual, self.sum_residual)

    def to_dict(self) -> dict:
        return {"exact_residual": self.exact_residual, "matrix_residual": self.matrix_residual,
                "product_residual": self.product_residual, "sum_residual": self.sum_residual,
                "kappa": str(self.kappa), "E1": str(self.e1)}


def _shifted(model: Model, s: int = 1) -> Model:
    try:
        return model.shifted(s)
    except ValidationError as exc:
        raise DomainError(f"{model.family}: parameters lambda+{s}*delta inadmissible: {exc}") from exc


def shape_invariance_check(model: Model, e1_offset=0) -> ShapeReport:
    """Residuals of A A^T = kappa A'^T A' + E(1) I with A' = A(lambda+delta).

    ``exact_residual`` compares the tridiagonal data (exact in exact mode);
    ``matrix_residual`` multiplies the float matrices; the two scalar
    identities are checked at every lattice point.  ``e1_offset`` perturbs
    E(1) (used to confirm that the check can fail).
    """
    _require_rdqm(model)
    if model.N < 1:
        raise DomainError("shape invariance needs N >= 1")
    nxt = _shifted(model, 1)
    kappa = model.kappa
    e1 = model.energy(1) + e1_offset
    pd, po = partner_data(model)
    nd, no = tridiagonal_data(nxt)
    diag_res = [magnitude(pd[x] - (kappa * nd[x] + e1)) for x in range(model.N)]
    off_res = [magnitude(po[x] - kappa * kappa * no[x]) for x in range(model.N - 1)]
    exact_res = max(diag_res + off_res, default=0.0)

    A = build_A(model).matrix
    A1 = build_A(nxt).matrix
    mat = A @ A.T - float(to_float(kappa)) * (A1.T @ A1) - float(to_float(e1)) * np.eye(model.N)
    matrix_res = float(np.max(np.abs(mat))) if mat.size else 0.0

    prod_res, sum_res = 0.0, 0.0
    for x in range(model.N):
        xv = Fraction(x) if model.exact else float(x)
        lhs = model.B(xv + 1) * model.D(xv + 1)
        rhs = kappa * kappa * nxt.B(xv) * nxt.D(xv + 1)
        prod_res = max(prod_res, magnitude(lhs - rhs))
        lhs = model.B(xv) + model.D(xv + 1)
        rhs = kappa * (nxt.B(xv) + nxt.D(xv)) + e1
        sum_res = max(sum_res, magnitude(lhs - rhs))
    return ShapeReport(exact_res, matrix_res, prod_res, sum_res, kappa, e1)


def pdqm_shape_invariance_check(model: Model, samples: int = 20, seed: int = 0,
                                e1_offset=0) -> dict:
    """Max residuals of the two functional shape-invariance identities.

    ``V(x - ig/2) V*(x - ig/2) = kappa^2 V'(x) V'*(x - ig)`` and
    ``V(x + ig/2) + V*(x - ig/2) = kappa (V'(x) + V'*(x)) - E(1)``, with
    primes denoting lambda + delta, at random sample coordinates.
    """
    import random
    from .errors import PoleError

    if model.kind != "pdQM":
        raise ValidationError(f"{model.family} is not a pure-imaginary-shift model")
    nxt = _shifted(model, 1)
    kappa = model.kappa
    e1 = model.energy(1) + e1_offset
    c, sh = model.coordinate, model.shift
    rng = random.Random(seed)
    exact = model.exact and nxt.exact
    worst_prod, worst_sum, used = 0.0, 0.0, 0
    tries = 0
    while used < samples:
        tries += 1
        if tries > 100 * samples:
            raise DomainError("could not find enough pole-free sample points")
        u = c.random_point(rng, exact, sh)
        try:
            uh = c.shifted(u, Fraction(1, 2), sh)      # x - i g/2
            um = c.shifted(u, Fraction(-1, 2), sh)     # x + i g/2
            u1 = c.shifted(u, 1, sh)                   # x - i g
            lhs1 = model.v_plus(uh) * model.v_minus(uh)
            rhs1 = kappa * kappa * nxt.v_plus(u) * nxt.v_minus(u1)
            lhs2 = model.v_plus(um) + model.v_minus(uh)
            rhs2 = kappa * (nxt.v_plus(u) + nxt.v_minus(u)) - e1
        except (PoleError, ZeroDivisionError):
            continue
        scale = 1.0 if exact else max(1.0, magnitude(lhs1), magnitude(lhs2))
        worst_prod = max(worst_prod, magnitude(lhs1 - rhs1) / scale)
        worst_sum = max(worst_sum, magnitude(lhs2 - rhs2) / scale)
        used += 1
    return {"product_residual": worst_prod, "sum_residual": worst_sum,
            "residual": max(worst_prod, worst_sum), "samples": used, "exact": exact,
            "kappa": str(kappa), "E1": str(e1)}


def oqm_shape_invariance_check(model: Model, samples: int = 20) -> dict:
    """``w'^2 - w'' = w'_+^2 + w''_+ + E(1)`` at sample points (w_+ at lambda+delta)."""
    if model.kind != "oQM":
        raise ValidationError(f"{model.family} is not an ordinary QM model")
    nxt = model.shifted(1)
    e1 = model.energy(1)
    worst = 0.0
    for u in model.sample_points(samples):
        wp, wpp = model.w_prime(u), model.w_second(u)
        vp, vpp = nxt.w_prime(u), nxt.w_second(u)
        worst = max(worst, magnitude(wp * wp - wpp - (vp * vp + vpp + e1)))
    return {"residual": worst, "samples": samples, "E1": str(e1)}


# ---------------------------------------------------------------------------
# Crum / intertwining


@dataclass
class CrumReport:
    partner: LatticeOperator
    spectrum: list
    parent_spectrum: list
    isospectral_residual: float
    mapped_residual: float
    inverse_residual: float

    @property
    def passed(self) -> bool:
        return max(self.isospectral_residual, self.mapped_residual, self.inverse_residual) <= 1e-10

    def to_dict(self) -> dict:
        return {"isospectral_residual": self.isospectral_residual,
                "mapped_residual": self.mapped_residual,
                "inverse_residual": self.inverse_residual, "passed": self.passed}


def crum_step(model: Model) -> CrumReport:
    """Partner H1 = A A^T and the intertwining relations between H and H1."""
    _require_rdqm(model)
    if model.N < 1:
        raise DomainError("N = 0: nothing to delete")
    A = build_A(model).matrix
    H = A.T @ A
    H1 = A @ A.T
    vals, vecs = eig_symmetric(H)
    vals1, _ = eig_symmetric(H1)
    iso = max(float(abs(vals1[k] - vals[k + 1]) / max(1.0, abs(vals[k + 1]))) for k in range(model.N))
    scale = max(1.0, float(np.max(np.abs(H))))
    mapped, inverse = 0.0, 0.0
    for n in range(1, model.N + 1):
        phi = vecs[:, n]
        phi1 = A @ phi
        mapped = max(mapped, float(np.max(np.abs(H1 @ phi1 - vals[n] * phi1))) / scale)
        back = A.T @ phi1 / vals[n]
        inverse = max(inverse, float(np.max(np.abs(back - phi))))
    return CrumReport(LatticeOperator(H1, "H1"), list(vals1), list(vals), iso, mapped, inverse)


def factorize_tridiagonal(M: np.ndarray) -> np.ndarray:
    """Bidiagonal ``A`` with ``A^T A = M`` for a singular PSD tridiagonal M.

    Row x of A has ``alpha_x`` at x and ``-beta_x`` at x+1, found by the
    Cholesky-like sweep ``alpha_0^2 = M00``, ``beta_x = -M[x,x+1]/alpha_x``,
    ``alpha_x^2 = M[x,x] - beta_{x-1}^2``.
    """
    n = M.shape[0] - 1
    A = np.zeros((n, n + 1))
    prev_beta = 0.0
    for x in range(n):
        a2 = M[x, x] - prev_beta ** 2
        if a2 <= 0:
            raise DomainError(f"tridiagonal matrix is not positive semi-definite at row {x}")
        alpha = math.sqrt(a2)
        beta = -M[x, x + 1] / alpha
        A[x, x], A[x, x + 1] = alpha, -beta
        prev_beta = beta
    return A


def crum_chain(model: Model, steps: Optional[int] = None) -> list:
    """Spectra of H^[0], H^[1], ... obtained by successive deletion of the ground level."""
    _require_rdqm(model)
    steps = model.N if steps is None else steps
    H = build_H(model).matrix
    shift = 0.0
    spectra = [list(eig_symmetric(H)[0])]
    for _ in range(steps):
        A = factorize_tridiagonal(H - shift * np.eye(H.shape[0]))
        H = A @ A.T + shift * np.eye(A.shape[0])
        vals = eig_symmetric(H)[0]
        spectra.append(list(vals))
        shift = float(vals[0])
    return spectra


def deletion_set_admissible(degrees) -> bool:
    """True iff prod_j (m - d_j) >= 0 for every non-negative integer m."""
    degrees = list(degrees)
    if len(set(degrees)) != len(degrees):
        raise ValidationError(f"deletion degrees must be distinct, got {degrees}")
    if any(d < 0 or int(d) != d for d in degrees):
        raise ValidationError("deletion degrees must be non-negative integers")
    top = max(degrees, default=0) + 1
    for m in range(top + 1):
        prod = 1
        for d in degrees:
            prod *= m - d
        if prod < 0:
            return False
    return True


# ---------------------------------------------------------------------------
# Rodrigues chain


@dataclass
class RodriguesReport:
    n: int
    vector: np.ndarray
    overlap: float
    energy_sum: object
    energy: object

    @property
    def energy_identity(self) -> bool:
        return self.energy_sum == self.energy

    def to_dict(self) -> dict:
        return {"n": self.n, "overlap": self.overlap, "energy_sum": str(self.energy_sum),
                "energy": str(self.energy), "energy_identity": self.energy_identity}


def rodrigues_chain(model: Model, n: int) -> RodriguesReport:
    """``A(l0)^T A(l1)^T ... A(l_{n-1})^T phi0(l_n)``, normalized, vs the n-th eigenvector."""
    _require_rdqm(model)
    if not 0 <= n <= model.N:
        raise DomainError(f"n={n} outside 0..N={model.N}")
    chain = [model]
    for s in range(1, n + 1):
        try:
            chain.append(chain[-1].shifted(1))
        except ValidationError as exc:
            raise DomainError(f"lambda^[{s}] inadmissible: {exc}") from exc
    vec = groundstate_vector(chain[n])
    for s in range(n - 1, -1, -1):
        vec = build_A(chain[s]).matrix.T @ vec
    vec = vec / np.linalg.norm(vec)
    _, vecs = eig_symmetric(build_H(model).matrix)
    overlap = float(abs(vec @ vecs[:, n]))
    total = 0 * model.one
    for s in range(n):
        total = total + chain[0].kappa ** s * chain[s].energy(1)
    return RodriguesReport(n, vec, overlap, total, model.energy(n))
