"""Linear algebra: exact elimination, symmetric eigensolver, spectral calculus.

Matrices are numpy arrays; exact matrices use ``dtype=object`` holding
Fractions or QQi values.  The structure of a matrix is detected from its
sparsity pattern by :func:`structure_of` rather than stored.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from ..errors import (DomainError, InconsistentSystemError,
                      SingularSystemError, StructureError)
from .scalar import is_exact, magnitude, to_float

__all__ = [
    "structure_of",
    "solve_linear",
    "eig_symmetric",
    "matrix_function",
    "to_float_array",
    "max_abs",
]

EIG_RESIDUAL_TOL = 1e-12
_SYM_TOL = 1e-12


def to_float_array(m) -> np.ndarray:
    m = np.asarray(m)
    if m.dtype != object:
        return m
    flat = [to_float(v) for v in m.ravel()]
    dtype = complex if any(isinstance(v, complex) for v in flat) else float
    return np.array(flat, dtype=dtype).reshape(m.shape)


def max_abs(m) -> float:
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    if m.dtype == object:
        return max(magnitude(v) for v in m.ravel())
    return float(np.max(np.abs(m)))


def structure_of(m) -> str:
    """One of ``dense``, ``symmetric-tridiagonal``, ``bidiagonal``, ``upper-triangular``.

    Diagonal matrices report ``symmetric-tridiagonal`` when square.
    """
    m = np.asarray(m)
    rows, cols = m.shape
    nz = np.array([[m[i, j] != 0 for j in range(cols)] for i in range(rows)], dtype=bool)
    i, j = np.nonzero(nz) if nz.size else (np.array([], int), np.array([], int))
    offsets = set((j - i).tolist())
    if rows == cols and offsets <= {-1, 0, 1}:
        symmetric = all(m[a, b] == m[b, a] for a, b in zip(i, j))
        if symmetric:
            return "symmetric-tridiagonal"
    if offsets <= {0, 1} and offsets:
        return "bidiagonal"
    if rows == cols and all(o >= 0 for o in offsets):
        return "upper-triangular"
    return "dense"


def _solve_exact(A: Sequence[Sequence], b: Sequence):
    def up(v):
        return Fraction(v) if isinstance(v, int) else v

    rows = [[up(v) for v in r] + [up(rhs)] for r, rhs in zip(A, b)]
    n_rows = len(rows)
    n_cols = len(rows[0]) - 1 if rows else 0
    pivots = []
    r = 0
    for c in range(n_cols):
        piv = next((k for k in range(r, n_rows) if rows[k][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for k in range(n_rows):
            if k != r and rows[k][c] != 0:
                f = rows[k][c]
                rows[k] = [vk - f * vr for vk, vr in zip(rows[k], rows[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    bad = [row[-1] for row in rows[r:] if row[-1] != 0]
    if bad:
        worst = max(magnitude(v) for v in bad)
        raise InconsistentSystemError(
            f"linear system has no exact solution (residual {worst:.3e})", residual=worst)
    if len(pivots) < n_cols:
        free = sorted(set(range(n_cols)) - set(pivots))
        raise SingularSystemError(f"solution not unique; free unknowns {free}")
    x = [0] * n_cols
    for row_idx, c in enumerate(pivots):
        x[c] = rows[row_idx][-1]
    return x


def solve_linear(A, b, tol: float = 1e-9):
    """Solve ``A x = b`` (possibly over-determined), with consistency check.

    Exact inputs are solved by Gauss-Jordan elimination over the rationals
    (or Gaussian rationals).  Float inputs use least squares and raise if
    the residual exceeds ``tol`` relative to ``|b|``.
    """
    A = [list(r) for r in A]
    b = list(b)
    if all(is_exact(v) for r in A for v in r) and all(is_exact(v) for v in b):
        return _solve_exact(A, b)
    Af = to_float_array(np.array(A, dtype=object))
    bf = to_float_array(np.array(b, dtype=object))
    x, _, rank, _ = np.linalg.lstsq(Af, bf, rcond=None)
    if rank < Af.shape[1]:
        raise SingularSystemError(f"solution not unique (rank {rank} < {Af.shape[1]})")
    res = float(np.max(np.abs(Af @ x - bf))) if len(bf) else 0.0
    if res > tol * max(1.0, float(np.max(np.abs(bf)))):
        raise InconsistentSystemError(
            f"linear system has no solution within tolerance (residual {res:.3e})",
            residual=res)
    return list(x)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    vecs = vecs.copy()
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        idx = np.flatnonzero(np.abs(col) > 1e-12 * max(1.0, np.max(np.abs(col))))
        if idx.size and col[idx[0]] < 0:
            vecs[:, k] = -col
    return vecs


def eig_symmetric(m):
    """Ascending eigenvalues and orthonormal eigenvectors of a real symmetric matrix.

    Each eigenvector is signed so that its first nonzero component is
    positive.  Raises :class:`StructureError` for non-symmetric input.
    """
    mf = to_float_array(m)
    if mf.ndim != 2 or mf.shape[0] != mf.shape[1]:
        raise StructureError(f"square matrix required, got shape {mf.shape}")
    if np.iscomplexobj(mf):
        if np.max(np.abs(mf.imag), initial=0.0) > 0:
            raise StructureError("real symmetric matrix required")
        mf = mf.real
    scale = max(1.0, float(np.max(np.abs(mf), initial=0.0)))
    if np.max(np.abs(mf - mf.T), initial=0.0) > _SYM_TOL * scale:
        raise StructureError("matrix is not symmetric")
    mf = (mf + mf.T) / 2
    vals, vecs = np.linalg.eigh(mf)
    return vals, _fix_signs(vecs)


def matrix_function(m, f: Callable, eig=None) -> np.ndarray:
    """``V f(Lambda) V^T`` for symmetric ``m``.

    ``eig`` may pass a precomputed ``(vals, vecs)`` pair.  Raises
    :class:`DomainError` naming the eigenvalue where ``f`` is singular.
    """
    vals, vecs = eig if eig is not None else eig_symmetric(m)
    fv = []
    for lam in vals:
        try:
            v = f(lam)
        except (ZeroDivisionError, FloatingPointError, ValueError) as exc:
            raise DomainError(f"function singular at eigenvalue {lam!r}: {exc}") from exc
        if not np.isfinite(v):
            raise DomainError(f"function not finite at eigenvalue {lam!r}")
        fv.append(v)
    fv = np.asarray(fv)
    return (vecs * fv) @ vecs.T
