import random
import warnings
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dqm import citations
from dqm.algebra import (FrequencyPair, build_ladder, closure_check, closure_fit,
                         compare_closure, heisenberg_check, spectrum_for_model, recurrence_vs_ladder,
                         report_json, spectrum_from_closure, verification_report)
from dqm.errors import DiscrepancyWarning, DomainError
from dqm.kernel import Poly1
from dqm.lattice import diagonalize
from dqm.models import FAMILIES, RDQM_FAMILIES, default_model, make_model, random_model
from dqm.models.base import ClosureData

seeds = st.integers(0, 10_000)
MATCHING = [f for f in FAMILIES if f not in ("jacobi", "q_racah")]


def table(r0, r1, rm1):
    y = lambda *c: Poly1(tuple(F(v) for v in c), "y")
    return ClosureData(y(*r0), y(*r1), y(*rm1))


def test_hermite_closure_by_hand():
    assert closure_check(default_model("hermite"), table([4], [], [])) == 0
    assert closure_check(default_model("hermite"), table([3], [], [])) > 0


def test_hahn_printed_table_on_lattice():
    m = default_model("hahn")
    assert closure_check(m, m.closure_table()) == 0


@pytest.mark.parametrize("family", FAMILIES)
def test_fitted_table_is_exact(family):
    m = default_model(family)
    assert closure_check(m, closure_fit(m)) == 0


@pytest.mark.parametrize("family", MATCHING)
def test_fit_reproduces_printed_table(family):
    assert compare_closure(default_model(family)).matches


def test_hermite_and_continuous_hahn_fits():
    f = closure_fit(default_model("hermite"))
    assert f.R0 == Poly1((F(4),), "y") and f.R1.is_zero() and f.Rm1.is_zero()
    m = default_model("continuous_hahn")
    s = (m.a1 + m.a2).real
    f = closure_fit(m)
    assert f.R1 == Poly1((F(2),), "y")
    assert f.R0 == Poly1((4 * s * (s - 1), F(4)), "y")


def test_jacobi_printed_row_rejected():
    m = default_model("jacobi")
    cmp = compare_closure(m)
    assert not cmp.matches and "R1[0]" in cmp.mismatches
    assert cmp.printed_residual > 0 and cmp.fitted_residual == 0
    assert cmp.citation == citations.JACOBI_CLOSURE
    assert cmp.fitted.R1 == Poly1((F(8),), "y")


def test_q_racah_printed_constant_rejected():
    m = default_model("q_racah")
    cmp = compare_closure(m)
    assert cmp.mismatches == ["Rm1[0]"]
    assert cmp.printed_residual > 0 and cmp.fitted_residual == 0


def test_q_racah_printed_constant_agrees_when_dtilde_is_q():
    m = make_model("q_racah", {"a": F(1, 128), "b": F(1, 2), "d": F(1, 2), "q": F(1, 2), "N": 5})
    assert m.d_tilde == m.q
    assert compare_closure(m).matches


@pytest.mark.parametrize("family", FAMILIES)
def test_frequency_identities(family):
    assert FrequencyPair(closure_fit(default_model(family), exact=True)).identity_residual() < 1e-12


@pytest.mark.parametrize("family", FAMILIES)
def test_alpha_plus_positive_on_spectrum(family):
    m = default_model(family)
    freq = FrequencyPair(closure_fit(m))
    top = m.N if m.N is not None else 8
    assert all(complex(freq.alpha_plus(m.energy(n))).real > 0 for n in range(top))


def test_recursion_examples():
    s = spectrum_from_closure(table([4], [], []), 5)
    assert s.energies == [2 * n for n in range(6)] and s.consistent
    s = spectrum_from_closure(table([16], [], [0, 0, 1]), 5)
    assert s.energies == [4 * n for n in range(6)]
    m = default_model("hahn")
    s = spectrum_from_closure(closure_fit(m), m.N)
    assert s.consistent
    assert s.energies == [n * (n + m.a + m.b - 1) for n in range(m.N + 1)]


def test_ambiguous_first_step():
    # Hahn with a+b < 1: E(-1) = 2-a-b exceeds E(1) = a+b
    m = make_model("hahn", {"a": F(1, 4), "b": F(1, 4), "N": 4})
    s = spectrum_from_closure(closure_fit(m), 4)
    assert s.ambiguous_start and s.energies[1] == F(3, 2)
    s = spectrum_for_model(m)
    assert s.start == "minus" and s.consistent
    assert s.energies == [m.energy(n) for n in range(5)]
    assert not spectrum_from_closure(closure_fit(default_model("hahn")), 3).ambiguous_start


def test_recursion_rejects_negative_discriminant():
    with pytest.raises(DomainError):
        spectrum_from_closure(table([-1], [], []), 3)


def test_recursion_flags_backward_inconsistency():
    # R1 = y breaks the downward step E(n-1) = E(n) + alpha_-(E(n))
    s = spectrum_from_closure(table([4], [0, 1], []), 3)
    assert not s.consistent


@pytest.mark.parametrize("family", RDQM_FAMILIES)
@settings(max_examples=6)
@given(seed=seeds, N=st.integers(1, 10))
def test_recursion_matches_diagonalization(family, seed, N):
    m = random_model(family, random.Random(seed), N=N)
    try:
        s = spectrum_for_model(m)
    except DomainError:
        return
    assert s.consistent
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DiscrepancyWarning)
        vals = diagonalize(m).eigenvalues
    for e, v in zip(s.energies, vals):
        assert abs(float(e) - v) <= 1e-10 * max(1, abs(v))


def test_heisenberg_t0_is_identity():
    assert heisenberg_check(default_model("hahn"), ts=[0.0]) < 1e-12


def test_heisenberg_hahn_and_racah():
    assert heisenberg_check(default_model("hahn", N=6), ts=[1.0]) <= 1e-10
    assert heisenberg_check(default_model("racah", N=8)) <= 1e-8


@pytest.mark.parametrize("family", RDQM_FAMILIES)
@settings(max_examples=5)
@given(seed=seeds, N=st.integers(2, 8), t=st.floats(0, 5))
def test_heisenberg_random(family, seed, N, t):
    m = random_model(family, random.Random(seed), N=N)
    try:
        res = heisenberg_check(m, ts=[t])
    except DomainError:
        return
    assert res <= 1e-8 * max(1.0, F(m.energy(N)) if not hasattr(m.energy(N), "imag") else 1.0)


def test_refusal_when_r0_vanishes():
    m = make_model("hahn", {"a": 1, "b": 1, "N": 4})
    with pytest.raises(DomainError, match="R0"):
        heisenberg_check(m)
    with pytest.raises(DomainError):
        build_ladder(m)


@pytest.mark.parametrize("family", RDQM_FAMILIES)
def test_ladder_properties(family):
    lad = build_ladder(default_model(family))
    scale = max(1.0, float(np.max(np.abs(lad.a_plus))))
    assert lad.annihilation_residual() <= 1e-12 * scale
    leak = lad.leakage()
    assert leak["plus"] <= 1e-10 * scale and leak["minus"] <= 1e-10 * scale
    assert lad.sum_rule_residual() <= 1e-10 * scale
    assert lad.decomposition_residual() <= 1e-8 * scale
    assert lad.nilpotency_residual() <= 1e-10


def test_hahn_n5_ladder_band():
    lad = build_ladder(default_model("hahn", N=5))
    assert max(lad.leakage().values()) <= 1e-10


def test_recurrence_vs_ladder_small():
    rep = recurrence_vs_ladder(make_model("hahn", {"a": 1, "b": 1, "N": 1}))
    assert rep["off_diagonal"] == pytest.approx([-0.5], abs=1e-14) or \
        rep["off_diagonal"] == pytest.approx([0.5], abs=1e-14)
    assert rep["ladder"].startswith("skipped")


@pytest.mark.parametrize("family", RDQM_FAMILIES)
def test_recurrence_vs_ladder(family):
    rep = recurrence_vs_ladder(default_model(family))
    assert rep["tridiagonal_defect"] < 1e-10
    assert rep["diagonal_residual"] < 1e-9
    assert rep["offdiag_sq_residual"] < 1e-9
    assert rep["ladder_sum_rule"] < 1e-9


def test_verification_report_shape():
    rep = verification_report(default_model("jacobi"))
    assert set(rep) >= {"model", "params", "printed_table", "fitted_table", "residuals", "discrepancies"}
    assert rep["discrepancies"][0]["kind"] == "closure-table"
    assert '"model": "jacobi"' in report_json(rep)
    assert verification_report(default_model("wilson"))["discrepancies"] == []
