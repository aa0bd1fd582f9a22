"""Acceptance criteria 1-12 at their stated tolerances.

Each test prints one ``[acceptance] ... PASS|FAIL`` line.  Two literal
sub-checks against printed formulas cannot hold and are strict xfails.
"""
import random
import warnings
from fractions import Fraction as F

import pytest

from dqm import citations
from dqm.algebra import (build_ladder, closure_fit, compare_closure,
                         heisenberg_check, spectrum_from_closure)
from dqm.errors import DiscrepancyWarning
from dqm.lattice import (crum_step, diagonalize, pdqm_shape_invariance_check,
                         rodrigues_chain, shape_invariance_check)
from dqm.models import FAMILIES, RDQM_FAMILIES, default_model, energy_discrepancy, make_model
from dqm.orthogonality import lattice_gram, quadrature_gram
from dqm.polyop import (PotentialCoefficients, build_unified_potential, dual_closure_check,
                        htilde_matrix, recover_vkl)
from dqm.qes import certify_invariance, restriction_matrix, solve_compensation
from test_qes import SETTINGS, random_coeffs


@pytest.fixture
def line(capsys):
    def emit(label, ok):
        with capsys.disabled():
            print(f"\n[acceptance] {label}: {'PASS' if ok else 'FAIL'}")
        return ok
    return emit


def item1_models():
    return [make_model("hahn", {"a": "3/2", "b": "5/2", "N": 20}),
            default_model("racah", N=10), default_model("q_racah", N=10)]


def _spectrum(m):
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", DiscrepancyWarning)
        rep = diagonalize(m)
    return rep, caught


def test_criterion_01_lattice_spectra(line):
    ok = True
    for m in item1_models():
        rep, caught = _spectrum(m)
        ok &= max(rep.residuals) <= 1e-10
        if m.family in ("hahn", "racah"):
            ok &= any(citations.DATA_BLOCKS in str(w.message) for w in caught)
    for fam in ("continuous_hahn", "wilson"):
        flag = energy_discrepancy(default_model(fam))
        ok &= flag is not None and flag["citation"] == citations.ENERGY_FACTOR
    assert line("criterion 1 (lattice spectra, factorization-consistent energies, factor-4 flags)", ok)


@pytest.mark.xfail(strict=True, reason="printed q-Racah energy exponent q^(n-1) contradicts H = A^dagger A")
def test_criterion_01_literal_q_racah_formula(line):
    m = default_model("q_racah", N=10)
    rep, _ = _spectrum(m)
    q, dt = m.q, m.d_tilde
    printed = [float((q ** -n - 1) * (1 - dt * q ** (n - 1))) for n in range(11)]
    worst = max(abs(v - e) / max(1, abs(e)) for v, e in zip(rep.eigenvalues, printed))
    assert line("criterion 1 (literal q-Racah formula (q^-n - 1)(1 - d~ q^(n-1)))", worst <= 1e-10)


def test_criterion_02_upper_triangular(line):
    ok = True
    for fam in FAMILIES:
        m = default_model(fam, N=8)
        mat = htilde_matrix(m, 8)
        ok &= all(mat[i, j] == 0 for i in range(9) for j in range(i))
        ok &= all(mat[j, j] == m.energy(j) for j in range(9))
    assert line("criterion 2 (exact upper triangularity, diagonal E(0..8))", ok)


def test_criterion_03_shape_invariance(line):
    ok = True
    for fam in RDQM_FAMILIES:
        for N in range(1, 9):
            r = shape_invariance_check(default_model(fam, N=N))
            ok &= r.exact_residual == 0 and r.product_residual == 0 and r.sum_residual == 0
    for fam in ("continuous_hahn", "wilson", "askey_wilson"):
        r = pdqm_shape_invariance_check(default_model(fam), samples=20)
        ok &= r["exact"] and r["residual"] == 0 and r["samples"] == 20
    assert line("criterion 3 (shape invariance exact, rdQM N<=8 and pdQM at 20 points)", ok)


def test_criterion_04_closure_tables(line):
    ok = True
    for fam in ("hermite", "laguerre", "continuous_hahn", "wilson", "askey_wilson", "hahn", "racah"):
        cmp = compare_closure(default_model(fam))
        ok &= cmp.matches and cmp.fitted_residual == 0
    cmp = compare_closure(default_model("jacobi"))
    ok &= cmp.fitted_residual == 0 and cmp.printed_residual > 0
    table = cmp.side_by_side()
    ok &= len(table) == 8 and {"printed", "fitted", "agree"} <= set(table[0])
    ok &= "violates" in cmp.summary()
    # q-Racah: the fitted row is exact; only the printed constant term fails (next test)
    cmp = compare_closure(default_model("q_racah"))
    ok &= cmp.fitted_residual == 0 and cmp.mismatches == ["Rm1[0]"]
    assert line("criterion 4 (closure fits, printed tables, Jacobi side by side)", ok)


@pytest.mark.xfail(strict=True, reason="printed q-Racah R-1[0] applies (1+d~) to both terms")
def test_criterion_04_literal_q_racah_table(line):
    cmp = compare_closure(default_model("q_racah"))
    assert line("criterion 4 (q-Racah printed closure row, coefficient by coefficient)", cmp.matches)


def test_criterion_05_spectrum_from_closure(line):
    ok = True
    for m in item1_models():
        s = spectrum_from_closure(closure_fit(m), 10)
        ok &= s.exact and s.consistent and not s.ambiguous_start
        ok &= s.energies == [m.energy(n) for n in range(11)]
        rep, _ = _spectrum(m)
        ok &= all(abs(float(e) - v) <= 1e-10 * max(1, abs(v)) for e, v in zip(s.energies, rep.eigenvalues))
    assert line("criterion 5 (recursion reproduces item-1 spectra, backward consistent)", ok)


def test_criterion_06_heisenberg(line):
    res = [heisenberg_check(default_model(fam, N=8), ts=(0.1, 1.0, 3.0)) for fam in ("hahn", "racah")]
    assert line(f"criterion 6 (Heisenberg solution, max residual {max(res):.1e})", max(res) <= 1e-8)


def test_criterion_07_ladder(line):
    ok = True
    for fam in RDQM_FAMILIES:
        for N in (2, 5, 8):
            lad = build_ladder(default_model(fam, N=N))
            leak = lad.leakage()
            ok &= lad.annihilation_residual() <= 1e-12
            ok &= leak["plus"] <= 1e-10 and leak["minus"] <= 1e-10
            ok &= lad.sum_rule_residual() <= 1e-10
    assert line("criterion 7 (ladder: annihilation, band structure, t=0 sum rule)", ok)


def test_criterion_08_crum(line):
    ok = all(crum_step(default_model(fam, N=N)).passed
             for fam in RDQM_FAMILIES for N in range(1, 11))
    assert line("criterion 8 (partner spectra and intertwining, N<=10)", ok)


def test_criterion_09_rodrigues(line):
    ok = True
    for fam in ("hahn", "q_racah"):
        for N in range(1, 9):
            m = default_model(fam, N=N)
            for n in range(N + 1):
                r = rodrigues_chain(m, n)
                ok &= r.overlap >= 1 - 1e-10 and r.energy_identity
    assert line("criterion 9 (Rodrigues chain overlaps and energy sum)", ok)


def test_criterion_10_orthogonality(line):
    ok = True
    for fam in RDQM_FAMILIES:
        for N in (1, 4, 10):
            ok &= lattice_gram(default_model(fam, N=N)).max_offdiag() == 0
    for fam in ("continuous_hahn", "wilson", "askey_wilson"):
        ok &= quadrature_gram(default_model(fam), 5).normalized_offdiag() <= 1e-6
    assert line("criterion 10 (exact lattice and quadrature orthogonality)", ok)


def test_criterion_11_unified_round_trip(line):
    ok = True
    for fam in FAMILIES:
        m = default_model(fam)
        pot = build_unified_potential(recover_vkl(m), m.coordinate, m.shift)
        pts = [F(x) for x in range(1, m.N)] if m.kind == "rdQM" else m.sample_points(8)
        ok &= all(pot.v_plus(u) == m.v_plus(u) and pot.v_minus(u) == m.v_minus(u) for u in pts)
    assert line("criterion 11 (recover_vkl round trip, all nine models)", ok)


def test_criterion_12_qes(line):
    rng = random.Random(2024)
    ok = True
    for trial in range(50):
        coord, shift = SETTINGS[trial % len(SETTINGS)]
        spec = solve_compensation(random_coeffs(rng, 3), coord, shift, rng.randint(1, 6))
        ok &= certify_invariance(spec) == 0
    m = default_model("hahn")
    coeffs = PotentialCoefficients(3, dict(recover_vkl(m).v), allow_degenerate=True)
    spec = solve_compensation(coeffs, m.coordinate, m.shift, 6)
    ok &= (restriction_matrix(spec) == htilde_matrix(m, 6)).all()
    ok &= all(dual_closure_check(default_model(fam), trials=20) == 0 for fam in FAMILIES)
    assert line("criterion 12 (L=3 certificates x50, L=2 reduction, dual closure)", ok)
