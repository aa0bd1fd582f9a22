import random
import warnings

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from dqm import citations
from dqm.errors import DiscrepancyWarning, DomainError, ValidationError
from dqm.lattice import (build_A, build_H, crum_chain, crum_step, deletion_set_admissible,
                         diagonalize, groundstate_vector, pdqm_shape_invariance_check,
                         oqm_shape_invariance_check, rodrigues_chain, shape_invariance_check)
from dqm.models import RDQM_FAMILIES, PDQM_FAMILIES, default_model, make_model, random_model
from dqm.orthogonality import lattice_gram

seeds = st.integers(0, 10_000)


def hahn111(N=1):
    return make_model("hahn", {"a": 1, "b": 1, "N": N})


def test_hahn_small_matrices():
    np.testing.assert_allclose(build_A(hahn111()).matrix, [[1, -1]])
    np.testing.assert_allclose(build_H(hahn111()).matrix, [[1, -1], [-1, 1]])
    np.testing.assert_allclose(groundstate_vector(hahn111()), np.ones(2) / np.sqrt(2))
    np.testing.assert_allclose(groundstate_vector(hahn111(2)), np.ones(3) / np.sqrt(3))


def test_hahn_small_spectrum():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DiscrepancyWarning)
        rep = diagonalize(hahn111())
    np.testing.assert_allclose(rep.eigenvalues, [0, 2], atol=1e-14)
    assert rep.passed


@pytest.mark.parametrize("family", RDQM_FAMILIES)
def test_A_zero_mode_and_H_entries(family):
    m = default_model(family)
    A = build_A(m).matrix
    assert A.shape == (m.N, m.N + 1)
    assert np.max(np.abs(A @ groundstate_vector(m))) < 1e-14
    H = build_H(m).matrix
    np.testing.assert_allclose(A.T @ A, H, atol=1e-12 * np.max(np.abs(H)))
    assert np.all(groundstate_vector(m) > 0)


@pytest.mark.parametrize("family", RDQM_FAMILIES)
@settings(max_examples=10)
@given(seed=seeds, N=st.integers(1, 10))
def test_spectrum_matches_formula_and_tridiagonal_oracle(family, seed, N):
    m = random_model(family, random.Random(seed), N=N)
    H = build_H(m).matrix
    oracle = scipy.linalg.eigh_tridiagonal(np.diag(H), np.diag(H, 1), eigvals_only=True)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DiscrepancyWarning)
        rep = diagonalize(m)
    scale = max(1.0, np.max(np.abs(oracle)))
    np.testing.assert_allclose(rep.eigenvalues, oracle, atol=1e-11 * scale)
    assert max(rep.residuals) <= 1e-10
    assert rep.orthogonality_defect <= 1e-12
    assert abs(rep.eigenvalues[0]) <= 1e-11 * scale
    assert all(np.diff(rep.eigenvalues) > 0)


@pytest.mark.parametrize("family", RDQM_FAMILIES)
@settings(max_examples=10)
@given(seed=seeds, N=st.integers(1, 10))
def test_partner_spectrum_is_parent_minus_ground(family, seed, N):
    rep = crum_step(random_model(family, random.Random(seed), N=N))
    assert rep.passed


def test_eigenvectors_match_eigenpolynomials():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DiscrepancyWarning)
        rep = diagonalize(default_model("racah"))
    assert max(rep.eigvec_defect) < 1e-8


@pytest.mark.parametrize("family", ["hahn", "racah", "q_racah"])
def test_printed_energy_flagged(family):
    with pytest.warns(DiscrepancyWarning, match=citations.DATA_BLOCKS):
        rep = diagonalize(default_model(family))
    assert rep.flags and rep.flags[0]["max_printed_deviation"] > 1e-3
    assert rep.passed


def test_q_racah_n4_spectrum():
    m = default_model("q_racah", N=4)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DiscrepancyWarning)
        rep = diagonalize(m)
    q, dt = float(m.q), float(m.d_tilde)
    expected = [(q ** -n - 1) * (1 - dt * q ** n) for n in range(5)]
    np.testing.assert_allclose(rep.eigenvalues, expected, rtol=1e-10, atol=1e-12)


def test_spectrum_csv_and_json():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DiscrepancyWarning)
        rep = diagonalize(hahn111(3))
    lines = rep.to_csv().splitlines()
    assert lines[0] == "n,E_formula,E_computed,residual"
    assert len(lines) == 5
    assert '"rows"' in rep.to_json()


@pytest.mark.parametrize("family", RDQM_FAMILIES)
@settings(max_examples=8)
@given(seed=seeds)
def test_shape_invariance_exact(family, seed):
    rep = shape_invariance_check(random_model(family, random.Random(seed), N=6))
    assert rep.exact_residual == 0 and rep.product_residual == 0 and rep.sum_residual == 0
    assert rep.matrix_residual < 1e-9


def test_shape_invariance_examples():
    assert shape_invariance_check(hahn111(3)).residual == 0
    rep = shape_invariance_check(default_model("q_racah"))
    assert rep.residual == 0 and rep.kappa == 2
    assert shape_invariance_check(default_model("racah"), e1_offset=1).residual > 0.5


@pytest.mark.parametrize("family", PDQM_FAMILIES)
def test_pdqm_shape_invariance(family):
    rep = pdqm_shape_invariance_check(default_model(family), samples=20)
    assert rep["exact"] and rep["residual"] == 0
    bad = pdqm_shape_invariance_check(default_model(family), samples=5, e1_offset=1)
    assert bad["sum_residual"] > 0


def test_continuous_hahn_listed_parameters():
    m = make_model("continuous_hahn", {"a1": 1, "a2": 2})
    assert pdqm_shape_invariance_check(m)["residual"] == 0


@pytest.mark.parametrize("family", ["hermite", "laguerre", "jacobi"])
def test_oqm_shape_invariance(family):
    assert oqm_shape_invariance_check(default_model(family))["residual"] == 0


def test_single_site_lattice_is_rejected():
    with pytest.raises(ValidationError, match="N>=1"):
        make_model("hahn", {"a": 1, "b": 1, "N": 0})
    # the shifted model of an N=1 lattice has one site and nothing to delete
    with pytest.raises(DomainError):
        shape_invariance_check(hahn111().shifted(1))


def test_crum_examples():
    rep = crum_step(hahn111())
    np.testing.assert_allclose(rep.partner.matrix, [[2]])
    with pytest.raises(DomainError):
        crum_step(hahn111().shifted(1))


@pytest.mark.parametrize("family", RDQM_FAMILIES)
def test_crum_chain_deletes_levels(family):
    m = default_model(family)
    spectra = crum_chain(m)
    assert len(spectra) == m.N + 1
    for k, spec in enumerate(spectra):
        assert len(spec) == m.N + 1 - k
        np.testing.assert_allclose(spec, spectra[0][k:], rtol=1e-8, atol=1e-9)


@pytest.mark.parametrize("degrees, ok", [([1, 2], True), ([1], False), ([], True),
                                         ([0, 1, 2], True), ([2, 4], False), ([3, 4, 7, 8], True)])
def test_deletion_set(degrees, ok):
    assert deletion_set_admissible(degrees) is ok


def test_deletion_set_duplicates():
    with pytest.raises(ValidationError):
        deletion_set_admissible([2, 2])


def test_rodrigues_examples():
    rep = rodrigues_chain(hahn111(), 0)
    np.testing.assert_allclose(rep.vector, groundstate_vector(hahn111()))
    rep = rodrigues_chain(hahn111(), 1)
    np.testing.assert_allclose(np.abs(rep.vector), np.ones(2) / np.sqrt(2))
    assert rep.vector[0] * rep.vector[1] < 0
    rep = rodrigues_chain(default_model("q_racah", N=4), 2)
    assert rep.overlap >= 1 - 1e-10 and rep.energy_identity


@pytest.mark.parametrize("family", RDQM_FAMILIES)
def test_rodrigues_all_levels(family):
    m = default_model(family)
    for n in range(m.N + 1):
        rep = rodrigues_chain(m, n)
        assert rep.overlap >= 1 - 1e-10
        assert rep.energy_identity


@pytest.mark.parametrize("family", RDQM_FAMILIES)
@settings(max_examples=5)
@given(seed=seeds)
def test_weight_orthogonality_exact(family, seed):
    g = lattice_gram(random_model(family, random.Random(seed), N=6))
    assert g.max_offdiag() == 0
