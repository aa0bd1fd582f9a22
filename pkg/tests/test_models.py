import math
import random
from fractions import Fraction as F

import mpmath
import pytest
from hypothesis import given, strategies as st

from dqm import citations
from dqm.errors import ValidationError
from dqm.kernel import QQi
from dqm.models import (FAMILIES, OQM_FAMILIES, PDQM_FAMILIES, RDQM_FAMILIES, ConfigError,
                        default_model, energy, energy_discrepancy, groundstate_weight,
                        make_model, model_from_config, parse_config, potential, random_model)

seeds = st.integers(0, 10_000)


def test_hahn_potentials_and_energy():
    m = make_model("hahn", {"a": 1, "b": 1, "N": 1})
    assert potential(m, "plus", 0) == 1
    assert potential(m, "minus", 0) == 0
    assert energy(m, 1) == 2
    assert energy(m, 1, printed=True) == 8


def test_laguerre_constraint_message():
    with pytest.raises(ValidationError, match=r"g>1 violated \(g=0.5\)"):
        make_model("laguerre", {"g": 0.5})


@pytest.mark.parametrize("family, params, needle", [
    ("hahn", {"a": 1, "b": 1, "N": "3/2"}, "N"),
    ("hahn", {"a": -1, "b": 1, "N": 3}, "a>0"),
    ("hahn", {"a": 1, "b": 1}, "N"),
    ("wilson", {"a1": 1, "a2": 1, "a3": 1, "a4": 1, "zz": 2}, "zz"),
    ("nonsense", {}, "nonsense"),
])
def test_invalid_parameters(family, params, needle):
    with pytest.raises(ValidationError, match=needle):
        make_model(family, params)


def test_energy_levels_beyond_lattice():
    m = default_model("racah", N=4)
    with pytest.raises(ValueError):
        m.energy(5)
    with pytest.raises(ValueError):
        m.energy(-1)


@pytest.mark.parametrize("family", FAMILIES)
@given(seed=seeds)
def test_energy_starts_at_zero_and_increases(family, seed):
    m = random_model(family, random.Random(seed), N=6)
    top = m.N if m.N is not None else 8
    es = [complex(m.energy(n)) for n in range(top + 1)]
    assert es[0] == 0
    assert all(abs(e.imag) < 1e-12 for e in es)
    assert all(es[n + 1].real > es[n].real for n in range(top))


@pytest.mark.parametrize("family", RDQM_FAMILIES)
@given(seed=seeds, N=st.integers(1, 10))
def test_lattice_boundary_conditions(family, seed, N):
    m = random_model(family, random.Random(seed), N=N)
    assert m.D(0) == 0
    assert m.B(N) == 0
    assert all(m.B(x) > 0 for x in range(N))
    assert all(m.D(x) > 0 for x in range(1, N + 1))


@pytest.mark.parametrize("family", RDQM_FAMILIES)
@given(seed=seeds)
def test_closed_form_weight_equals_product_form(family, seed):
    # phi0^2 from the Pochhammer closed form vs prod B(y)/D(y+1)
    m = random_model(family, random.Random(seed), N=7)
    w0 = groundstate_weight(m, 0)
    for x in range(m.N + 1):
        assert groundstate_weight(m, x) / w0 == m.product_weight(x)


def test_groundstate_weight_outside_lattice():
    with pytest.raises(ValidationError):
        groundstate_weight(default_model("hahn"), 99)


def test_continuous_hahn_weight_matches_gamma_oracle():
    m = default_model("continuous_hahn")
    for x in (-1.5, 0.0, 0.7, 2.0):
        expected = 1.0
        for a in (m.a1, m.a2):
            a = complex(a)
            expected *= abs(complex(mpmath.gamma(a + 1j * x))) ** 2
        assert m.weight(x) == pytest.approx(expected, rel=1e-11)


def test_wilson_weight_matches_gamma_oracle():
    m = default_model("wilson")
    for x in (0.3, 1.0, 2.5):
        num = 1
        for a in (m.a1, m.a2, m.a3, m.a4):
            a = complex(a)
            num *= mpmath.gamma(a + 1j * x) * mpmath.gamma(a - 1j * x)
        expected = num / (mpmath.gamma(2j * x) * mpmath.gamma(-2j * x))
        assert m.weight(x) == pytest.approx(float(mpmath.re(expected)), rel=1e-10)


def test_askey_wilson_weight_matches_qp_oracle():
    m = default_model("askey_wilson")
    q = float(m.q)
    x = 0.9
    z = complex(math.cos(x), math.sin(x))
    num = mpmath.qp(z * z, q) * mpmath.qp(1 / (z * z), q)
    den = 1
    for a in (m.a1, m.a2, m.a3, m.a4):
        a = complex(a)
        den *= mpmath.qp(a * z, q) * mpmath.qp(a / z, q)
    assert m.weight(x) == pytest.approx(float(mpmath.re(num / den)), rel=1e-10)


@pytest.mark.parametrize("family", ["hahn", "racah", "continuous_hahn", "wilson"])
def test_factor_four_flag(family):
    m = default_model(family)
    flag = energy_discrepancy(m)
    assert flag["citation"] == citations.ENERGY_FACTOR
    assert flag["printed_factor"] == 4
    assert m.energy(3, printed=True) == 4 * m.energy(3)


def test_q_racah_printed_energy_flag():
    m = default_model("q_racah")
    flag = energy_discrepancy(m)
    assert flag["kind"] == "energy-formula"
    assert flag["citation"] == citations.ENERGY_FORMULA
    n, q, dt = 2, m.q, m.d_tilde
    assert m.energy(n) == (q ** -n - 1) * (1 - dt * q ** n)
    assert m.energy(n, printed=True) == (q ** -n - 1) * (1 - dt * q ** (n - 1))


@pytest.mark.parametrize("family", ["hermite", "laguerre", "jacobi", "askey_wilson"])
def test_no_flag_where_printed_agrees(family):
    assert energy_discrepancy(default_model(family)) is None


def test_spec_q_racah_boundary_example():
    # d = q makes D(0) a removable 0/0; the boundary value is D(0) = 0
    m = make_model("q_racah", {"a": F(1, 100), "b": F(1, 2), "d": F(1, 2), "q": F(1, 2), "N": 5})
    assert m.D(0) == 0 and m.D(1) > 0


@pytest.mark.parametrize("family", RDQM_FAMILIES)
def test_shifted_model_is_valid(family):
    m = default_model(family)
    s = m.shifted(1)
    assert s.N == m.N - 1
    assert s.family == m.family


def test_complex_parameters_are_exact():
    m = default_model("wilson")
    assert m.exact and isinstance(m.a1, QQi)
    f = make_model("wilson", {k: str(v) for k, v in m.params().items()}, exact=False)
    assert not f.exact
    assert complex(f.energy(3)) == pytest.approx(complex(m.energy(3)))


def test_config_parsing():
    cfg = parse_config("# comment\nfamily = hahn\na = 3/2  # tail\nb = 5/2\nN = 4\n")
    m = model_from_config(cfg)
    assert m.N == 4 and m.a == F(3, 2)


@pytest.mark.parametrize("text, line", [
    ("family = hahn\na 1\n", 2),
    ("family = hahn\na = 1\na = 2\n", 3),
])
def test_config_errors_carry_line(text, line):
    with pytest.raises(ConfigError) as exc:
        parse_config(text)
    assert exc.value.line == line


def test_config_unknown_key():
    with pytest.raises(ConfigError) as exc:
        model_from_config(parse_config("family = hahn\na = 1\nb = 1\nN = 2\nc = 5\n"))
    assert exc.value.field == "c" and exc.value.line == 5


def test_kinds_partition_families():
    assert set(OQM_FAMILIES) | set(PDQM_FAMILIES) | set(RDQM_FAMILIES) == set(FAMILIES)
    for fam in FAMILIES:
        m = default_model(fam)
        assert fam in {"oQM": OQM_FAMILIES, "pdQM": PDQM_FAMILIES, "rdQM": RDQM_FAMILIES}[m.kind]
