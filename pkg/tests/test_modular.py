import math

import pytest
from hypothesis import assume, given, strategies as st

from rrkernel import modular as mod
from rrkernel import transform as tr
from rrkernel.errors import DomainError, OutOfRange
from rrkernel.qseries import T_MAX, rr, rr_of_r

QUINTIC = tr.MGContext(tr.quintic_weight())
X_RR = [float(rr(q)) for q in (0.1, 0.2, 0.3)]


@given(st.floats(0.01, 0.6))
def test_rr_inverse_roundtrip(q):
    assert mod.rr_inverse(float(rr(q))) == pytest.approx(q, abs=1e-10)


@given(st.floats(0.6, 0.95))
def test_rr_inverse_saturated_region(q):
    # R is within ~1e-12 of T_MAX here, so q is fixed only to ulp / R'(q);
    # the round trip is exact in x instead. Past q ~ 0.9 R rounds to T_MAX.
    x = float(rr(q))
    assume(x < T_MAX)
    assert float(rr(mod.rr_inverse(x))) == pytest.approx(x, abs=2e-16)


def test_rr_inverse_radical_value():
    assert mod.rr_inverse(mod.RR_E2PI) == pytest.approx(math.exp(-2 * math.pi), abs=1e-8)


@pytest.mark.parametrize("r", [1.0, 2.0, 4.0])
def test_m_R(r):
    assert mod.m_R(rr_of_r(r)) == pytest.approx(r, rel=1e-8)


def test_m_R_domain():
    for bad in (0.0, T_MAX, 0.7):
        with pytest.raises(OutOfRange):
            mod.m_R(bad)


def test_omega_one_is_identity():
    assert mod.omega_n(0.4, 1) == 0.4
    with pytest.raises(DomainError):
        mod.omega_n(0.4, 0)


def test_omega_is_nome_power():
    q = 0.3
    assert mod.omega_n(float(rr(q)), 3) == pytest.approx(float(rr(q ** 3)), rel=1e-12)


@pytest.mark.parametrize("x", X_RR)
def test_omega_relations(x):
    assert mod.omega2_algebraic_check(x).residual <= 1e-9
    assert mod.omega_composition_check(x).residual <= 1e-9
    assert mod.omega_inverse_check(x).residual <= 1e-9


@given(st.floats(0.05, 0.6), st.floats(0.3, 3.0), st.floats(0.3, 3.0))
def test_omega_group_action(x, n, m):
    lhs = mod.omega_n(mod.omega_n(x, m), n)
    assert lhs == pytest.approx(mod.omega_n(x, n * m), abs=1e-9)


def test_q_n_laws():
    assert mod.q_n(QUINTIC, 1.3, 1) == 1.3
    assert mod.q_star(QUINTIC, 0.3, 1) == 0.3
    assert mod.qn_composition_check(QUINTIC, 16.0, 2.0, 3.0).passed
    back = mod.q_n(QUINTIC, mod.q_n(QUINTIC, 1.5, 0.5), 2.0)
    assert back == pytest.approx(1.5, rel=1e-7)


@pytest.mark.parametrize("A", [0.2, 0.3])
def test_theorem5_corollary2(A):
    assert mod.theorem5_check(QUINTIC, A).residual <= 1e-7
    assert mod.corollary2_check(QUINTIC, A).residual <= 1e-7


@pytest.mark.parametrize("n", [1.0, 2.0])
def test_theorem6(n):
    assert mod.theorem6_check(QUINTIC, 0.3, n).residual <= 1e-6


@pytest.mark.parametrize("x", X_RR + [rr_of_r(1.0)])
def test_corollary3(x):
    assert mod.corollary3_check(x, 2).residual <= 1e-7


def test_theorem7():
    assert mod.theorem7_check(QUINTIC, 0.1, 2).residual <= 1e-6


@pytest.mark.parametrize("ctx", [QUINTIC, tr.MGContext(tr.amplitude_weight(0.5))],
                         ids=["quintic", "amplitude"])
def test_theorem11(ctx):
    assert mod.theorem11_check(ctx, 0.1, 2).residual <= 1e-6
    assert mod.theorem11_check(ctx, 0.1, 1).residual <= 1e-8


def test_singular_modulus_chains():
    assert mod.eq77_check(2.0).passed
    assert mod.eq78_check(2.0).passed


@pytest.mark.parametrize("k", [0.1, 0.3, 0.7])
def test_k_i_roundtrip(k):
    assert mod.k_i_roundtrip_check(k).residual <= 1e-10


def test_k_i_of_k4():
    assert tr.k_i_of(3 - 2 * math.sqrt(2)) == pytest.approx(4.0, abs=1e-9)


def test_eq39():
    assert mod.eq39_check(2.0).passed


def test_eq41_reading_recorded():
    rep = mod.eq41_probe()
    assert rep.kind == "probe"
    assert rep.passed
    assert "modulus" in rep.notes
    assert rep.extra["radical_vs_R"] <= 1e-15


def test_probes_report_without_raising():
    for rep in (mod.eq79_probe(0.7), mod.eq80_probe(0.3),
                mod.eq37_probe(tr.MGContext(tr.amplitude_weight(0.5)), 0.4)):
        assert rep.kind == "probe"
        assert rep.notes


def test_eq80_names_failing_link():
    rep = mod.eq80_probe(0.3)
    assert not rep.passed
    assert "link" in rep.notes


def test_run_chain_names_link():
    with pytest.raises(OutOfRange, match="'second'"):
        mod.run_chain(0.3, [("first", lambda v: v * 3), ("second", lambda v: mod.m_R(v))])
