import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from rrkernel import qseries as qs
from rrkernel.errors import DomainError

mp.mp.dps = 40


def rr_product(q):
    """R(q) = q**(1/5) prod (1-q^{5n-1})(1-q^{5n-4}) / ((1-q^{5n-2})(1-q^{5n-3}))."""
    q = mp.mpf(q)
    p = mp.nprod(lambda n: (1 - q ** (5 * n - 1)) * (1 - q ** (5 * n - 4))
                 / ((1 - q ** (5 * n - 2)) * (1 - q ** (5 * n - 3))), [1, mp.inf])
    return q ** (mp.mpf(1) / 5) * p


def test_constants():
    assert qs.T_MAX ** 5 == pytest.approx(qs.U_PLUS, rel=1e-15)
    assert qs.radicand(qs.T_MAX) == pytest.approx(0.0, abs=1e-13)


@pytest.mark.parametrize("q", [1e-4, 0.01, 0.1, 0.3, 0.5, 0.7, 0.9])
def test_rr_against_product(q):
    assert float(qs.rr(q)) == pytest.approx(float(rr_product(q)), rel=1e-14)


@pytest.mark.parametrize("q", [0.96, 0.99])
def test_rr_near_one_uses_eta_route(q):
    assert float(qs.rr(q)) == pytest.approx(float(rr_product(q)), rel=1e-14)


@pytest.mark.parametrize("q", [0.01, 0.2, 0.5, 0.8, 0.95, 0.995])
def test_f_minus_q_against_mpmath(q):
    assert float(qs.f_minus_q(q)) == pytest.approx(float(mp.qp(mp.mpf(q))), rel=1e-13)


@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 2.0, 5.0])
def test_eta_axis_against_mpmath(t):
    q = mp.exp(-mp.pi * t)
    ref = q ** (mp.mpf(1) / 24) * mp.qp(q)
    assert float(qs.dedekind_eta_axis(t)) == pytest.approx(float(ref), rel=1e-13)


@given(st.floats(1e-6, 0.999))
def test_rr_domain_invariant(q):
    x = float(qs.rr(q))
    assert 0 < x < qs.T_MAX + 1e-16
    assert qs.radicand(min(x, qs.T_MAX)) >= 0


def test_rr_cf_monotone():
    # strictly increasing while the increments exceed an ulp; beyond q ~ 0.8
    # R sits within an ulp of T_MAX, so only non-decrease is resolvable
    vals = qs.rr_cf_direct(np.linspace(0.01, 0.7, 200))
    assert np.all(np.diff(vals) > 0)
    vals = qs.rr_cf_direct(np.linspace(0.7, 0.9, 50))
    assert np.all(np.diff(vals) >= -2e-16)


def test_rr_vectorized_matches_scalar():
    qq = np.array([0.1, 0.5, 0.97])
    v = qs.rr(qq)
    assert v.shape == (3,)
    assert [float(qs.rr(q)) for q in qq] == pytest.approx(list(v), rel=1e-15)


@pytest.mark.parametrize("q", [0.001, 0.05, 0.3, 0.7, 0.9])
def test_rr_gap_against_product(q):
    ref = (mp.sqrt(5) - 1) / 2 - rr_product(q)
    assert qs.rr_gap(q) == pytest.approx(float(ref), rel=1e-13)


@pytest.mark.parametrize("q", [0.05 * i for i in range(1, 19)])
def test_eq6_relative(q):
    rep = qs.eq6_check(q)
    assert rep.rel_resid <= 1e-9


@pytest.mark.parametrize("q", [0.05 * i for i in range(1, 19)])
def test_cross_check(q):
    assert qs.rr_cross_check(q).abs_resid <= 1e-10


@pytest.mark.parametrize("t", [0.5, 1.0, 2.0, 4.0])
def test_eta_modular(t):
    assert qs.eta_modular_check(t).passed


@pytest.mark.parametrize("q", [0.1, 0.3, 0.5])
def test_derivative_checks(q):
    assert qs.rr_derivative_check(q).rel_resid <= 1e-6
    assert qs.rr_log_derivative_check(q).rel_resid <= 1e-9


def test_rr_derivative_against_mpmath():
    q = 0.2
    ref = mp.diff(rr_product, mp.mpf(q))
    assert float(qs.rr_derivative(q)) == pytest.approx(float(ref), rel=1e-12)


def test_domain_errors():
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(DomainError):
            qs.rr(bad)
    with pytest.raises(DomainError):
        qs.rr_gap(1.0)


def test_rad_zero_at_t_max():
    assert float(qs.rad(qs.T_MAX)) == pytest.approx(0.0, abs=1e-2)
    assert math.isfinite(float(qs.rad(0.3)))
