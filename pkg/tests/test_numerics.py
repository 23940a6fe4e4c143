import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from rrkernel.errors import BadBracket, NonConvergence, TailBoundViolated
from rrkernel.numerics import (DEFAULT_QUAD, Bracket, QuadratureConfig, derivative_central,
                               expand_bracket, integrate_decaying, integrate_finite,
                               integrate_finite_err, invert_monotone, quadrature_defaults,
                               resolve_quad)


def test_polynomial_integral():
    assert integrate_finite(lambda x: 3 * x * x, 0.0, 2.0) == pytest.approx(8.0, rel=1e-14)


def test_endpoint_singularity():
    # int_0^1 x**(-5/6) dx = 6
    v = integrate_finite(lambda x: x ** (-5 / 6), 0.0, 1.0, vectorized=True)
    assert v == pytest.approx(6.0, rel=1e-12)


def test_both_endpoint_singularities_against_mpmath():
    # 1 - x cannot resolve nodes within an ulp of b = 1, which costs about
    # eps**(2/3) ~ 4e-11 of the (1-x)**(-1/3) mass; the left end is exact
    f = lambda x: x ** (-1 / 6) * (1 - x) ** (-1 / 3)
    ref = float(mp.beta(mp.mpf(5) / 6, mp.mpf(2) / 3))
    assert integrate_finite(f, 0.0, 1.0, vectorized=True) == pytest.approx(ref, rel=5e-11)


def test_mild_right_singularity():
    f = lambda x: (1 - x) ** (-1 / 6)
    assert integrate_finite(f, 0.0, 1.0, vectorized=True) == pytest.approx(1.2, rel=1e-13)


def test_reversed_limits_flip_sign():
    a = integrate_finite(math.exp, 0.0, 1.0)
    b = integrate_finite(math.exp, 1.0, 0.0)
    assert a == pytest.approx(math.e - 1, rel=1e-14)
    assert b == -a


def test_empty_interval():
    assert integrate_finite(math.exp, 1.0, 1.0) == 0.0


def test_error_estimate_is_small():
    v, e = integrate_finite_err(math.sin, 0.0, math.pi)
    assert v == pytest.approx(2.0, rel=1e-14)
    assert e <= 1e-11


def test_nonconvergence_is_raised():
    cfg = QuadratureConfig(max_refinements=3)
    with pytest.raises(NonConvergence):
        integrate_finite(lambda x: math.sin(1.0 / x), 1e-3, 1.0, cfg)


@given(st.floats(0.05, 0.95))
def test_additivity(c):
    f = lambda x: np.exp(-x) * x ** (-1 / 6)
    whole = integrate_finite(f, 0.0, 1.0, vectorized=True)
    parts = integrate_finite(f, 0.0, c, vectorized=True) + integrate_finite(f, c, 1.0,
                                                                              vectorized=True)
    assert abs(whole - parts) <= 2 * max(DEFAULT_QUAD.abs_tol, DEFAULT_QUAD.rel_tol * whole)


def test_decaying_integral():
    v = integrate_decaying(lambda t: np.exp(-t), 0.0, lambda T: math.exp(-T), vectorized=True)
    assert v == pytest.approx(1.0, rel=1e-13)


def test_decaying_tail_violation():
    with pytest.raises(TailBoundViolated):
        integrate_decaying(lambda t: 1.0 / (1 + t * t), 0.0, lambda T: 1.0 / T, t_cap=1e3)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=1e-30)
    with pytest.raises(ValueError):
        QuadratureConfig(max_refinements=0)
    with pytest.raises(ValueError):
        QuadratureConfig(abs_tol=1e-14, tail_eps=1e-10)


def test_quadrature_override_applies_to_default_only():
    loose = QuadratureConfig(abs_tol=1e-6, rel_tol=1e-6, tail_eps=1e-8)
    other = QuadratureConfig(abs_tol=1e-13)
    with quadrature_defaults(loose):
        assert resolve_quad(DEFAULT_QUAD) is loose
        assert resolve_quad(other) is other
    assert resolve_quad(DEFAULT_QUAD) is DEFAULT_QUAD


@given(st.floats(-3.0, 3.0))
def test_invert_monotone_roundtrip(x):
    f = lambda v: v ** 3 + v
    y = f(x)
    xr = invert_monotone(f, y, Bracket(-4.0, 4.0))
    assert abs(f(xr) - y) <= 1e-12 * max(1.0, abs(y))


def test_invert_monotone_bad_bracket():
    with pytest.raises(BadBracket):
        invert_monotone(math.exp, -1.0, Bracket(0.0, 1.0))
    with pytest.raises(BadBracket):
        Bracket(1.0, 1.0)


def test_expand_bracket():
    br = expand_bracket(math.exp, 1e5, 0.0, 1.0, -50.0, 50.0)
    assert br.lo <= math.log(1e5) <= br.hi
    br = expand_bracket(lambda x: -x, 30.0, 0.0, 1.0, -50.0, 50.0)
    assert br.lo <= -30.0 <= br.hi
    assert expand_bracket(math.tanh, 2.0, 0.0, 1.0, -50.0, 50.0) is None


def test_derivative_of_quadratic_is_exact():
    f = lambda x: 3 * x * x - 2 * x + 1
    assert derivative_central(f, 0.7, 0.25) == pytest.approx(6 * 0.7 - 2, rel=1e-14)
