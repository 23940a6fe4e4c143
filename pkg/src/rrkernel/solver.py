"""
Equation solving through the generalized integrals.

For an increasing f the weight G(x) = x f'(x) rad(x) / 5 has primitive
f(y) - f(0), so the root of f(x) = a is R(exp(-pi sqrt(m_G(a - f(0))))).
The method reaches only roots inside (0, T_MAX), the range of R.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict

import numpy as np

from .elliptic import bring_radical, jacobi_sn
from .errors import OutOfRange, UnknownFunction
from .modular import m_R, omega_n
from .numerics import DEFAULT_QUAD, QuadratureConfig, integrate_finite
from .qseries import T_MAX, f_minus_q, rr, rr_of_r
from .report import IdentityReport
from .transform import (MGContext, WeightG, b_of_r, H_o_of, m_forward, m_inv, sine_weight,
                        weight_from_derivative)


@dataclass(frozen=True)
class SmoothMap:
    """A differentiable map f with derivative df (both vectorized)."""

    f: Callable
    df: Callable
    label: str
    monotone_flag: bool = True


def weight_from_f(m: SmoothMap) -> WeightG:
    """G(x) = x f'(x) rad(x) / 5."""
    return weight_from_derivative(m.label, m.f, m.df)


SMOOTH_MAPS: Dict[str, SmoothMap] = {
    "quintic": SmoothMap(lambda x: x ** 5 + x, lambda x: 5 * x ** 4 + 1, "quintic"),
    "identity": SmoothMap(lambda x: x, lambda x: np.ones_like(np.asarray(x, dtype=float)),
                          "identity"),
    "cubic": SmoothMap(lambda x: x ** 3 + x, lambda x: 3 * x ** 2 + 1, "cubic"),
    "expm1": SmoothMap(np.expm1, np.exp, "expm1"),
}


def get_map(name: str) -> SmoothMap:
    try:
        return SMOOTH_MAPS[name]
    except KeyError:
        raise UnknownFunction(f"unknown map {name!r}; known: {sorted(SMOOTH_MAPS)}") from None


def solve_via_rr(m: SmoothMap, a: float, quad: QuadratureConfig = DEFAULT_QUAD,
                 route: str = "integral", trace: dict | None = None) -> float:
    """
    Root of f(x) = a as R(exp(-pi sqrt(m_G(a - f(0))))).

    Raises
    ------
    OutOfRange
        When a is outside f((0, T_MAX)), the part of the real line the
        method can reach.
    """
    f0 = float(m.f(0.0))
    hi = float(m.f(T_MAX))
    if not f0 < a < hi:
        raise OutOfRange(f"a={a!r} outside f((0, T_MAX)) = ({f0!r}, {hi!r}); "
                         "roots beyond T_MAX are not reachable through R(q)")
    ctx = MGContext(weight_from_f(m), quad, route)
    r = m_forward(ctx, a - f0)
    if trace is not None:
        trace["m_G(a)"] = r
    return rr_of_r(r)


def solve_by_fundamental(mzero_target: float, G0: WeightG,
                         quad: QuadratureConfig = DEFAULT_QUAD,
                         trace: dict | None = None) -> float:
    """
    Solve y(x) = mzero_target for the y of weight G0 in closed-integral form.

    First m0 with R(exp(-pi sqrt m0)) = mzero_target, then x0 = m_inv(m0).
    """
    if not 0 < mzero_target < T_MAX:
        raise OutOfRange(f"target {mzero_target!r} outside (0, T_MAX)")
    m0 = m_R(mzero_target)
    if trace is not None:
        trace["m0"] = m0
    return m_inv(MGContext(G0, quad), m0)


def solve_sin(a: float, quad: QuadratureConfig = DEFAULT_QUAD, trace: dict | None = None) -> float:
    """Root of sin(x) = a through the sine weight."""
    return solve_by_fundamental(a, sine_weight(), quad, trace)


def solve_quintic_check(a: float, tol: float = 1e-8) -> IdentityReport:
    """Root of x**5 + x = a through R(q) against the Bring radical."""
    trace: dict = {}
    x = solve_via_rr(SMOOTH_MAPS["quintic"], a, trace=trace)
    return IdentityReport.build("SOLVER-QUINTIC", {"a": a}, x, bring_radical(a), tol,
                                extra=trace)


def solve_sin_check(a: float = 0.2, tol: float = 1e-6) -> IdentityReport:
    """Root of sin(x) = a through the fundamental equation against arcsin."""
    trace: dict = {}
    x = solve_sin(a, trace=trace)
    return IdentityReport.build("SOLVER-SIN", {"a": a}, x, math.asin(a), tol, extra=trace)


def eq60_check(x: float, g: Callable, dg: Callable, tol: float = 1e-8,
               cfg: QuadratureConfig = DEFAULT_QUAD) -> IdentityReport:
    """
    int_0^x f(-q)**5 R(q) g'(R(q)) / (q f(-q**5)) dq = 5 g(R(x)), g(0) = 0.

    The integrand carries 1/q, which follows from R'/R = f(-q)**5/(5 q f(-q**5));
    the value without it is kept in ``extra['printed_integral']``.
    """
    def integrand(q):
        rq = rr(q)
        return f_minus_q(q) ** 5 * rq * dg(rq) / (q * f_minus_q(q ** 5))
    lhs = integrate_finite(integrand, 0.0, x, cfg, vectorized=True)
    printed = integrate_finite(lambda q: q * integrand(q), 0.0, x, cfg, vectorized=True)
    rhs = 5.0 * float(g(rr(x)))
    rep = IdentityReport.build("EQ60", {"x": x}, lhs, rhs, tol,
                               notes="integrand with the 1/q factor; without it the "
                                     "identity fails")
    rep.extra["printed_integral"] = printed
    rep.extra["printed_rel_resid"] = abs(printed - rhs) / abs(rhs) if rhs else abs(printed)
    return rep


def example12_check(n: float, target: float = 2.0, k: float = 0.5,
                    tol: float = 1e-7) -> IdentityReport:
    """
    Solve Omega_n(x**5 + x) = target, then compare
    BR(n**2 (R**5 + R)) at R = R(exp(-pi sqrt x_n)) with sn(H_o(b_1), k).

    Omega_n maps (0, T_MAX) into itself, so a target outside (0, T_MAX)
    leaves the auxiliary equation without a root; the report then says
    Unsolvable and carries no values.
    """
    inputs = {"n": n, "target": target}
    if not 0 < target < T_MAX:
        return IdentityReport.failure(
            "EX12", inputs, tol,
            f"Unsolvable: Omega_n takes values in (0, {T_MAX:.12g}), target {target!r} "
            "is not attained", kind="probe")
    # Omega_n(s) = target  <=>  s = Omega_{1/n}(target); then x**5 + x = s
    s = omega_n(target, 1.0 / n)
    xn = bring_radical(s)
    R = rr_of_r(xn)
    lhs = bring_radical(n * n * (R ** 5 + R))
    rhs = float(jacobi_sn(H_o_of(b_of_r(1.0), k), k))
    rep = IdentityReport.build("EX12", inputs, lhs, rhs, tol,
                               notes="x_n used as the r-parameter of R", kind="probe")
    rep.extra.update({"x_n": xn, "omega_arg": s})
    return rep
