"""
C(nu) and the polynomial-weight expansions of the eta-weighted integrals.

C(nu) = 5 int_0^{T_MAX} t**(5 nu - 1) / rad(t) dt
      = pi int_0^inf eta(it/2)**4 R(e^{-pi t})**(5 nu) dt
has a closed form through 2F1, so m_inv at r -> 0 of any (generalized)
polynomial weight is a finite sum of C values.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from . import elliptic as ell
from .errors import DomainError, OutOfRange
from .numerics import (DEFAULT_QUAD, Bracket, QuadratureConfig, derivative_central,
                       expand_bracket, integrate_finite, invert_monotone)
from .qseries import SQRT5, T_MAX, U_PLUS, rad
from .report import IdentityReport
from .transform import MGContext, WeightG, _eta_integral, F_i_primitive, y_of

_U_MINUS_ABS = (11.0 + 5.0 * SQRT5) / 2.0
#: argument of the 2F1 in C(nu): (11 - 5 sqrt 5) / (11 + 5 sqrt 5) = -U_PLUS**2
C_ARG = -U_PLUS / _U_MINUS_ABS


def _log_C_scaled(nu: float) -> float:
    """log(C(nu) U_PLUS**(-nu)); stays finite for large nu."""
    lg = (math.lgamma(5 / 6) + (1 / 6) * math.log(U_PLUS)
          + math.lgamma(1 / 6 + nu) - math.lgamma(1 + nu))
    return lg + math.log(ell.hyp2f1(1 / 6, 1 / 6 + nu, 1 + nu, C_ARG))


def C_closed(nu: float) -> float:
    """
    Gamma(5/6) ((11+5 sqrt5)/2)**(-1/6-nu) Gamma(1/6+nu)/Gamma(1+nu)
    2F1(1/6, 1/6+nu; 1+nu; (11-5 sqrt5)/(11+5 sqrt5)).
    """
    if not nu > 0:
        raise DomainError("C(nu) needs nu > 0")
    return math.exp(_log_C_scaled(nu) + nu * math.log(U_PLUS))


def C_alt_one_fifth() -> float:
    """Second closed form of C(1/5), with 2F1 at -123/2 + 55 sqrt(5)/2."""
    z = -123.0 / 2.0 + 55.0 * SQRT5 / 2.0
    return ((2.0 / (11.0 + 5.0 * SQRT5)) ** (11 / 30) * math.gamma(11 / 30)
            * math.gamma(5 / 6) / math.gamma(6 / 5) * ell.hyp2f1(1 / 6, 11 / 30, 6 / 5, z))


def power_weight(p: float) -> WeightG:
    return WeightG(f"x^{p:g}", lambda x: np.asarray(x, dtype=float) ** p, 1)


def C_quadrature(nu: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """pi int_0^inf eta(it/2)**4 R(e^{-pi t})**(5 nu) dt with certified head and tail cuts."""
    return _eta_integral(power_weight(5.0 * nu), 0.0, cfg)


def C_radicand(nu: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """5 int_0^{T_MAX} t**(5 nu - 1) / rad(t) dt."""
    def f(t):
        return 5.0 * t ** (5.0 * nu - 1.0) / rad(t)
    return integrate_finite(f, 0.0, T_MAX, cfg, vectorized=True)


def c_value_check(tol: float = 1e-10) -> IdentityReport:
    """C(1/5) from the general closed form against the second closed form."""
    return IdentityReport.build("C-VALUE", {"nu": 0.2}, C_closed(0.2), C_alt_one_fifth(), tol)


def c_quadrature_check(nu: float, tol: float = 1e-8,
                       cfg: QuadratureConfig = DEFAULT_QUAD) -> IdentityReport:
    """C(nu) in closed form against the eta-weighted quadrature from 0."""
    return IdentityReport.build("C-QUAD", {"nu": nu}, C_quadrature(nu, cfg), C_closed(nu), tol)


# ---------------------------------------------------------------------------
# polynomial weights

@dataclass(frozen=True)
class PolynomialWeight:
    """G(x) = sum a_m x**p_m with positive exponents."""

    coeffs: Tuple[float, ...]
    exps: Tuple[float, ...]

    def __post_init__(self):
        if len(self.coeffs) != len(self.exps):
            raise ValueError("coeffs and exps differ in length")
        if any(p <= 0 for p in self.exps):
            raise DomainError("exponents must be positive")
        object.__setattr__(self, "coeffs", tuple(float(a) for a in self.coeffs))
        object.__setattr__(self, "exps", tuple(float(p) for p in self.exps))

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[float, float]]) -> "PolynomialWeight":
        return cls(tuple(a for a, _ in pairs), tuple(p for _, p in pairs))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for a, p in zip(self.coeffs, self.exps):
            out = out + a * x ** p
        return out

    def as_weight(self) -> WeightG:
        sign = 1 if self.coeffs and all(a > 0 for a in self.coeffs) else 0
        label = " + ".join(f"{a:g}x^{p:g}" for a, p in zip(self.coeffs, self.exps)) or "0"
        return WeightG(label, self, sign)


def theorem9_sum(G: PolynomialWeight, shift: float = 0.0) -> float:
    """sum a_m C((p_m + shift)/5)."""
    return math.fsum(a * C_closed((p + shift) / 5.0) for a, p in zip(G.coeffs, G.exps))


def theorem9_check(G: PolynomialWeight, tol: float = 1e-8,
                   cfg: QuadratureConfig = DEFAULT_QUAD) -> IdentityReport:
    """pi int_0^inf eta**4 G(R) dt against sum a_m C(p_m/5)."""
    lhs = _eta_integral(G.as_weight(), 0.0, cfg) if G.coeffs else 0.0
    return IdentityReport.build("THM9", {"terms": len(G.coeffs)}, lhs, theorem9_sum(G), tol)


def corollary4_root(G: PolynomialWeight) -> float:
    """x0 = sum a_m C(m/5) for integer exponents m."""
    if any(p != int(p) for p in G.exps):
        raise DomainError("the root formula is stated for integer exponents")
    return theorem9_sum(G)


def corollary4_check(G: PolynomialWeight, eps: float = 1e-3, tol: float = 1e-2) -> IdentityReport:
    """
    y(x0 - eps) approaches T_MAX.

    Near the top P(y) = x0 - c (T_MAX - y)**(5/6), so the gap shrinks like
    eps**(6/5); ``extra['order']`` is the observed exponent from eps and eps/2.
    """
    x0 = corollary4_root(G)
    ctx = MGContext(G.as_weight())
    g1 = T_MAX - y_of(ctx, x0 - eps)
    g2 = T_MAX - y_of(ctx, x0 - eps / 2)
    rep = IdentityReport.build("COR4", {"eps": eps}, T_MAX - g1, T_MAX, tol)
    rep.extra.update({"x0": x0, "order": math.log(g1 / g2) / math.log(2.0)})
    return rep


# ---------------------------------------------------------------------------
# F_i and the quadratic kernel

@lru_cache(maxsize=None)
def x_max() -> float:
    """int_0^{T_MAX} dt / rad(t), the end of F_i's domain."""
    return F_i_primitive(T_MAX)


def F_i_inv(y: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """int_0^y dt / rad(t)."""
    return F_i_primitive(y, cfg)


def F_i_of(x: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """F_i(x): F_i(0) = 0 and F_i' = rad(F_i), for 0 <= x <= X_MAX."""
    if x == 0:
        return 0.0
    xm = x_max()
    if not 0 < x <= xm * (1 + 1e-14):
        raise OutOfRange(f"F_i: {x!r} outside [0, {xm!r}]")
    if x >= xm:
        return T_MAX
    return invert_monotone(lambda y: F_i_primitive(y, cfg), x, Bracket(0.0, T_MAX), tol=1e-15)


def F_i_derivative_check(x: float, h: float = 1e-5, tol: float = 1e-6) -> IdentityReport:
    """Finite-difference F_i'(x) against rad(F_i(x))."""
    fd = derivative_central(F_i_of, x, h)
    return IdentityReport.build("EQ81", {"x": x, "h": h}, fd, float(rad(F_i_of(x))), tol)


@dataclass(frozen=True)
class QuadraticKernel:
    """a w**2 + b w + c with exponent m; D = b**2 - 4ac."""

    a: float
    b: float
    c: float
    m: float

    def __post_init__(self):
        if self.D <= 0:
            raise DomainError("kernel needs D = b**2 - 4ac > 0")
        if not self.m < 1:
            raise DomainError("kernel needs m < 1 (regular incomplete beta)")

    @property
    def D(self) -> float:
        return self.b * self.b - 4.0 * self.a * self.c

    def Q(self, w):
        return (self.a * w + self.b) * w + self.c

    def z(self, w):
        sd = math.sqrt(self.D)
        return (-self.b + sd - 2.0 * self.a * w) / (2.0 * sd)

    @property
    def polynomial_beta(self) -> bool:
        """1 - m a positive integer: the beta integrand is a polynomial."""
        return float(1.0 - self.m).is_integer()

    def prefactor(self) -> float:
        """(-1)**(1-m) a**(m-1) D**(1/2-m) on principal branches; must be real."""
        p = (cmath.exp(1j * math.pi * (1.0 - self.m)) * complex(self.a) ** (self.m - 1.0)
             * self.D ** (0.5 - self.m))
        if abs(p.imag) > 1e-12 * abs(p):
            raise DomainError(f"kernel {self} has no real prefactor "
                              f"(principal value {p:.6g})")
        return p.real


def _beta_polynomial(z: float, n: int) -> float:
    # int_0^z t**(n-1) (1-t)**(n-1) dt, exact for any real z
    P = np.polynomial.Polynomial
    poly = P([0, 1]) ** (n - 1) * P([1, -1]) ** (n - 1)
    prim = poly.integ()
    return float(prim(z))


def U_of(k: QuadraticKernel, x: float) -> float:
    """(-1)**(1-m) a**(m-1) D**(1/2-m) B((-b + sqrt D - 2 a x)/(2 sqrt D), 1-m, 1-m)."""
    z = k.z(x)
    pref = k.prefactor()
    if k.polynomial_beta:
        return pref * _beta_polynomial(z, int(round(1.0 - k.m)))
    if not 0 <= z <= 1:
        raise DomainError(f"beta argument {z!r} outside [0, 1]")
    return pref * ell.incomplete_beta(z, 1.0 - k.m, 1.0 - k.m)


def _roots_interval(k: QuadraticKernel) -> Tuple[float, float]:
    sd = math.sqrt(k.D)
    w1 = (-k.b + sd) / (2.0 * k.a)     # z = 0
    w2 = (-k.b - sd) / (2.0 * k.a)     # z = 1
    return min(w1, w2), max(w1, w2)


def U_solve(k: QuadraticKernel, value: float) -> float:
    """w with U(w) = value (U is monotone on its real domain)."""
    lo, hi = _roots_interval(k)

    def f(w):
        return U_of(k, w)
    if k.polynomial_beta:
        width = hi - lo
        br = expand_bracket(f, value, lo, hi, lo - 1e6 * width, hi + 1e6 * width)
        if br is None:
            raise OutOfRange(f"U never reaches {value!r}")
    else:
        br = Bracket(lo, hi)
    return invert_monotone(f, value, br, tol=1e-15)


def _w_integral(k: QuadraticKernel, fn, cfg: QuadratureConfig) -> Tuple[float, float, float]:
    """5 int_{w_s}^{w_0} fn(U(w)) / Q(w)**m dw with U(w_s) = 0, U(w_0) = X_MAX."""
    ws = U_solve(k, 0.0)
    w0 = U_solve(k, x_max())

    def integrand(w):
        q = k.Q(w)
        if k.m != 0 and q <= 0:
            raise DomainError(f"kernel polynomial {q!r} <= 0 at w={w!r}")
        qm = q ** k.m if k.m else 1.0
        return 5.0 * fn(U_of(k, w)) / qm
    return integrate_finite(integrand, ws, w0, cfg), ws, w0


def theorem12_check(k: QuadraticKernel, G: PolynomialWeight, tol: float = 1e-6,
                    cfg: QuadratureConfig = QuadratureConfig(1e-12, 1e-10)) -> IdentityReport:
    """
    5 int_{w_s}^{w_0} G(F_i(U(w))) / (a w**2 + b w + c)**m dw against the C sum.

    Substituting v = U(w) and t = F_i(v) turns the left side into
    5 int_0^{T_MAX} G(t) / rad(t) dt = sum a_m C((p_m + 1)/5). The sum with
    C(p_m/5) belongs to the integrand divided by F_i(U(w)); both variants are
    evaluated, the second in ``extra``. w_s is where U vanishes.
    """
    lhs, ws, w0 = _w_integral(k, lambda v: float(G(F_i_of(v))), cfg)
    divided, _, _ = _w_integral(k, lambda v: _G_over_t(G, F_i_of(v)), cfg)
    rhs = theorem9_sum(G, shift=1.0)
    printed = theorem9_sum(G)
    rep = IdentityReport.build(
        "THM12", {"a": k.a, "b": k.b, "c": k.c, "m": k.m}, lhs, rhs, tol,
        notes="right side sum a_m C((p_m+1)/5); the sum with C(p_m/5) matches the "
              "integrand divided by F_i(U(w))")
    rep.extra.update({"w_s": ws, "w_0": w0, "printed_sum": printed,
                      "printed_rel_resid": abs(lhs - printed) / abs(printed),
                      "divided_integral": divided,
                      "divided_rel_resid": abs(divided - printed) / abs(printed)})
    return rep


def _G_over_t(G: PolynomialWeight, t: float) -> float:
    # G(t)/t termwise, finite at t = 0 when every exponent is >= 1
    return math.fsum(a * t ** (p - 1.0) for a, p in zip(G.coeffs, G.exps))


def corollary6_check(k: QuadraticKernel, tol: float = 1e-6,
                     cfg: QuadratureConfig = QuadratureConfig(1e-12, 1e-10)) -> IdentityReport:
    """
    5 int F_i(U(w)) / Q(w)**m dw equals C(2/5); the closed form printed next
    to it is C(1/5), whose residual is kept in ``extra``.
    """
    lhs, ws, w0 = _w_integral(k, F_i_of, cfg)
    rhs = C_closed(2 / 5)
    alt = C_alt_one_fifth()
    rep = IdentityReport.build("COR6", {"a": k.a, "b": k.b, "c": k.c, "m": k.m}, lhs, rhs, tol,
                               notes="value is C(2/5), not C(1/5)")
    rep.extra.update({"C(1/5)": alt, "printed_rel_resid": abs(lhs - alt) / alt})
    return rep


def F_series(n_terms: int) -> Tuple[np.ndarray, np.ndarray]:
    """
    Generalized power series of F = F_i^{-1}: F(t) = sum_j f_j t**(11/6 + 5j).

    Returned as (f_j * U_PLUS**(j), exponents), the scaling keeping every
    coefficient of order one.
    """
    gam = -1.0 / 6.0
    p = np.zeros(n_terms)
    p[0] = 1.0
    # (1 + a1 u + a2 u**2)**gam with u = U_PLUS * v: coefficients in v
    a1, a2 = -11.0 * U_PLUS, -1.0 * U_PLUS ** 2
    for n in range(1, n_terms):
        s = ((gam + 1) - n) * a1 * p[n - 1]
        if n >= 2:
            s += (2 * (gam + 1) - n) * a2 * p[n - 2]
        p[n] = s / n
    exps = 11.0 / 6.0 + 5.0 * np.arange(n_terms)
    return p / exps, exps


def corollary5_check(k: QuadraticKernel, n_terms: int = 4000, tol: float = 1e-6,
                     cfg: QuadratureConfig = QuadratureConfig(1e-12, 1e-10)) -> IdentityReport:
    """
    5 int U(w) / Q(w)**m dw against (5/2) X_MAX**2.

    With v = U(w) the left side is 5 int_0^{X_MAX} v dv. F has no Maclaurin
    series (its exponents are 11/6 + 5j), so the C-sum is formed with those
    generalized exponents; its partial sums are reported in ``extra``.
    """
    lhs, ws, w0 = _w_integral(k, lambda v: v, cfg)
    rhs = 2.5 * x_max() ** 2
    coef, exps = F_series(n_terms)
    corrected = printed = 0.0
    terms = []
    for j in range(n_terms):
        nu_c = (exps[j] + 1.0) / 5.0
        nu_p = exps[j] / 5.0
        tc = coef[j] * math.exp(_log_C_scaled(nu_c) + (nu_c - j) * math.log(U_PLUS))
        tp = coef[j] * math.exp(_log_C_scaled(nu_p) + (nu_p - j) * math.log(U_PLUS))
        corrected += tc
        printed += tp
        terms.append(tc)
    rep = IdentityReport.build("COR5", {"a": k.a, "b": k.b, "c": k.c, "m": k.m}, lhs, rhs, tol,
                               notes="F_n read as coefficients of F's generalized power series")
    rep.extra.update({"series_shifted": float(corrected), "series_unshifted": float(printed),
                      "last_term": float(terms[-1]), "n_terms": n_terms})
    return rep
