"""
Generalized integrals built on R(q).

For a weight G on (0, T_MAX] the eta-weighted tail integral

    m_inv(r) = pi * int_{sqrt r}^inf eta(i t/2)**4 G(R(exp(-pi t))) dt

equals P(R(exp(-pi sqrt r))) with P(y) = 5 int_0^y G(t) / (t rad(t)) dt, and
``m_forward`` is its functional inverse. ``y(A) = R(exp(-pi sqrt(m_forward(A))))``
solves P(y) = A. The remaining functions (b, F1, h, H_o, phi) are the
auxiliary maps that tie m_inv to the singular modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Dict, Optional

import numpy as np

from . import elliptic as ell
from .errors import DomainError, OutOfRange, UnknownFunction
from .numerics import (DEFAULT_QUAD, Bracket, QuadratureConfig, derivative_central,
                       expand_bracket, integrate_decaying, integrate_finite,
                       invert_monotone, resolve_quad)
from .qseries import (T_MAX, U_PLUS, eta4_axis, inv_t_rad, rad, rr, rr_derivative,
                      rr_of_r)
from .report import IdentityReport

# log-r limits for every inversion in r
LOG_R_MIN = math.log(1e-12)
LOG_R_MAX = math.log(4e4)
_LOG_R_START = (math.log(1e-3), math.log(1e3))


def radicand_root() -> float:
    """The positive root of t**-5 - 11 - t**5, ((5 sqrt 5 - 11)/2)**(1/5)."""
    t = U_PLUS ** 0.2
    if abs(t - T_MAX) > 1e-14:
        raise AssertionError("radicand root disagrees with (sqrt 5 - 1)/2")
    return t


# ---------------------------------------------------------------------------
# weights

@dataclass(frozen=True)
class WeightG:
    """
    A weight function G on (0, T_MAX].

    Parameters
    ----------
    label : str
    eval : callable
        Vectorized: takes and returns ndarrays.
    sign : int
        +1 or -1 when G has that constant sign on the domain, 0 otherwise.
        Only constant-sign weights can be inverted.
    primitive : callable, optional
        P with m_inv(r) = P(R(q_r)); for most weights P(y) is
        5 int_0^y G/(t rad), for weights where that integral diverges at 0 it
        is fixed up to the constant the caller chooses.
    notes : str
        Convention remarks copied into every report that uses this weight.
    """

    label: str
    eval: Callable
    sign: int = 1
    primitive: Optional[Callable[[float], float]] = None
    notes: str = ""

    def __post_init__(self):
        if self.sign:
            x = np.linspace(1e-3, T_MAX * (1 - 1e-6), 64)
            vals = np.asarray(self.eval(x), dtype=float)
            if not np.all(np.sign(vals) == self.sign):
                raise DomainError(f"weight {self.label!r} does not have sign {self.sign}")

    @property
    def positive_flag(self) -> bool:
        return self.sign > 0

    def __call__(self, x):
        return self.eval(x)

    @cached_property
    def sup_abs(self) -> float:
        """Sampled sup |G| on (0, T_MAX] with a safety factor 2."""
        x = np.concatenate((np.geomspace(1e-12, 1e-3, 40),
                            np.linspace(1e-3, T_MAX, 2000)))
        return 2.0 * float(np.max(np.abs(self.eval(x))))


def weight_from_derivative(label: str, f: Callable, df: Callable, notes: str = "") -> WeightG:
    """G(x) = x f'(x) rad(x) / 5, whose primitive is f(y) - f(0)."""
    f0 = float(f(0.0))

    def g(x):
        x = np.asarray(x, dtype=float)
        return x * df(x) * rad(x) / 5.0
    return WeightG(label, g, 1, lambda y: float(f(y)) - f0, notes)


def quintic_weight() -> WeightG:
    return weight_from_derivative("quintic", lambda x: x ** 5 + x,
                                  lambda x: 5 * x ** 4 + 1)


def identity_weight() -> WeightG:
    """G(x) = x; P(y) = 5 int_0^y dt/rad(t) has no elementary form."""
    return WeightG("identity", lambda x: np.asarray(x, dtype=float), 1,
                   lambda y: 5.0 * F_i_primitive(y))


def sine_weight() -> WeightG:
    """G(x) = x rad(x) / (5 sqrt(1 - x**2)), so that y(A) = sin(A)."""
    def g(x):
        x = np.asarray(x, dtype=float)
        return x * rad(x) / (5.0 * np.sqrt((1 - x) * (1 + x)))
    return WeightG("sine", g, 1, math.asin,
                   notes="normalized with the factor 1/5 that y(A) = sin(A) requires")


def jacobi_weight(k: float) -> WeightG:
    """G1(x) = x rad(x) / (5 sqrt(1-x**2) sqrt(1-k**2 x**2)); y(A) = sn(A, k)."""
    def g(x):
        x = np.asarray(x, dtype=float)
        return x * rad(x) / (5.0 * np.sqrt((1 - x) * (1 + x) * (1 - k * x) * (1 + k * x)))
    return WeightG(f"jacobi(k={k:g})", g, 1,
                   lambda y: ell.incomplete_F(math.asin(y), k))


def amplitude_weight(k: float) -> WeightG:
    """x rad(x) / (5 sqrt(1 - k**2 sin(x)**2)); y(A) = am(A, k) (modulus k)."""
    if not 0 <= k <= 1:
        raise DomainError("amplitude weight needs 0 <= k <= 1")

    def g(x):
        x = np.asarray(x, dtype=float)
        s = np.sin(x)
        return x * rad(x) / (5.0 * np.sqrt((1 - k * s) * (1 + k * s)))
    return WeightG(f"amplitude(k={k:g})", g, 1, lambda y: ell.incomplete_F(y, k),
                   notes="k is the modulus (k**2 under the root)")


def k_i_of(A: float) -> float:
    """k_i(A) = K(sqrt(1-A**2))**2 / K(A)**2, the inverse of r -> k_r."""
    if not 0 < A < 1:
        raise DomainError("k_i needs 0 < A < 1")
    kp = ell.complementary(A)
    return (ell.agm_K(kp, A) / ell.agm_K(A, kp)) ** 2


def _dk_i(A: float) -> float:
    # d k_i / dA = -pi sqrt(k_i) / (A (1 - A**2) K(A)**2), from the Legendre relation
    kp = ell.complementary(A)
    return -math.pi * math.sqrt(k_i_of(A)) / (A * kp * kp * ell.agm_K(A, kp) ** 2)


def singular_modulus_weight() -> WeightG:
    """
    The weight whose y is the singular modulus, y(A) = k_A.

    G(x) = x k_i'(x) rad(x) / 5 is negative; P = k_i diverges at 0, so the
    eta integral does not converge and m_inv must use the primitive route.
    """
    def g(x):
        x = np.asarray(x, dtype=float)
        d = np.array([_dk_i(float(v)) for v in x.reshape(-1)]).reshape(x.shape)
        return x * d * rad(x) / 5.0
    return WeightG("singular-modulus", g, -1, k_i_of,
                   notes="P = k_i; eta integral diverges, primitive route only")


WEIGHTS: Dict[str, Callable[..., WeightG]] = {
    "quintic": quintic_weight,
    "identity": identity_weight,
    "sine": sine_weight,
    "jacobi": jacobi_weight,
    "amplitude": amplitude_weight,
    "singular-modulus": singular_modulus_weight,
}


def get_weight(name: str, **params) -> WeightG:
    try:
        factory = WEIGHTS[name]
    except KeyError:
        raise UnknownFunction(f"unknown weight {name!r}; known: {sorted(WEIGHTS)}") from None
    return factory(**params)


# ---------------------------------------------------------------------------
# m_G machinery

@dataclass(frozen=True)
class MGContext:
    """
    A weight with its numerical configuration.

    ``route="integral"`` evaluates m_inv by the eta-weighted quadrature;
    ``route="primitive"`` uses P(R(q)) and needs ``G.primitive``.
    """

    G: WeightG
    quad: QuadratureConfig = DEFAULT_QUAD
    route: str = "integral"
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.route not in ("integral", "primitive"):
            raise ValueError("route must be 'integral' or 'primitive'")
        if self.route == "primitive" and self.G.primitive is None:
            raise ValueError(f"weight {self.G.label!r} has no primitive")

    @property
    def notes(self) -> str:
        return self.G.notes

    @property
    def sup_A(self) -> float:
        """lim_{r -> 0} m_inv(r), the end of m_forward's range."""
        if "sup" not in self._cache:
            if self.route == "primitive":
                self._cache["sup"] = float(self.G.primitive(T_MAX))
            else:
                self._cache["sup"] = _eta_integral(self.G, 0.0, self.quad)
        return self._cache["sup"]


def head_cutoff(supG: float, eps: float) -> float:
    """
    t_cut with int_0^t_cut pi eta(it/2)**4 |G| dt <= eps.

    Uses eta(it/2)**4 <= (2/t)**2 exp(-2 pi/(3 t)), which integrates to
    6 sup|G| exp(-2 pi/(3 t_cut)).
    """
    return 2.0 * math.pi / (3.0 * math.log(6.0 * supG / eps))


def _eta_integral(G: WeightG, a: float, cfg: QuadratureConfig) -> float:
    supG = G.sup_abs
    if supG == 0:
        return 0.0
    a = max(a, head_cutoff(supG, resolve_quad(cfg).tail_eps))

    def f(t):
        return math.pi * eta4_axis(t) * G.eval(rr(np.exp(-math.pi * t)))

    def tail(T):
        # |pi eta**4 G| <= pi sup|G| exp(-pi t/6) beyond T
        return 6.0 * supG * math.exp(-math.pi * T / 6.0)
    return integrate_decaying(f, a, tail, cfg, vectorized=True)


def m_inv(ctx: MGContext, r: float) -> float:
    """pi int_{sqrt r}^inf eta(i t/2)**4 G(R(exp(-pi t))) dt."""
    if not r > 0:
        raise DomainError("m_inv needs r > 0")
    if ctx.route == "primitive":
        return float(ctx.G.primitive(rr_of_r(r)))
    return _eta_integral(ctx.G, math.sqrt(r), ctx.quad)


def _invert_in_log_r(f: Callable[[float], float], target: float, what: str) -> float:
    def g(s):
        return f(math.exp(s))
    br = expand_bracket(g, target, *_LOG_R_START, LOG_R_MIN, LOG_R_MAX)
    if br is None:
        raise OutOfRange(f"{what}: value {target!r} outside the reachable range")
    return math.exp(invert_monotone(g, target, br, tol=1e-14))


def m_forward(ctx: MGContext, A: float) -> float:
    """r with m_inv(r) = A."""
    if ctx.G.sign == 0:
        raise DomainError("m_forward needs a constant-sign weight")
    if ctx.G.sign > 0 and not 0 < A < ctx.sup_A:
        raise OutOfRange(f"m_forward: A={A!r} outside (0, {ctx.sup_A!r}) for "
                         f"weight {ctx.G.label!r}")
    return _invert_in_log_r(lambda r: m_inv(ctx, r), A, "m_forward")


def y_of(ctx: MGContext, A: float) -> float:
    """y(A) = R(exp(-pi sqrt(m_forward(A))))."""
    return rr_of_r(m_forward(ctx, A))


def phi_of(ctx: MGContext, r: float) -> float:
    """2 sqrt(r) / (pi eta(i sqrt(r)/2)**4 G(R(q)))."""
    g = float(ctx.G.eval(rr_of_r(r)))
    den = math.pi * eta4_axis(math.sqrt(r)) * g
    if den == 0:
        raise ZeroDivisionError("phi: G(R(q)) vanishes")
    return 2.0 * math.sqrt(r) / den


# ---------------------------------------------------------------------------
# b_r, F1 and their inverses

def b_of_k(k: float, kp: float | None = None) -> float:
    """3 (2k)**(1/3) 2F1(1/6, 1/3; 7/6; k**2)."""
    if kp is None:
        kp = ell.complementary(k)
    return 3.0 * (2.0 * k) ** (1.0 / 3.0) * ell.hyp2f1(1 / 6, 1 / 3, 7 / 6, k * k,
                                                        one_minus_z=kp * kp)


def b_of_r(r: float) -> float:
    """b_r at the singular modulus k_r."""
    return b_of_k(*ell.singular_modulus_pair(r))


#: lim_{r -> 0} b_r = 3 2**(1/3) Gamma(7/6) Gamma(2/3) / Gamma(5/6)
B_MAX = 3.0 * 2 ** (1 / 3) * math.gamma(7 / 6) * math.gamma(2 / 3) / math.gamma(5 / 6)


def b_inv(b: float) -> float:
    """r with b_r = b; b_r decreases from B_MAX to 0."""
    if not 0 < b < B_MAX:
        raise OutOfRange(f"b_inv: {b!r} outside (0, {B_MAX!r})")
    return _invert_in_log_r(b_of_r, b, "b_inv")


def F1_inv(y: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """5 int_0^y dt / (t rad(t))."""
    if not 0 <= y <= T_MAX:
        raise OutOfRange(f"F1_inv: {y!r} outside [0, T_MAX]")
    return 5.0 * integrate_finite(inv_t_rad, 0.0, y, cfg, vectorized=True)


def F1_of(x: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Inverse of F1_inv on [0, B_MAX]."""
    if x == 0:
        return 0.0
    if not 0 < x <= B_MAX:
        raise OutOfRange(f"F1: {x!r} outside [0, {B_MAX!r}]")
    return invert_monotone(lambda y: F1_inv(y, cfg), x, Bracket(0.0, T_MAX), tol=1e-15)


def F_i_primitive(y: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """int_0^y dt / rad(t), the inverse of the function F_i with F_i' = rad(F_i)."""
    if not 0 <= y <= T_MAX:
        raise OutOfRange(f"F_i inverse: {y!r} outside [0, T_MAX]")

    def f(t):
        return 1.0 / rad(t)
    return integrate_finite(f, 0.0, y, cfg, vectorized=True)


# ---------------------------------------------------------------------------
# h and H_o

def h_inv(ctx: MGContext, A: float) -> float:
    """h^{-1}(A) = 5 int_0^{y(A)} dt / (t rad(t)) = F1_inv(y(A))."""
    if A == 0:
        return 0.0
    return F1_inv(y_of(ctx, A), ctx.quad)


def h_of(ctx: MGContext, x: float) -> float:
    """h(x) = m_inv(b^{-1}(x)), so that h(b_{m_G(A)}) = A."""
    if x == 0:
        return 0.0
    return m_inv(ctx, b_inv(x))


def _u_max(k: float) -> float:
    return ell.incomplete_F(math.asin(T_MAX), k)


def H_o_inv(x: float, k: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """5 int_0^x dn(u) cn(u) / (sn(u) rad(sn(u))) du for 0 <= x <= F(arcsin T_MAX, k)."""
    if not 0 <= x <= _u_max(k) * (1 + 1e-15):
        raise OutOfRange(f"H_o inverse: {x!r} outside [0, {_u_max(k)!r}]")

    def f(u):
        _, sn, cn, dn = ell.jacobi_am_sn_cn_dn(u, k)
        return 5.0 * cn * dn * inv_t_rad(np.minimum(sn, T_MAX))
    return integrate_finite(f, 0.0, x, cfg, vectorized=True)


def H_o_of(x: float, k: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """Inverse of H_o_inv."""
    if x == 0:
        return 0.0
    um = _u_max(k)
    if not 0 < x <= B_MAX:
        raise OutOfRange(f"H_o: {x!r} outside [0, {B_MAX!r}]")
    return invert_monotone(lambda u: H_o_inv(u, k, cfg), x, Bracket(0.0, um), tol=1e-15)


# ---------------------------------------------------------------------------
# identity checks

def primitive_quadrature(G: WeightG, y: float, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """5 int_0^y G(t) / (t rad(t)) dt."""
    def f(t):
        return 5.0 * G.eval(t) * inv_t_rad(t)
    return integrate_finite(f, 0.0, y, cfg, vectorized=True)


def eq21_check(r: float, tol: float = 1e-8) -> IdentityReport:
    """F1(b_r) = R(exp(-pi sqrt r))."""
    return IdentityReport.build("EQ21", {"r": r}, F1_of(b_of_r(r)), rr_of_r(r), tol)


def eq55_check(r: float, tol: float = 1e-8) -> IdentityReport:
    """pi int_{sqrt r}^inf eta(it/2)**4 G(R) dt = R**5 + R for the quintic weight."""
    R = rr_of_r(r)
    return IdentityReport.build("EQ55", {"r": r}, m_inv(MGContext(quintic_weight()), r),
                                R ** 5 + R, tol)


def theorem1_check(ctx: MGContext, A: float, tol: float = 1e-8) -> IdentityReport:
    """5 int_0^{y(A)} G/(t rad) dt = A."""
    y = y_of(ctx, A)
    return IdentityReport.build("THM1", {"A": A}, primitive_quadrature(ctx.G, y, ctx.quad),
                                A, tol, notes=ctx.notes, extra={"y": y})


def prop1_check(ctx: MGContext, A: float, h: float = 1e-4, tol: float = 1e-5) -> IdentityReport:
    """
    d m_forward / dA against phi(m_forward(A)).

    m_inv decreases in r for a positive weight, so d m_G/dA = -phi(m_G(A));
    the comparison uses that sign, the unsigned residual is kept in extra.
    """
    fd = derivative_central(lambda a: m_forward(ctx, a), A, h)
    ph = phi_of(ctx, m_forward(ctx, A))
    rep = IdentityReport.build("PROP1", {"A": A, "h": h}, fd, -ph, tol,
                               notes="compared as dm_G/dA = -phi(m_G(A)); the unsigned "
                                     "form has the wrong sign for positive weights")
    rep.extra["unsigned_rel_resid"] = abs(fd - ph) / abs(ph)
    return rep


def eq14_check(ctx: MGContext, A: float, h: float = 1e-4, tol: float = 1e-5) -> IdentityReport:
    """
    dy/dA against the chain rule through R, q and m_G.

    The chain-rule form is dy/dA = R'(q) q pi phi(m) / (2 sqrt m) at
    m = m_G(A); the printed form carries an extra minus sign, its residual
    is in ``extra['printed_rel_resid']``.
    """
    fd = derivative_central(lambda a: y_of(ctx, a), A, h)
    m = m_forward(ctx, A)
    q = math.exp(-math.pi * math.sqrt(m))
    chain = rr_derivative(q) * q * math.pi * phi_of(ctx, m) / (2.0 * math.sqrt(m))
    rep = IdentityReport.build("EQ14", {"A": A, "h": h}, fd, chain, tol,
                               notes="argument reading: phi and sqrt at m_G(A); sign from "
                                     "the chain rule")
    rep.extra["printed_rel_resid"] = abs(fd + chain) / abs(chain)
    return rep


def theorem2_check(ctx: MGContext, A: float, h: float = 1e-5, tol: float = 1e-4) -> IdentityReport:
    """dA/dk_{m_G} = 2**(1/3) G(y(A)) / (k k')**(2/3), by finite differences in A."""
    def k_of_A(a):
        return ell.singular_modulus(m_forward(ctx, a))
    dk_dA = derivative_central(k_of_A, A, h)
    r = m_forward(ctx, A)
    k, kp = ell.singular_modulus_pair(r)
    closed = 2 ** (1 / 3) * float(ctx.G.eval(rr_of_r(r))) / (k * kp) ** (2 / 3)
    return IdentityReport.build("THM2", {"A": A, "h": h}, 1.0 / dk_dA, closed, tol,
                                notes=ctx.notes)


def eq16_check(ctx: MGContext, A: float, tol: float = 1e-7) -> IdentityReport:
    """
    int_0^A dt / G(y(t)) = b at k_{m_G(A)}.

    The quadrature starts at t_c = 1e-13 A; the omitted piece is
    O(t_c**(5/6)) because G(y) ~ y**(1/6) near 0.
    """
    tc = 1e-13 * A

    def f(t):
        return 1.0 / float(ctx.G.eval(y_of(ctx, t)))
    lhs = integrate_finite(f, tc, A, ctx.quad)
    return IdentityReport.build("EQ16", {"A": A}, lhs, b_of_r(m_forward(ctx, A)), tol,
                                notes=ctx.notes)


def theorem3_check(ctx: MGContext, A: float, tol: float = 1e-7) -> IdentityReport:
    """h(b_{m_G(A)}) = A."""
    return IdentityReport.build("THM3", {"A": A}, h_of(ctx, b_of_r(m_forward(ctx, A))), A,
                                tol, notes=ctx.notes)


def theorem4_check(ctx: MGContext, A: float, tol: float = 1e-7) -> IdentityReport:
    """5 int_0^A G/(t rad) dt = h(5 int_0^A dt/(t rad)) for 0 < A < T_MAX."""
    return IdentityReport.build("THM4", {"A": A}, primitive_quadrature(ctx.G, A, ctx.quad),
                                h_of(ctx, F1_inv(A, ctx.quad)), tol, notes=ctx.notes)


def corollary1_check(ctx: MGContext, A: float, tol: float = 1e-8) -> IdentityReport:
    """h^{-1}(A) = F1_inv(y(A)) and b_{m_G(A)} agree."""
    return IdentityReport.build("COR1", {"A": A}, h_inv(ctx, A), b_of_r(m_forward(ctx, A)),
                                tol, notes=ctx.notes)


def theorem10_check(ctx: MGContext, A: float, k: float, tol: float = 1e-7) -> IdentityReport:
    """H_o^{-1}(F[arcsin y(A), k]) = b_{m_G(A)}."""
    y = y_of(ctx, A)
    lhs = H_o_inv(ell.incomplete_F(math.asin(y), k), k, ctx.quad)
    return IdentityReport.build("THM10", {"A": A, "k": k}, lhs, b_of_r(m_forward(ctx, A)),
                                tol, notes=ctx.notes)


def eq70_check(r: float, k: float, tol: float = 1e-7) -> IdentityReport:
    """R(q) = sn(H_o(b_r), k)."""
    sn = ell.jacobi_sn(H_o_of(b_of_r(r), k), k)
    return IdentityReport.build("EQ70", {"r": r, "k": k}, rr_of_r(r), sn, tol)


def eq72_check(x: float, k: float, h: float = 1e-5, tol: float = 1e-5) -> IdentityReport:
    """H_o^{-1}'(F[arcsin x, k]) = 5 sqrt(1-k**2 x**2) sqrt(1-x**2) / (x rad(x))."""
    u = ell.incomplete_F(math.asin(x), k)
    fd = derivative_central(lambda v: H_o_inv(v, k), u, h)
    closed = 5.0 * math.sqrt((1 - k * x) * (1 + k * x) * (1 - x) * (1 + x)) * inv_t_rad(x)
    return IdentityReport.build("EQ72", {"x": x, "k": k, "h": h}, fd, closed, tol,
                                notes="k is the modulus")

