"""
q-series kernels: Dedekind eta on the imaginary axis, Ramanujan's f(-q), and
the Rogers-Ramanujan continued fraction R(q).

All functions accept scalars or 1-d arrays of nomes and return the same shape.
The working nome of every eta/f(-q) evaluation is kept below exp(-2*pi) with
the modular transformation eta(i t/2) = sqrt(2/t) eta(2i/t), so the
pentagonal series needs only a handful of terms anywhere in (0, 1).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, NonConvergence
from .numerics import DEFAULT_SERIES, SeriesConfig, derivative_central
from .report import IdentityReport

SQRT5 = math.sqrt(5.0)
#: supremum of R on (0, 1); also the positive root of the radicand
T_MAX = (SQRT5 - 1.0) / 2.0
#: (5*sqrt(5) - 11) / 2 == T_MAX**5
U_PLUS = (5.0 * SQRT5 - 11.0) / 2.0
_U_MINUS_ABS = (11.0 + 5.0 * SQRT5) / 2.0
_PHI = (1.0 + SQRT5) / 2.0

_Q_SELF_DUAL = math.exp(-2.0 * math.pi)
# above this nome the continued fraction is replaced by the eta quotient
Q_CF_LIMIT = 0.95


def _as_array(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _out(arr, scalar):
    return float(arr) if scalar else arr


def _pentagonal(p: np.ndarray, cfg: SeriesConfig = DEFAULT_SERIES) -> np.ndarray:
    """prod(1 - p**n) via Euler's pentagonal number theorem (p small)."""
    total = np.ones_like(p)
    lp = np.log(p, where=p > 0, out=np.full_like(p, -np.inf))
    for k in range(1, cfg.max_terms):
        e1 = k * (3 * k - 1) // 2
        t1 = np.exp(e1 * lp)
        t2 = np.exp((e1 + k) * lp)
        total += (-1) ** k * (t1 + t2)
        if np.all(t1 <= cfg.term_tol):
            return total
    raise NonConvergence("pentagonal series did not converge")


def dedekind_eta_axis(t, cfg: SeriesConfig = DEFAULT_SERIES):
    """
    eta(i t / 2) for real ``t > 0``; the internal nome is exp(-pi t).

    For ``t < 2`` the value comes from the reciprocal argument,
    ``eta(i t/2) = sqrt(2/t) * eta(2i/t)``.
    """
    tt, scalar = _as_array(t)
    if np.any(tt <= 0):
        raise DomainError("dedekind_eta_axis needs t > 0")
    out = np.empty_like(tt)
    direct = tt >= 2.0
    if np.any(direct):
        td = tt[direct]
        out[direct] = np.exp(-math.pi * td / 24.0) * _pentagonal(np.exp(-math.pi * td), cfg)
    if np.any(~direct):
        s = 2.0 / tt[~direct]           # eta(2i/t) has nome exp(-2 pi s)
        out[~direct] = (np.sqrt(s) * np.exp(-math.pi * s / 12.0)
                        * _pentagonal(np.exp(-2.0 * math.pi * s), cfg))
    return _out(out, scalar)


def eta4_axis(t):
    """eta(i t/2)**4, the weight of every m_G integral."""
    return dedekind_eta_axis(t) ** 4


def f_minus_q(q, cfg: SeriesConfig = DEFAULT_SERIES):
    """
    Ramanujan's f(-q) = prod_{n>=1} (1 - q**n) for ``0 < q < 1``.

    Computed by the pentagonal series, after the modular transformation when
    ``q > exp(-2 pi)``. Accurate to a few ulps in relative terms even where
    f(-q) underflows towards zero near ``q = 1``.
    """
    qq, scalar = _as_array(q)
    if np.any(qq < 0) or np.any(qq >= 1.0):
        if np.any(qq >= 1.0):
            raise NonConvergence("f(-q) requires q < 1")
        raise DomainError("f(-q) requires q >= 0")
    out = np.empty_like(qq)
    small = qq <= _Q_SELF_DUAL
    if np.any(small):
        out[small] = _pentagonal(qq[small], cfg)
    if np.any(~small):
        qb = qq[~small]
        t = -np.log(qb) / math.pi
        s = 2.0 / t
        # f(-q) = q^{-1/24} eta(i t/2) = exp(pi t/24) sqrt(s) exp(-pi s/12) f(-e^{-2 pi s})
        out[~small] = (np.exp(math.pi * (t / 24.0 - s / 12.0)) * np.sqrt(s)
                       * _pentagonal(np.exp(-2.0 * math.pi * s), cfg))
    return _out(out, scalar)


def radicand(t):
    """t**-5 - 11 - t**5, factored so it stays accurate near T_MAX."""
    tt, scalar = _as_array(t)
    u = tt ** 5
    return _out((U_PLUS - u) * (u + _U_MINUS_ABS) / u, scalar)


def rad(t):
    """(t**-5 - 11 - t**5)**(1/6) for ``0 < t <= T_MAX``."""
    tt, scalar = _as_array(t)
    u = tt ** 5
    # R(q) may round one ulp past T_MAX for q close to 1
    core = np.maximum((U_PLUS - u) * (u + _U_MINUS_ABS), 0.0)
    return _out(tt ** (-5.0 / 6.0) * np.cbrt(np.sqrt(core)), scalar)


def inv_t_rad(t):
    """1 / (t * rad(t)) written as t**(-1/6) * (...)**(-1/6); finite near 0."""
    tt, scalar = _as_array(t)
    u = tt ** 5
    core = (U_PLUS - u) * (u + _U_MINUS_ABS)
    return _out(tt ** (-1.0 / 6.0) / np.cbrt(np.sqrt(core)), scalar)


# ---------------------------------------------------------------------------
# Rogers-Ramanujan continued fraction

def _cf_depth(q: float) -> int:
    # successive convergents differ by about q**(n(n+1)/2)
    lq = -math.log(q)
    return int(math.ceil(math.sqrt(2.0 * 40.0 / lq))) + 2


def _cf_eval(qq: np.ndarray, depth: int) -> np.ndarray:
    tail = np.zeros_like(qq)
    for n in range(depth, 0, -1):
        tail = qq ** n / (1.0 + tail)
    return qq ** 0.2 / (1.0 + tail)


def rr_cf_direct(q, depth: int | None = None, max_depth: int = 4096):
    """
    R(q) from the continued fraction by backward recurrence.

    Without ``depth`` the truncation depth starts from an a-priori estimate
    and is doubled until two successive values differ by less than 1e-13
    (relative); with ``depth`` given, exactly that depth is used.
    """
    qq, scalar = _as_array(q)
    if np.any(qq <= 0) or np.any(qq >= 1):
        raise DomainError("rr_cf_direct needs 0 < q < 1")
    if depth is not None:
        return _out(_cf_eval(qq, depth), scalar)
    n = max(8, _cf_depth(float(np.max(qq))))
    prev = _cf_eval(qq, n)
    while True:
        n *= 2
        if n > max_depth:
            raise NonConvergence("continued fraction depth cap reached")
        cur = _cf_eval(qq, n)
        if np.all(np.abs(cur - prev) <= 1e-13 * np.abs(cur)):
            return _out(cur, scalar)
        prev = cur


def eta_quotient(q):
    """Right side of Ramanujan's identity: f(-q)**6 / (q f(-q**5)**6)."""
    qq, scalar = _as_array(q)
    return _out((f_minus_q(qq) / f_minus_q(qq ** 5)) ** 6 / qq, scalar)


def rr_from_eta(q):
    """
    R(q) from R**-5 - 11 - R**5 = f(-q)**6 / (q f(-q**5)**6).

    With u = R**5 the relation is the quadratic u**2 + (11 + S) u - 1 = 0,
    whose positive root is taken in cancellation-free form.
    """
    qq, scalar = _as_array(q)
    if np.any(qq <= 0) or np.any(qq >= 1):
        raise DomainError("rr_from_eta needs 0 < q < 1")
    s = 11.0 + eta_quotient(qq)
    u = 2.0 / (s + np.sqrt(s * s + 4.0))
    return _out(u ** 0.2, scalar)


def rr(q):
    """R(q): continued fraction up to q = 0.95, eta quotient beyond."""
    qq, scalar = _as_array(q)
    if np.any(qq <= 0) or np.any(qq >= 1):
        raise DomainError("R(q) needs 0 < q < 1")
    flat = qq.reshape(-1)
    out = np.empty_like(flat)
    lo = flat <= Q_CF_LIMIT
    if np.any(lo):
        sub = flat[lo]
        out[lo] = _cf_eval(sub, 2 * _cf_depth(float(np.max(sub))))
    if np.any(~lo):
        out[~lo] = rr_from_eta(flat[~lo])
    return _out(out.reshape(qq.shape), scalar)


def rr_of_r(r):
    """R(exp(-pi sqrt(r)))."""
    return rr(np.exp(-math.pi * np.sqrt(r)))


def rr_derivative(q):
    """R'(q) = q**(-5/6) f(-q)**4 R(q) rad(R(q)) / 5."""
    qq, scalar = _as_array(q)
    r = rr(qq)
    return _out(qq ** (-5.0 / 6.0) * f_minus_q(qq) ** 4 * r * rad(r) / 5.0, scalar)


def rr_log_derivative_check(q: float, tol: float = 1e-9) -> IdentityReport:
    """Compare R'(q)/R(q) with f(-q)**5 / (5 q f(-q**5))."""
    lhs = float(rr_derivative(q) / rr(q))
    rhs = float(f_minus_q(q) ** 5 / (5.0 * q * f_minus_q(q ** 5)))
    return IdentityReport.build("EQ61", {"q": q}, lhs, rhs, tol)


def rr_derivative_check(q: float, tol: float = 1e-6) -> IdentityReport:
    """Closed-form R'(q) against a central difference of the continued fraction."""
    h = 1e-5 * min(q, 1.0 - q)
    fd = derivative_central(lambda x: rr_cf_direct(x), q, h)
    return IdentityReport.build("EQ5", {"q": q, "h": h}, float(rr_derivative(q)), fd, tol)


def rr_gap(q: float) -> float:
    """
    T_MAX - R(q) without cancellation.

    Above the self-dual nome exp(-2 pi) it uses Ramanujan's relation
    (phi + R(q)) (phi + R(q')) = sqrt(5) phi, log q log q' = 4 pi**2, which
    gives T_MAX - R(q) = sqrt(5) R(q') / (phi + R(q')) with a small q'.
    """
    if not 0 < q < 1:
        raise DomainError("rr_gap needs 0 < q < 1")
    if q <= _Q_SELF_DUAL:
        return T_MAX - float(rr_cf_direct(q))
    qd = math.exp(-4.0 * math.pi ** 2 / -math.log(q))
    rd = float(rr_cf_direct(qd))
    return SQRT5 * rd / (_PHI + rd)


def radicand_from_gap(g: float) -> float:
    """R**-5 - 11 - R**5 at R = T_MAX - g, in factored form."""
    x = T_MAX - g
    u = x ** 5
    # U_PLUS - u = (T_MAX - x)(T_MAX**4 + T_MAX**3 x + ... + x**4)
    s = T_MAX ** 4 + T_MAX ** 3 * x + T_MAX ** 2 * x ** 2 + T_MAX * x ** 3 + x ** 4
    return g * s * (u + _U_MINUS_ABS) / u


def eq6_check(q: float, tol: float = 1e-9) -> IdentityReport:
    """
    R**-5 - 11 - R**5 with R from the continued fraction, against the eta quotient.

    The left side is formed from T_MAX - R (see :func:`rr_gap`) so that it
    keeps its relative accuracy as q -> 1, where it decays like the right
    side; the naive difference is kept in ``extra['direct_lhs']``.
    """
    x = float(rr_cf_direct(q))
    lhs = radicand_from_gap(rr_gap(q))
    return IdentityReport.build("EQ6", {"q": q}, lhs, float(eta_quotient(q)), tol,
                                extra={"direct_lhs": x ** -5 - 11.0 - x ** 5})


def rr_cross_check(q: float, tol: float = 1e-10) -> IdentityReport:
    return IdentityReport.build("EQ6-CROSS", {"q": q}, rr_cf_direct(q),
                                rr_from_eta(q), tol)


def eta_modular_check(t: float, tol: float = 1e-11) -> IdentityReport:
    """eta(i t/2) * sqrt(t/2) == eta(2i/t) with both sides by the direct series."""
    def direct(tau):
        p = _pentagonal(np.array([math.exp(-math.pi * tau)]))
        return math.exp(-math.pi * tau / 24.0) * float(p[0])
    return IdentityReport.build("ETA-MODULAR", {"t": t}, direct(t) * math.sqrt(t / 2.0),
                                direct(4.0 / t), tol)
