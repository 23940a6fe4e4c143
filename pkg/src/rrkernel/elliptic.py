"""
Elliptic and hypergeometric kernels.

Conventions: every elliptic routine takes the *modulus* ``k`` (``k**2`` sits
under the radicals), so ``incomplete_F(phi, k)`` is
``int_0^phi dtheta / sqrt(1 - k**2 sin(theta)**2)``.
"""

from __future__ import annotations

import math
from typing import Tuple

import numpy as np
from scipy.special import digamma

from .errors import DivergentIntegral, DomainError, NonConvergence, PoleError
from .numerics import (DEFAULT_QUAD, DEFAULT_SERIES, QuadratureConfig, SeriesConfig,
                       derivative_central, integrate_finite)
from .qseries import f_minus_q
from .report import IdentityReport

_EPS = 2.220446049250313e-16


# ---------------------------------------------------------------------------
# complete integral and singular modulus

def agm(a: float, b: float) -> float:
    """Arithmetic-geometric mean of two non-negative numbers."""
    for _ in range(64):
        if abs(a - b) <= 4 * _EPS * a:
            return 0.5 * (a + b)
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    raise NonConvergence("AGM did not converge")


def complementary(k: float) -> float:
    """k' = sqrt(1 - k**2) without cancellation near k = 1."""
    return math.sqrt((1.0 - k) * (1.0 + k))


def agm_K(k: float, kp: float | None = None) -> float:
    """
    Complete elliptic integral of the first kind, K(k) = pi / (2 AGM(1, k')).

    Pass ``kp`` when the complementary modulus is known more accurately than
    ``sqrt(1 - k**2)`` (e.g. for ``k`` close to 1).
    """
    if kp is None:
        if not 0 <= k < 1:
            raise DomainError(f"K(k) needs 0 <= k < 1, got {k!r}")
        kp = complementary(k)
    elif not 0 < kp <= 1:
        raise DomainError(f"K needs a complementary modulus in (0, 1], got {kp!r}")
    return math.pi / (2.0 * agm(1.0, kp))


def _theta_234(q: float) -> Tuple[float, float, float]:
    # q <= exp(-pi): 8 terms are far more than double precision needs
    t2 = sum(q ** (n * (n + 1)) for n in range(8))
    t2 *= 2.0 * q ** 0.25
    t3 = 1.0 + 2.0 * sum(q ** (n * n) for n in range(1, 8))
    t4 = 1.0 + 2.0 * sum((-1) ** n * q ** (n * n) for n in range(1, 8))
    return t2, t3, t4


def singular_modulus_pair(r: float) -> Tuple[float, float]:
    """
    (k_r, k_r') with K(k_r') / K(k_r) = sqrt(r).

    Uses k = theta_2**2 / theta_3**2 and k' = theta_4**2 / theta_3**2 at the
    nome exp(-pi sqrt(r)); for ``r < 1`` the roles swap through
    ``k_r = k'_{1/r}`` so the nome never exceeds exp(-pi).
    """
    if not r > 0:
        raise DomainError("singular modulus needs r > 0")
    if r >= 1:
        t2, t3, t4 = _theta_234(math.exp(-math.pi * math.sqrt(r)))
        return (t2 / t3) ** 2, (t4 / t3) ** 2
    t2, t3, t4 = _theta_234(math.exp(-math.pi / math.sqrt(r)))
    return (t4 / t3) ** 2, (t2 / t3) ** 2


def singular_modulus(r: float) -> float:
    return singular_modulus_pair(r)[0]


def singular_modulus_residual(r: float) -> float:
    """K(k')/K(k) - sqrt(r) at the computed modulus."""
    k, kp = singular_modulus_pair(r)
    return agm_K(kp, k) / agm_K(k, kp) - math.sqrt(r)


def eq3_check(r: float, tol: float = 1e-9) -> IdentityReport:
    """
    f(-q) = 2**(1/3) pi**(-1/2) q**(-1/24) k**(1/12) k'**(1/3) K(k)**(1/2)
    at q = exp(-pi sqrt r).
    """
    q = math.exp(-math.pi * math.sqrt(r))
    k, kp = singular_modulus_pair(r)
    rhs = (2.0 ** (1 / 3) / math.sqrt(math.pi) * q ** (-1 / 24) * k ** (1 / 12) * kp ** (1 / 3)
           * math.sqrt(agm_K(k, kp)))
    return IdentityReport.build("EQ3", {"r": r}, float(f_minus_q(q)), rhs, tol)


def dk_dq(r: float) -> float:
    """dk_r/dq at q = exp(-pi sqrt r): 2 k k'**2 K(k)**2 / (q pi**2)."""
    k, kp = singular_modulus_pair(r)
    q = math.exp(-math.pi * math.sqrt(r))
    return 2.0 * k * kp * kp * agm_K(k, kp) ** 2 / (q * math.pi ** 2)


def dk_dq_check(r: float, tol: float = 1e-6) -> IdentityReport:
    """
    Closed-form dk/dq against a central difference of q -> k_{r(q)}.

    k_r grows with q, so the derivative is positive. The closed form is
    compared with its leading minus sign dropped; the printed sign is kept in
    ``extra['signed_rel_resid']``.
    """
    q = math.exp(-math.pi * math.sqrt(r))
    h = 1e-4 * q

    def k_of_q(x):
        return singular_modulus((math.log(x) / math.pi) ** 2)

    fd = derivative_central(k_of_q, q, h)
    closed = dk_dq(r)
    signed = abs(-closed - fd) / abs(fd)
    return IdentityReport.build(
        "EQ7", {"r": r, "h": h}, closed, fd, tol,
        notes="compared as +2kk'^2K^2/(q pi^2); printed leading minus contradicts "
              "dk/dq > 0",
        extra={"signed_rel_resid": signed})


# ---------------------------------------------------------------------------
# Jacobi functions and the incomplete integral

def jacobi_am_sn_cn_dn(u, k: float):
    """
    Jacobi amplitude and sn, cn, dn by the descending AGM (Landen) scheme.

    ``u`` may be a scalar or an ndarray; ``0 <= k < 1``.
    """
    if not 0 <= k < 1:
        raise DomainError(f"Jacobi functions need 0 <= k < 1, got {k!r}")
    uu = np.asarray(u, dtype=float)
    if k == 0:
        am = uu.copy()
        res = (am, np.sin(uu), np.cos(uu), np.ones_like(uu))
    else:
        a, b, c = [1.0], [complementary(k)], [k]
        while abs(c[-1]) > _EPS * a[-1]:
            if len(a) > 64:
                raise NonConvergence("Landen sequence did not converge")
            an, bn = a[-1], b[-1]
            a.append(0.5 * (an + bn))
            b.append(math.sqrt(an * bn))
            c.append(0.5 * (an - bn))
        n = len(a) - 1
        phi = (2.0 ** n) * a[n] * uu
        phi_next = phi
        for j in range(n, 0, -1):
            phi_next = phi
            phi = 0.5 * (phi + np.arcsin(c[j] / a[j] * np.sin(phi)))
        sn, cn = np.sin(phi), np.cos(phi)
        dn = cn / np.cos(phi_next - phi) if n > 0 else np.ones_like(uu)
        res = (phi, sn, cn, dn)
    if uu.ndim == 0:
        return tuple(float(v) for v in res)
    return res


def jacobi_sn(u, k: float):
    return jacobi_am_sn_cn_dn(u, k)[1]


def jacobi_pythagorean_check(n_points: int = 1000, seed: int = 0,
                             tol: float = 1e-11) -> IdentityReport:
    """
    max |sn**2 + cn**2 - 1| and max |dn**2 + k**2 sn**2 - 1| over random
    u in [-20, 20] and k in [0, 0.999] (fixed seed); both must be <= tol.
    """
    rng = np.random.default_rng(seed)
    us = rng.uniform(-20.0, 20.0, n_points)
    ks = rng.uniform(0.0, 0.999, n_points)
    worst = 0.0
    for u, k in zip(us, ks):
        _, sn, cn, dn = jacobi_am_sn_cn_dn(float(u), float(k))
        worst = max(worst, abs(sn * sn + cn * cn - 1.0), abs(dn * dn + k * k * sn * sn - 1.0))
    return IdentityReport.build("JACOBI", {"n_points": n_points, "seed": seed}, worst, 0.0,
                                tol, notes="lhs is the worst residual of both identities")


def carlson_rf(x: float, y: float, z: float) -> float:
    """Carlson's symmetric integral R_F by duplication."""
    if min(x, y, z) < 0 or (x == 0) + (y == 0) + (z == 0) > 1:
        raise DomainError("R_F needs non-negative arguments, at most one zero")
    for _ in range(100):
        mu = (x + y + z) / 3.0
        dx, dy, dz = 1 - x / mu, 1 - y / mu, 1 - z / mu
        if max(abs(dx), abs(dy), abs(dz)) < 1e-4:
            e2 = dx * dy - dz * dz
            e3 = dx * dy * dz
            return (1 - e2 / 10 + e3 / 14 + e2 * e2 / 24 - 3 * e2 * e3 / 44) / math.sqrt(mu)
        sx, sy, sz = math.sqrt(x), math.sqrt(y), math.sqrt(z)
        lam = sx * sy + sx * sz + sy * sz
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
    raise NonConvergence("R_F duplication did not converge")


def incomplete_F(phi: float, k: float) -> float:
    """F(phi, k) for |phi| <= pi/2, modulus convention."""
    if abs(phi) > 0.5 * math.pi * (1 + 4 * _EPS):
        raise DomainError("incomplete_F is implemented on |phi| <= pi/2")
    if not 0 <= k <= 1:
        raise DomainError("incomplete_F needs 0 <= k <= 1")
    if phi == 0:
        return 0.0
    s, c = math.sin(phi), math.cos(phi)
    return s * carlson_rf(c * c, (1 - k * s) * (1 + k * s), 1.0)


# ---------------------------------------------------------------------------
# Gamma, beta, hypergeometric

def gamma_fn(x: float) -> float:
    """Euler Gamma; raises PoleError at non-positive integers."""
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at {x!r}")
    return math.gamma(x)


def _rgamma(x: float) -> float:
    if x <= 0 and x == math.floor(x):
        return 0.0
    return 1.0 / math.gamma(x)


def beta_fn(a: float, b: float) -> float:
    return math.exp(math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)) * \
        _sign_gamma(a) * _sign_gamma(b) * _sign_gamma(a + b)


def _sign_gamma(x: float) -> float:
    return math.copysign(1.0, math.gamma(x)) if x < 0 else 1.0


def _is_nonpos_int(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _hyp_series(a, b, c, z, cfg: SeriesConfig) -> float:
    term = 1.0
    total = 1.0
    small = 0
    for n in range(cfg.max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        if term == 0.0:
            return total
        if abs(term) <= cfg.term_tol * abs(total):
            small += 1
            if small >= 2:
                return total
        else:
            small = 0
    raise NonConvergence(f"2F1({a},{b};{c};{z}) series did not converge")


def _hyp_integer_s(a: float, b: float, m: int, w: float, cfg: SeriesConfig) -> float:
    """
    2F1(a, b; a+b+m; 1-w) for an integer m >= 0, expanded about z = 1.

    The two connection terms merge into a logarithmic series with digamma
    coefficients (the degenerate case of the connection formula).
    """
    c = a + b + m
    lead = 0.0
    if m > 0:
        coef = gamma_fn(m) * gamma_fn(c) * _rgamma(a + m) * _rgamma(b + m)
        t = 1.0
        for n in range(m):
            lead += t
            if n + 1 < m:
                t *= (a + n) * (b + n) / ((n + 1) * (n + 1 - m)) * w
        lead *= coef
    lw = math.log(w)
    p1, p2 = digamma(1.0), digamma(m + 1.0)
    p3, p4 = digamma(a + m), digamma(b + m)
    t = 1.0 / math.factorial(m)
    total = 0.0
    for n in range(cfg.max_terms):
        term = t * (lw - p1 - p2 + p3 + p4)
        total += term
        if n > 2 and abs(term) <= cfg.term_tol * abs(total):
            sign = (-1.0) ** m   # (z - 1)^m = (-w)^m
            return lead - sign * w ** m * gamma_fn(c) * _rgamma(a) * _rgamma(b) * total
        t *= (a + m + n) * (b + m + n) / ((n + 1) * (n + m + 1)) * w
        p1 += 1.0 / (n + 1)
        p2 += 1.0 / (n + m + 1)
        p3 += 1.0 / (a + m + n)
        p4 += 1.0 / (b + m + n)
    raise NonConvergence(f"2F1 logarithmic series did not converge (m={m}, 1-z={w})")


_NEAR_INT = 1e-4


def _hyp_log_case(a: float, b: float, m: int, w: float, cfg: SeriesConfig) -> float:
    if m < 0:
        # Euler: (1-z)^m 2F1(c-a, c-b; c; z), whose c - a - b is -m > 0
        c = a + b + m
        return w ** m * _hyp_integer_s(c - a, c - b, -m, w, cfg)
    return _hyp_integer_s(a, b, m, w, cfg)


def _hyp_connection(a: float, b: float, c: float, w: float, cfg: SeriesConfig) -> float:
    s = c - a - b
    t1 = gamma_fn(c) * gamma_fn(s) * _rgamma(c - a) * _rgamma(c - b)
    t2 = gamma_fn(c) * gamma_fn(-s) * _rgamma(a) * _rgamma(b)
    out = 0.0
    if t1:
        out += t1 * _hyp_series(a, b, 1.0 - s, w, cfg)
    if t2:
        out += t2 * w ** s * _hyp_series(c - a, c - b, 1.0 + s, w, cfg)
    return out


def hyp2f1(a: float, b: float, c: float, z: float,
           cfg: SeriesConfig = DEFAULT_SERIES, one_minus_z: float | None = None) -> float:
    """
    Gauss hypergeometric function for real ``z < 1`` (and ``z = 1`` when
    ``c - a - b > 0``).

    The Gauss series is used on ``[-1/2... 1/2]``-type arguments; negative
    arguments go through Pfaff's transformation, arguments in ``(1/2, 1)``
    through the connection formula about ``z = 1``. When ``c - a - b`` is an
    integer that formula degenerates and a logarithmic series is used
    instead; within 1e-4 of an integer the value is interpolated in ``c``.
    Supply ``one_minus_z``
    when ``1 - z`` is known more accurately than by subtraction.
    """
    if _is_nonpos_int(c):
        raise PoleError("2F1 undefined for c a non-positive integer")
    w = (1.0 - z) if one_minus_z is None else one_minus_z
    if z == 0:
        return 1.0
    if _is_nonpos_int(a) or _is_nonpos_int(b):
        return _hyp_series(a, b, c, z, cfg)
    s = c - a - b
    if w == 0:
        if s <= 0:
            raise NonConvergence("2F1 diverges at z = 1 when c - a - b <= 0")
        return gamma_fn(c) * gamma_fn(s) * _rgamma(c - a) * _rgamma(c - b)
    if w < 0:
        raise DomainError("hyp2f1 is implemented for z <= 1")
    if z < 0:
        # Pfaff: (1-z)^(-a) 2F1(a, c-b; c; z/(z-1)); the new 1 - z' is 1/(1-z)
        zz = z / (z - 1.0)
        return w ** (-a) * hyp2f1(a, c - b, c, zz, cfg, one_minus_z=1.0 / w)
    if z <= 0.5:
        return _hyp_series(a, b, c, z, cfg)
    m = round(s)
    delta = s - m
    if delta == 0:
        return _hyp_log_case(a, b, m, w, cfg)
    if abs(delta) < _NEAR_INT:
        # the connection terms cancel like 1/delta here; interpolate in c
        # between the exact integer case and two well-separated neighbours
        h = _NEAR_INT
        c0 = a + b + m
        f0 = _hyp_log_case(a, b, m, w, cfg)
        fp = _hyp_connection(a, b, c0 + h, w, cfg)
        fm = _hyp_connection(a, b, c0 - h, w, cfg)
        d = c - c0
        return (f0 + d * (fp - fm) / (2 * h)
                + d * d * (fp - 2 * f0 + fm) / (2 * h * h))
    return _hyp_connection(a, b, c, w, cfg)


def appell_F1(a: float, b1: float, b2: float, c: float, x: float, y: float,
              cfg: SeriesConfig = DEFAULT_SERIES) -> float:
    """
    Appell F1 on the unit bidisk.

    Summed as sum_m (a)_m (b1)_m / ((c)_m m!) x**m 2F1(a+m, b2; c+m; y), which
    is the double series regrouped by the power of ``x``; terms shrink at
    least like ``|x|**m``.
    """
    if abs(x) >= 1 or abs(y) >= 1:
        raise NonConvergence("Appell F1 series needs |x| < 1 and |y| < 1")
    coef = 1.0
    total = 0.0
    small = 0
    for m in range(cfg.max_terms):
        term = coef * hyp2f1(a + m, b2, c + m, y, cfg) if coef else 0.0
        total += term
        if coef == 0.0:
            return total
        if abs(term) <= cfg.term_tol * abs(total):
            small += 1
            if small >= 2:
                return total
        else:
            small = 0
        coef *= (a + m) * (b1 + m) / ((c + m) * (m + 1)) * x
    raise NonConvergence("Appell F1 series did not converge")


def incomplete_beta(x: float, a: float, b: float,
                    cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """
    Non-normalized incomplete beta, int_0^x t**(a-1) (1-t)**(b-1) dt.

    Needs ``a > 0``. ``b <= 0`` is allowed for ``x < 1`` (direct quadrature);
    for ``b > 0`` and ``x > 1/2`` the complement ``B(a,b) - B(1-x; b, a)``
    keeps the singular endpoint at the origin of the quadrature.
    """
    if not 0 <= x <= 1:
        raise DomainError("incomplete_beta needs 0 <= x <= 1")
    if a <= 0:
        raise DivergentIntegral("incomplete_beta needs a > 0")
    if x == 0:
        return 0.0
    if b <= 0 and x == 1:
        raise DivergentIntegral("B(1; a, b) diverges for b <= 0")
    if b > 0 and x > 0.5:
        return beta_fn(a, b) - incomplete_beta(1.0 - x, b, a, cfg)

    def f(t):
        return t ** (a - 1.0) * (1.0 - t) ** (b - 1.0)
    return integrate_finite(f, 0.0, x, cfg, vectorized=True)


# ---------------------------------------------------------------------------
# Bring radical

def bring_radical(a: float) -> float:
    """
    The real root of x**5 + x = a.

    Safeguarded Newton inside the bracket [min(a, 0), max(a, 0)], which holds
    the root because |x| <= |x**5 + x| for real x.
    """
    if a == 0:
        return 0.0
    lo, hi = min(a, 0.0), max(a, 0.0)
    x = a if abs(a) <= 1 else math.copysign(abs(a) ** 0.2, a)
    for _ in range(200):
        fx = x ** 5 + x - a
        if fx == 0:
            return x
        if fx > 0:
            hi = min(hi, x)
        else:
            lo = max(lo, x)
        step = fx / (5 * x ** 4 + 1)
        nx = x - step
        if not lo <= nx <= hi:
            nx = 0.5 * (lo + hi)
        if abs(nx - x) <= 2 * _EPS * abs(nx):
            return nx
        x = nx
    raise NonConvergence("Bring radical iteration did not converge")
