"""
Modular maps of R(q) and of m_G.

Omega_n sends R(q) to R(q**n), which is r -> n**2 r in the r-parameter. Q_n
and Q*_n are the same rescaling seen through m_G and m_G^{-1}:
Q_n(r) = m_G(n m_inv(r)) and Q*_n(A) = m_inv(n m_G(A)).
"""

from __future__ import annotations

import math
from typing import Callable, List, Tuple

from . import elliptic as ell
from .errors import DomainError, OutOfRange, RRKernelError
from .numerics import derivative_central, expand_bracket, invert_monotone
from .qseries import SQRT5, T_MAX, rr, rr_of_r
from .report import IdentityReport
from .transform import (LOG_R_MAX, LOG_R_MIN, MGContext, b_inv, b_of_r, F1_inv, F1_of,
                        amplitude_weight, k_i_of, m_forward, m_inv, y_of)


def _check_rr_value(x: float, what: str) -> None:
    if not 0 < x < T_MAX:
        raise OutOfRange(f"{what}: {x!r} outside (0, T_MAX)")


def m_R(x: float) -> float:
    """r with R(exp(-pi sqrt r)) = x."""
    _check_rr_value(x, "m_R")

    def g(s):
        return rr_of_r(math.exp(s))
    # R(q) ~ q**(1/5) for small q gives the starting guess r = (5 ln(1/x)/pi)**2
    s0 = 2.0 * math.log(max(-5.0 * math.log(x) / math.pi, 1e-3))
    s0 = min(max(s0, LOG_R_MIN + 1), LOG_R_MAX - 1)
    br = expand_bracket(g, x, s0 - 0.5, s0 + 0.5, LOG_R_MIN, LOG_R_MAX)
    if br is None:
        raise OutOfRange(f"m_R: {x!r} not reachable with r in [1e-12, 4e4]")
    return math.exp(invert_monotone(g, x, br, tol=1e-15))


def rr_inverse(x: float) -> float:
    """q in (0, 1) with R(q) = x."""
    return math.exp(-math.pi * math.sqrt(m_R(x)))


def omega_n(x: float, n: float) -> float:
    """Omega_n(x) = R(q**n) where x = R(q)."""
    if not n > 0:
        raise DomainError("modular index must be positive")
    if n == 1:
        _check_rr_value(x, "Omega_1")
        return x
    return rr_of_r(n * n * m_R(x))


def q_n(ctx: MGContext, A: float, n: float) -> float:
    """Q_n(A) = m_G(n m_inv(A)); A is an r-value."""
    if n == 1:
        return A
    return m_forward(ctx, n * m_inv(ctx, A))


def q_star(ctx: MGContext, A: float, n: float) -> float:
    """Q*_n(A) = m_inv(n m_G(A)); A is in the range of m_inv."""
    if n == 1:
        return A
    return m_inv(ctx, n * m_forward(ctx, A))


def y_inverse(ctx: MGContext, y: float) -> float:
    """A with y(A) = y, i.e. m_inv(m_R(y))."""
    return m_inv(ctx, m_R(y))


# ---------------------------------------------------------------------------
# chains with named links

def run_chain(x: float, links: List[Tuple[str, Callable[[float], float]]]) -> float:
    """Apply ``links`` right to left as listed, naming the link that fails."""
    v = x
    for name, fn in links:
        try:
            v = fn(v)
        except RRKernelError as exc:
            raise OutOfRange(f"link {name!r} failed at {v!r}: {exc}") from exc
        if not math.isfinite(v):
            raise OutOfRange(f"link {name!r} produced {v!r}")
    return v


# ---------------------------------------------------------------------------
# checks

def omega2_algebraic_check(x: float, tol: float = 1e-9) -> IdentityReport:
    """(Omega_2 - x**2)/(Omega_2 + x**2) = x Omega_2**2."""
    v = omega_n(x, 2)
    return IdentityReport.build("OMEGA2-ALG", {"x": x}, (v - x * x) / (v + x * x),
                                x * v * v, tol)


def omega_composition_check(x: float, n: float = 2, m: float = 3,
                            tol: float = 1e-9) -> IdentityReport:
    """Omega_n(Omega_m(x)) = Omega_{nm}(x)."""
    return IdentityReport.build("OMEGA-COMP", {"x": x, "n": n, "m": m},
                                omega_n(omega_n(x, m), n), omega_n(x, n * m), tol)


def omega_inverse_check(x: float, n: float = 2, tol: float = 1e-9) -> IdentityReport:
    """Omega_{1/n}(Omega_n(x)) = x."""
    return IdentityReport.build("OMEGA-INV", {"x": x, "n": n},
                                omega_n(omega_n(x, n), 1.0 / n), x, tol)


def qn_composition_check(ctx: MGContext, A: float, n: float, m: float,
                         tol: float = 1e-7) -> IdentityReport:
    """Q_n(Q_m(A)) = Q_{nm}(A)."""
    lhs = q_n(ctx, q_n(ctx, A, m), n)
    return IdentityReport.build("EQ32", {"A": A, "n": n, "m": m}, lhs, q_n(ctx, A, n * m),
                                tol, notes=ctx.notes)


def theorem5_check(ctx: MGContext, A: float, n: float = 2, tol: float = 1e-7) -> IdentityReport:
    """y(Q*_{n^2}(A)) = Omega_n(y(A))."""
    lhs = y_of(ctx, q_star(ctx, A, n * n))
    return IdentityReport.build("THM5", {"A": A, "n": n}, lhs, omega_n(y_of(ctx, A), n), tol,
                                notes=ctx.notes)


def corollary2_check(ctx: MGContext, A: float, n: float = 2, tol: float = 1e-7) -> IdentityReport:
    """Q*_{n^2}(A) = y^{-1}(Omega_n(y(A)))."""
    rhs = y_inverse(ctx, omega_n(y_of(ctx, A), n))
    return IdentityReport.build("COR2", {"A": A, "n": n}, q_star(ctx, A, n * n), rhs, tol,
                                notes=ctx.notes)


def eq37_probe(ctx: MGContext, A: float, n: float = 2, tol: float = 1e-7) -> IdentityReport:
    """
    Q_{n^2}(A) against y(Omega_n(y^{-1}(A))), read literally.

    The right side feeds an r-value to y^{-1} and an A-value to Omega_n, so
    the two sides agree only by accident; the probe records the outcome.
    """
    try:
        lhs = run_chain(A, [("Q_{n^2}", lambda v: q_n(ctx, v, n * n))])
        rhs = run_chain(A, [("y^-1", lambda v: y_inverse(ctx, v)),
                            ("Omega_n", lambda v: omega_n(v, n)),
                            ("y", lambda v: y_of(ctx, v))])
    except OutOfRange as exc:
        return IdentityReport.failure("EQ37", {"A": A, "n": n}, tol, str(exc), kind="probe")
    return IdentityReport.build("EQ37", {"A": A, "n": n}, lhs, rhs, tol,
                                notes="literal reading; " + ctx.notes, kind="probe")


def theorem6_check(ctx: MGContext, x: float, n: float = 1, tol: float = 1e-6) -> IdentityReport:
    """n**2 m_G(x) = b^{-1}(F1^{-1}(Omega_n(y(x))))."""
    rhs = run_chain(x, [("y", lambda v: y_of(ctx, v)),
                        ("Omega_n", lambda v: omega_n(v, n)),
                        ("F1^-1", F1_inv),
                        ("b^-1", b_inv)])
    return IdentityReport.build("THM6", {"x": x, "n": n}, n * n * m_forward(ctx, x), rhs, tol,
                                notes=ctx.notes)


def corollary3_check(x: float, n: float = 2, tol: float = 1e-7) -> IdentityReport:
    """Omega_n(x) = F1(b(n**2 m_R(x)))."""
    rhs = F1_of(b_of_r(n * n * m_R(x)))
    return IdentityReport.build("COR3", {"x": x, "n": n}, omega_n(x, n), rhs, tol)


def _H_n(v: float, n: float) -> float:
    return omega_n(F1_of(b_of_r(v)), 1.0 / n)


def _H_n_inv(y: float, n: float) -> float:
    return b_inv(F1_inv(omega_n(y, n)))


def theorem7_check(ctx: MGContext, x: float, n: float = 2, tol: float = 1e-6) -> IdentityReport:
    """y(n**2 x) = H_n((n**2 Q_{n^2})((n**-2 H_n^{-1})(y(x)))), H_n = Omega_{1/n} F1 b."""
    rhs = run_chain(x, [("y", lambda v: y_of(ctx, v)),
                        ("n^-2 H_n^-1", lambda v: _H_n_inv(v, n) / (n * n)),
                        ("n^2 Q_{n^2}", lambda v: n * n * q_n(ctx, v, n * n)),
                        ("H_n", lambda v: _H_n(v, n))])
    return IdentityReport.build("THM7", {"x": x, "n": n}, y_of(ctx, n * n * x), rhs, tol,
                                notes=ctx.notes)


def theorem11_check(ctx: MGContext, x: float, n: float = 2, tol: float = 1e-6) -> IdentityReport:
    """y(n**2 x) = F1(b(Q_{n^2}(b^{-1}(F1^{-1}(y(x)))))."""
    rhs = run_chain(x, [("y", lambda v: y_of(ctx, v)),
                        ("F1^-1", F1_inv),
                        ("b^-1", b_inv),
                        ("Q_{n^2}", lambda v: q_n(ctx, v, n * n)),
                        ("b", b_of_r),
                        ("F1", F1_of)])
    return IdentityReport.build("THM11", {"x": x, "n": n}, y_of(ctx, n * n * x), rhs, tol,
                                notes=ctx.notes)


# ---------------------------------------------------------------------------
# singular-modulus chains

def eq77_check(A: float, n: float = 2, tol: float = 1e-6) -> IdentityReport:
    """
    k_{n^2 A} = F1(b(Q_{n^2}(b^{-1}(F1^{-1}(k_A))))) for the weight with y = k.

    Q_{n^2} is m_G(n**2 m_inv(.)) with m_inv(r) = k_i(R(q_r)).
    """
    from .transform import singular_modulus_weight
    ctx = MGContext(singular_modulus_weight(), route="primitive")
    rhs = run_chain(A, [("k", ell.singular_modulus),
                        ("F1^-1", F1_inv),
                        ("b^-1", b_inv),
                        ("Q_{n^2}", lambda v: q_n(ctx, v, n * n)),
                        ("b", b_of_r),
                        ("F1", F1_of)])
    return IdentityReport.build("EQ77", {"A": A, "n": n}, ell.singular_modulus(n * n * A),
                                rhs, tol, notes=ctx.notes)


def eq78_check(A: float, tol: float = 1e-8) -> IdentityReport:
    """m_G(A) = b^{-1}(F1^{-1}(k_A)) for the weight with y = k."""
    from .transform import singular_modulus_weight
    ctx = MGContext(singular_modulus_weight(), route="primitive")
    rhs = b_inv(F1_inv(ell.singular_modulus(A)))
    return IdentityReport.build("EQ78", {"A": A}, m_forward(ctx, A), rhs, tol)


def k_i_roundtrip_check(k: float, tol: float = 1e-10) -> IdentityReport:
    """k_{k_i(k)} = k."""
    return IdentityReport.build("KI-ROUNDTRIP", {"k": k}, ell.singular_modulus(k_i_of(k)),
                                k, tol)


def eq79_probe(A: float, h: float = 1e-6, tol: float = 1e-4) -> IdentityReport:
    """
    dk_A/dA by finite differences against -pi sqrt(k_i(A)) / (k_A (1-k_A**2) K**2).

    Evaluated with K(A) and with K(k_A); ``notes`` names the reading that
    passes, if any. ``extra`` also carries the residual of the same closed
    form against the derivative of k_i at A.
    """
    fd = derivative_central(ell.singular_modulus, A, h)
    kA = ell.singular_modulus(A)
    base = -math.pi * math.sqrt(k_i_of(A)) / (kA * (1 - kA * kA))
    r_A = base / ell.agm_K(A) ** 2
    r_kA = base / ell.agm_K(kA) ** 2
    dki = derivative_central(k_i_of, A, h)
    res = {"K(A)": abs(fd - r_A) / abs(fd), "K(k_A)": abs(fd - r_kA) / abs(fd)}
    best = min(res, key=res.get)
    passing = [name for name, v in res.items() if v <= tol]
    notes = (f"passing reading: {', '.join(passing)}" if passing
             else f"no reading passes; closest {best}")
    rep = IdentityReport.build("EQ79", {"A": A, "h": h}, fd,
                               r_A if best == "K(A)" else r_kA, tol, notes=notes, kind="probe")
    rep.extra.update({"rel_resid_K(A)": res["K(A)"], "rel_resid_K(k_A)": res["K(k_A)"],
                      "dk_i_dA_fd": dki,
                      "rel_resid_vs_dk_i": abs(dki - r_A) / abs(dki)})
    return rep


def eq80_probe(A: float, n: float = 2, tol: float = 1e-6) -> IdentityReport:
    """
    Omega_n(A) = k_i(b^{-1}(F1^{-1}(k(n**2 k_i(F1(b(k_A))))))), literally.

    Each link is guarded; when the chain leaves a domain the report is a
    failure naming the link.
    """
    links = [("k", ell.singular_modulus),
             ("b", b_of_r),
             ("F1", F1_of),
             ("n^2 k_i", lambda v: n * n * k_i_of(v)),
             ("k", ell.singular_modulus),
             ("F1^-1", F1_inv),
             ("b^-1", b_inv),
             ("k_i", k_i_of)]
    try:
        rhs = run_chain(A, links)
    except OutOfRange as exc:
        return IdentityReport.failure("EQ80", {"A": A, "n": n}, tol, str(exc), kind="probe")
    return IdentityReport.build("EQ80", {"A": A, "n": n}, omega_n(A, n), rhs, tol,
                                notes="literal chain", kind="probe")


# ---------------------------------------------------------------------------
# amplitude-weight closed forms

def eq39_check(n: float = 2, tol: float = 1e-8) -> IdentityReport:
    """
    With the amplitude weight at k = 1:
    m_inv(n**2) = log(sec(Omega_n(t)) + tan(Omega_n(t))),
    t = -pi/2 + 2 arctan(exp(m_inv(1))).
    """
    ctx = MGContext(amplitude_weight(1.0))
    t = -0.5 * math.pi + 2.0 * math.atan(math.exp(m_inv(ctx, 1.0)))
    w = omega_n(t, n)
    rhs = math.log(1.0 / math.cos(w) + math.tan(w))
    return IdentityReport.build("EQ39", {"n": n}, m_inv(ctx, n * n), rhs, tol,
                                notes="t reproduces R(exp(-pi))", extra={"t": t})


#: R(exp(-2 pi)) in radicals
RR_E2PI = 0.5 * (-1.0 - SQRT5 + math.sqrt(2.0 * (5.0 + SQRT5)))


def eq41_probe(tol: float = 1e-7) -> IdentityReport:
    """
    m_inv(4) under the amplitude weight with 1/2 against F[R(e^{-2 pi}), 1/2].

    Two readings of the second argument of F: modulus 1/2 (weight and F both
    use k = 1/2 as a modulus) and parameter 1/2 (F with modulus 1/sqrt 2).
    The report's ``notes`` name the reading that passes.
    """
    lhs = m_inv(MGContext(amplitude_weight(0.5)), 4.0)
    readings = {"modulus": ell.incomplete_F(RR_E2PI, 0.5),
                "parameter": ell.incomplete_F(RR_E2PI, math.sqrt(0.5))}
    res = {k: abs(lhs - v) / abs(v) for k, v in readings.items()}
    best = min(res, key=res.get)
    passing = [k for k, v in res.items() if v <= tol]
    notes = (f"passing reading: {', '.join(passing)}" if passing
             else f"no reading passes; closest {best}")
    rep = IdentityReport.build("EQ41", {"k": 0.5}, lhs, readings[best], tol, notes=notes,
                               kind="probe")
    rep.extra.update({f"rel_resid_{k}": v for k, v in res.items()})
    rep.extra["radical_vs_R"] = abs(RR_E2PI - rr(math.exp(-2 * math.pi)))
    return rep
