"""
Acceptance criteria 1-15, each at its stated tolerance.

Every criterion prints one ``PASS``/``FAIL`` line. Run with ``pytest -s`` or
directly as ``python tests/test_acceptance.py``.
"""

import math
import sys

import numpy as np
import pytest

from rrkernel import elliptic as ell
from rrkernel import modular as mod
from rrkernel import qseries as qs
from rrkernel import series as ser
from rrkernel import solver as sol
from rrkernel import transform as tr

QUINTIC = tr.MGContext(tr.quintic_weight())
Q_GRID = [round(0.05 * i, 2) for i in range(1, 19)]
X_RR = [float(qs.rr(q)) for q in (0.1, 0.2, 0.3)]


def worst(values, tol):
    """(passed, detail) for a list of (label, residual)."""
    label, r = max(values, key=lambda v: v[1])
    return r <= tol, f"worst {r:.2e} at {label} (tol {tol:.0e})"


def both(*parts):
    ok = all(p[0] for p in parts)
    return ok, "; ".join(p[1] for p in parts)


def newton_quintic(a):
    x = a
    for _ in range(60):
        x -= (x ** 5 + x - a) / (5 * x ** 4 + 1)
    return x


def c01_eq3():
    return worst([(f"r={r}", ell.eq3_check(r).rel_resid) for r in (1, 2, 3, 4)], 1e-9)


def c02_eq5_eq61():
    qq = (0.1, 0.3, 0.5)
    return both(worst([(f"q={q}", qs.rr_derivative_check(q).rel_resid) for q in qq], 1e-6),
                worst([(f"q={q}", qs.rr_log_derivative_check(q).residual) for q in qq], 1e-9))


def c03_eq6():
    return both(worst([(f"q={q}", qs.eq6_check(q).rel_resid) for q in Q_GRID], 1e-9),
                worst([(f"q={q}", qs.rr_cross_check(q).residual) for q in Q_GRID], 1e-10))


def c04_eq7():
    return worst([(f"r={r}", ell.dk_dq_check(r).rel_resid) for r in (1.0, 2.0)], 1e-6)


def c05_eq21():
    return worst([(f"r={r}", tr.eq21_check(r).residual) for r in (1.0, 2.0, 4.0)], 1e-8)


def c06_eq55():
    return worst([(f"r={r}", tr.eq55_check(r).rel_resid) for r in (0.5, 1.0, 2.0, 4.0)], 1e-8)


def c07_omega():
    return both(worst([(f"x={x:.4f}", mod.omega2_algebraic_check(x).residual) for x in X_RR],
                      1e-9),
                worst([(f"x={x:.4f}", mod.omega_composition_check(x).residual) for x in X_RR],
                      1e-9))


def c08_thm5_cor2():
    res = []
    for A in (0.2, 0.3):
        res.append((f"THM5 A={A}", mod.theorem5_check(QUINTIC, A).residual))
        res.append((f"COR2 A={A}", mod.corollary2_check(QUINTIC, A).residual))
    return worst(res, 1e-7)


def c09_thm6_cor3():
    res = [(f"THM6 n={n}", mod.theorem6_check(QUINTIC, 0.3, n).residual) for n in (1.0, 2.0)]
    res += [(f"COR3 x={x:.4f}", mod.corollary3_check(x, 2.0).residual)
            for x in X_RR + [qs.rr_of_r(1.0)]]
    return worst(res, 1e-6)


def c10_thm11():
    ctxs = {"quintic": QUINTIC,
            "amplitude k=0": tr.MGContext(tr.amplitude_weight(0.0)),
            "amplitude k=0.5": tr.MGContext(tr.amplitude_weight(0.5))}
    return worst([(name, mod.theorem11_check(c, 0.1, 2.0).residual)
                  for name, c in ctxs.items()], 1e-6)


def c11_solver():
    sin_err = abs(sol.solve_sin(0.2) - math.asin(0.2))
    quint = [(f"a={a}", abs(sol.solve_via_rr(sol.SMOOTH_MAPS["quintic"], a) - newton_quintic(a)))
             for a in (0.2, 0.4, 0.6)]
    return both(worst([("sin a=0.2", sin_err)], 1e-6), worst(quint, 1e-8))


def c12_c_value():
    G = ser.PolynomialWeight((1.0, 1.0), (1.0, 2.0))
    return both(worst([("closed forms", ser.c_value_check().rel_resid)], 1e-10),
                worst([("quadrature", ser.c_quadrature_check(0.2).rel_resid)], 1e-8),
                worst([("THM9 x+x^2", ser.theorem9_check(G).rel_resid)], 1e-8))


def c13_eq41():
    rep = mod.eq41_probe()
    ok = rep.residual <= 1e-7 and rep.notes.startswith("passing reading")
    return ok, f"resid {rep.residual:.2e} (tol 1e-07); {rep.notes}"


def c14_jacobi_eq70():
    return both(worst([("1000 points", ell.jacobi_pythagorean_check(1000, seed=0).lhs)], 1e-11),
                worst([("r=1 k=0.5", tr.eq70_check(1.0, 0.5).residual)], 1e-7))


def c15_properties():
    res = []
    res += [(f"m_forward(m_inv({r}))", abs(tr.m_forward(QUINTIC, tr.m_inv(QUINTIC, r)) - r) / r)
            for r in (0.5, 1.0, 2.0, 4.0)]
    parts = [worst(res, 1e-8)]
    res = [(f"F1(F1_inv({y}))", abs(tr.F1_of(tr.F1_inv(y)) - y))
           for y in (0.05, 0.2, 0.3, 0.45, 0.6)]
    parts.append(worst(res, 1e-10))
    res = [(f"rr_inverse(R({q}))", abs(mod.rr_inverse(float(qs.rr(q))) - q))
           for q in (0.01, 0.1, 0.2, 0.3, 0.45, 0.6)]
    parts.append(worst(res, 1e-10))
    res = [(f"BR({x:.1f}^5+{x:.1f})", abs(ell.bring_radical(x ** 5 + x) - x))
           for x in np.linspace(-2, 2, 41)]
    parts.append(worst(res, 1e-12))
    res = [(f"k(k_i({k:.1f}))", abs(ell.singular_modulus(tr.k_i_of(k)) - k))
           for k in np.linspace(0.1, 0.9, 9)]
    parts.append(worst(res, 1e-10))
    return both(*parts)


CRITERIA = [
    (1, "EQ3 eta-elliptic closed form", c01_eq3),
    (2, "EQ5/EQ61 derivative of R", c02_eq5_eq61),
    (3, "EQ6 eta quotient and cross-check", c03_eq6),
    (4, "EQ7 dk/dq", c04_eq7),
    (5, "EQ21 F1(b_r) = R", c05_eq21),
    (6, "EQ55 quintic tail integral", c06_eq55),
    (7, "OMEGA2-ALG / OMEGA-COMP", c07_omega),
    (8, "THM5/COR2", c08_thm5_cor2),
    (9, "THM6/COR3", c09_thm6_cor3),
    (10, "THM11 chain at n=2", c10_thm11),
    (11, "SOLVER sin and quintic", c11_solver),
    (12, "C-VALUE and THM9", c12_c_value),
    (13, "EQ41 convention probe", c13_eq41),
    (14, "JACOBI and EQ70", c14_jacobi_eq70),
    (15, "PROPERTY SUITE round trips", c15_properties),
]


def evaluate(num, name, fn):
    ok, detail = fn()
    return ok, f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d} {name}: {detail}"


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"c{n:02d}" for n, _, _ in CRITERIA])
def test_acceptance(num, name, fn, capsys):
    ok, line = evaluate(num, name, fn)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [evaluate(*c) for c in CRITERIA]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
