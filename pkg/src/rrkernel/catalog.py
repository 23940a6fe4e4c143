"""
Identity registry and the regression runner behind ``rrkernel verify``.

Every entry names one relation, the grid of inputs it runs on by default and
its tolerance. ``run_catalog`` evaluates entries in id order and grid order,
so identical inputs give identical reports.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from . import __version__
from . import elliptic as ell
from . import modular as mod
from . import qseries as qs
from . import series as ser
from . import solver as sol
from . import transform as tr
from .errors import RRKernelError, UnknownIdentity
from .numerics import DEFAULT_QUAD, QuadratureConfig, quadrature_defaults
from .report import IdentityReport

SCHEMA_VERSION = 1

Runner = Callable[..., IdentityReport]


class _Contexts:
    """MGContext cache for one run, keyed by weight name and parameters."""

    def __init__(self):
        self._ctx: Dict[Tuple, tr.MGContext] = {}

    def get(self, weight: str, route: str = "integral", **params) -> tr.MGContext:
        key = (weight, route, tuple(sorted(params.items())))
        if key not in self._ctx:
            self._ctx[key] = tr.MGContext(tr.get_weight(weight, **params), route=route)
        return self._ctx[key]


@dataclass(frozen=True)
class CatalogEntry:
    """
    One registry entry.

    ``runner(env, tol=..., **inputs)`` returns a report; ``grid`` lists the
    default input sets. ``equation_ref`` states the relation in words.
    """

    id: str
    equation_ref: str
    grid: Tuple[Dict[str, Any], ...]
    default_tol: float
    runner: Runner
    kind: str = "identity"

    @property
    def default_inputs(self) -> Tuple[Dict[str, Any], ...]:
        return self.grid


def _weighted(check: Callable[..., IdentityReport]) -> Runner:
    """Runner for checks taking an MGContext; the grid names the weight."""
    def run(env: _Contexts, tol: float, weight: str = "quintic", k: Optional[float] = None,
            **kw) -> IdentityReport:
        params = {} if k is None else {"k": k}
        ctx = env.get(weight, **params)
        rep = check(ctx, tol=tol, **kw)
        label = ctx.G.label
        rep.notes = f"weight={label}" + (f"; {rep.notes}" if rep.notes else "")
        return rep
    return run


def _plain(check: Callable[..., IdentityReport]) -> Runner:
    def run(env: _Contexts, tol: float, **kw) -> IdentityReport:
        return check(tol=tol, **kw)
    return run


def _kernel(check: Callable[..., IdentityReport], with_weight: bool = False) -> Runner:
    def run(env: _Contexts, tol: float, a, b, c, m, coeffs=None, exps=None) -> IdentityReport:
        k = ser.QuadraticKernel(a, b, c, m)
        if with_weight:
            return check(k, ser.PolynomialWeight(tuple(coeffs), tuple(exps)), tol=tol)
        return check(k, tol=tol)
    return run


def _poly(check: Callable[..., IdentityReport]) -> Runner:
    def run(env: _Contexts, tol: float, coeffs, exps, **kw) -> IdentityReport:
        return check(ser.PolynomialWeight(tuple(coeffs), tuple(exps)), tol=tol, **kw)
    return run


def _eq60(env: _Contexts, tol: float, x: float) -> IdentityReport:
    # g(y) = y**2 + y
    return sol.eq60_check(x, lambda y: y * y + y, lambda y: 2 * y + 1, tol=tol)


def _grid(name: str, values: Iterable[float], **fixed) -> Tuple[Dict[str, Any], ...]:
    return tuple({name: v, **fixed} for v in values)


_Q_GRID = tuple(round(0.05 * i, 2) for i in range(1, 19))
_X_RR = tuple(float(qs.rr(q)) for q in (0.1, 0.2, 0.3))
_KERNELS = ({"a": 1.0, "b": 1.0, "c": 0.0, "m": 0.0},
            {"a": 1.0, "b": 0.0, "c": -1.0, "m": 0.0},
            {"a": -1.0, "b": 1.0, "c": 0.0, "m": 0.5})


def _build() -> Dict[str, CatalogEntry]:
    E = CatalogEntry
    entries = [
        E("EQ3", "f(-q) through k, k' and K(k) at q = exp(-pi sqrt r)",
          _grid("r", (1.0, 2.0, 3.0, 4.0)), 1e-9, _plain(ell.eq3_check)),
        E("EQ5", "R'(q) closed form against central differences",
          _grid("q", (0.1, 0.3, 0.5)), 1e-6, _plain(qs.rr_derivative_check)),
        E("EQ61", "q R'(q)/R(q) = f(-q)**5 / (5 f(-q**5))",
          _grid("q", (0.1, 0.3, 0.5)), 1e-9, _plain(qs.rr_log_derivative_check)),
        E("EQ6", "R(q) through the eta quotient",
          _grid("q", _Q_GRID), 1e-9, _plain(qs.eq6_check)),
        E("EQ6-CROSS", "continued fraction against eta quotient",
          _grid("q", _Q_GRID), 1e-10, _plain(qs.rr_cross_check)),
        E("ETA-MODULAR", "eta(i/t) = sqrt(t) eta(i t)",
          _grid("t", (0.5, 1.0, 2.0)), 1e-11, _plain(qs.eta_modular_check)),
        E("EQ7", "dk_r/dq closed form against central differences",
          _grid("r", (1.0, 2.0)), 1e-6, _plain(ell.dk_dq_check)),
        E("JACOBI", "sn**2 + cn**2 = 1 and dn**2 + k**2 sn**2 = 1 at random points",
          ({"n_points": 1000, "seed": 0},), 1e-11, _plain(ell.jacobi_pythagorean_check)),
        E("EQ21", "F1(b_r) = R(exp(-pi sqrt r))",
          _grid("r", (1.0, 2.0, 4.0)), 1e-8, _plain(tr.eq21_check)),
        E("EQ55", "eta-weighted tail integral of the quintic weight = R**5 + R",
          _grid("r", (0.5, 1.0, 2.0, 4.0)), 1e-8, _plain(tr.eq55_check)),
        E("THM1", "5 int_0^{y(A)} G/(t rad) dt = A",
          _grid("A", (0.2, 0.5)), 1e-8, _weighted(tr.theorem1_check)),
        E("PROP1", "dm_G/dA = -phi(m_G(A))",
          _grid("A", (0.3,)), 1e-5, _weighted(tr.prop1_check)),
        E("EQ14", "dy/dA by the chain rule through R, q and m_G",
          _grid("A", (0.3,)), 1e-5, _weighted(tr.eq14_check)),
        E("THM2", "dA/dk = 2**(1/3) G(y) / (k k')**(2/3)",
          _grid("A", (0.3,)), 1e-4, _weighted(tr.theorem2_check)),
        E("EQ16", "int_0^A dt / G(y(t)) = b at k_{m_G(A)}",
          _grid("A", (0.3,)), 1e-7, _weighted(tr.eq16_check)),
        E("THM3", "h(b_{m_G(A)}) = A",
          _grid("A", (0.3,)), 1e-7, _weighted(tr.theorem3_check)),
        E("THM4", "5 int_0^A G/(t rad) = h(5 int_0^A 1/(t rad))",
          _grid("A", (0.4,)), 1e-7, _weighted(tr.theorem4_check)),
        E("COR1", "h^{-1}(A) = b_{m_G(A)}",
          _grid("A", (0.3,)), 1e-8, _weighted(tr.corollary1_check)),
        E("THM10", "H_o^{-1}(F[arcsin y(A), k]) = b_{m_G(A)}",
          _grid("A", (0.3,), k=0.5), 1e-7, _theorem10),
        E("EQ70", "R(q) = sn(H_o(b_r), k)",
          ({"r": 1.0, "k": 0.5}, {"r": 2.0, "k": 0.3}), 1e-7, _plain(tr.eq70_check)),
        E("EQ72", "derivative of H_o^{-1} in closed form",
          ({"x": 0.3, "k": 0.5},), 1e-5, _plain(tr.eq72_check)),
        E("OMEGA2-ALG", "(Omega_2 - x**2)/(Omega_2 + x**2) = x Omega_2**2",
          _grid("x", _X_RR), 1e-9, _plain(mod.omega2_algebraic_check)),
        E("OMEGA-COMP", "Omega_2(Omega_3(x)) = Omega_6(x)",
          _grid("x", _X_RR), 1e-9, _plain(mod.omega_composition_check)),
        E("OMEGA-INV", "Omega_{1/2}(Omega_2(x)) = x",
          _grid("x", _X_RR), 1e-9, _plain(mod.omega_inverse_check)),
        E("EQ32", "Q_n(Q_m(A)) = Q_{nm}(A)",
          ({"A": 16.0, "n": 2.0, "m": 3.0}, {"A": 0.2, "n": 0.5, "m": 1 / 3}), 1e-7,
          _weighted(mod.qn_composition_check)),
        E("THM5", "y(Q*_{n^2}(A)) = Omega_n(y(A))",
          _grid("A", (0.2, 0.3)), 1e-7, _weighted(mod.theorem5_check)),
        E("COR2", "Q*_{n^2}(A) = y^{-1}(Omega_n(y(A)))",
          _grid("A", (0.2, 0.3)), 1e-7, _weighted(mod.corollary2_check)),
        E("EQ37", "Q_{n^2}(A) against y(Omega_n(y^{-1}(A))), literal reading",
          ({"A": 0.4, "n": 2.0, "weight": "amplitude", "k": 0.5},
           {"A": 0.4, "n": 0.5, "weight": "amplitude", "k": 0.5}), 1e-7,
          _weighted(mod.eq37_probe), kind="probe"),
        E("THM6", "n**2 m_G(x) = b^{-1}(F1^{-1}(Omega_n(y(x))))",
          ({"x": 0.3, "n": 1.0}, {"x": 0.3, "n": 2.0}), 1e-6, _weighted(mod.theorem6_check)),
        E("COR3", "Omega_n(x) = F1(b(n**2 m_R(x)))",
          _grid("x", _X_RR, n=2.0), 1e-6, _plain(mod.corollary3_check)),
        E("THM7", "y(n**2 x) through H_n and Q_{n^2}",
          ({"x": 0.1, "n": 2.0},), 1e-6, _weighted(mod.theorem7_check)),
        E("THM11", "y(n**2 x) = F1(b(Q_{n^2}(b^{-1}(F1^{-1}(y(x))))))",
          ({"x": 0.1, "n": 2.0}, {"x": 0.1, "n": 2.0, "weight": "amplitude", "k": 0.5}),
          1e-6, _weighted(mod.theorem11_check)),
        E("EQ77", "k_{n^2 A} through the weight with y = k",
          ({"A": 2.0, "n": 2.0},), 1e-6, _plain(mod.eq77_check)),
        E("EQ78", "m_G(A) = b^{-1}(F1^{-1}(k_A)) for the weight with y = k",
          _grid("A", (2.0,)), 1e-8, _plain(mod.eq78_check)),
        E("KI-ROUNDTRIP", "k_{k_i(k)} = k",
          _grid("k", (0.1, 0.3, 0.7)), 1e-10, _plain(mod.k_i_roundtrip_check)),
        E("EQ79", "dk_A/dA closed form, two readings of K",
          _grid("A", (0.7,)), 1e-4, _plain(mod.eq79_probe), kind="probe"),
        E("EQ80", "Omega_n(A) through k_i, b and F1, literal chain",
          _grid("A", (0.3,)), 1e-6, _plain(mod.eq80_probe), kind="probe"),
        E("EQ39", "amplitude weight at k = 1: m_inv(n**2) through log(sec + tan)",
          _grid("n", (2.0, 3.0)), 1e-8, _plain(mod.eq39_check)),
        E("EQ41", "m_inv(4) for the amplitude weight against F[R(e^{-2 pi}), 1/2]",
          ({},), 1e-7, _plain(mod.eq41_probe), kind="probe"),
        E("SOLVER-QUINTIC", "root of x**5 + x = a through R(q) against the Bring radical",
          _grid("a", (0.2, 0.4, 0.6)), 1e-8, _plain(sol.solve_quintic_check)),
        E("SOLVER-SIN", "root of sin(x) = a through the fundamental equation",
          _grid("a", (0.2,)), 1e-6, _plain(sol.solve_sin_check)),
        E("EQ60", "int_0^x f(-q)**5 R g'(R)/(q f(-q**5)) dq = 5 g(R(x)), g(y) = y**2 + y",
          _grid("x", (0.3, 0.6)), 1e-8, _eq60),
        E("EX12", "BR(n**2 (R**5 + R)) against sn(H_o(b_1), k)",
          _grid("n", (1.0, 2.0)), 1e-7, _plain(sol.example12_check), kind="probe"),
        E("C-VALUE", "C(1/5): general closed form against the second closed form",
          ({},), 1e-10, _plain(ser.c_value_check)),
        E("C-QUAD", "C(nu) closed form against eta-weighted quadrature",
          _grid("nu", (0.2, 0.4)), 1e-8, _plain(ser.c_quadrature_check)),
        E("THM9", "eta-weighted integral of sum a x**p = sum a C(p/5)",
          ({"coeffs": (1.0, 1.0), "exps": (1.0, 2.0)},
           {"coeffs": (2.0, 0.5), "exps": (0.5, 3.0)}), 1e-8, _poly(ser.theorem9_check)),
        E("COR4", "y(x0 - eps) tends to (sqrt 5 - 1)/2 at x0 = sum a C(m/5)",
          ({"coeffs": (1.0,), "exps": (1.0,), "eps": 1e-3},), 1e-2,
          _poly(ser.corollary4_check)),
        E("EQ81", "F_i' = rad(F_i)",
          _grid("x", (0.05, 0.2)), 1e-6, _plain(ser.F_i_derivative_check)),
        E("THM12", "quadratic-kernel integral of G(F_i(U(w))) against the C sum",
          tuple({**k, "coeffs": (1.0, 1.0), "exps": (1.0, 2.0)} for k in _KERNELS), 1e-6,
          _kernel(ser.theorem12_check, with_weight=True)),
        E("COR5", "5 int U / Q**m dw = (5/2) X_MAX**2",
          _KERNELS, 1e-6, _kernel(ser.corollary5_check)),
        E("COR6", "5 int F_i(U) / Q**m dw = C(2/5)",
          _KERNELS, 1e-6, _kernel(ser.corollary6_check)),
    ]
    out: Dict[str, CatalogEntry] = {}
    for e in entries:
        if e.id in out:
            raise RuntimeError(f"duplicate catalog id {e.id}")
        out[e.id] = e
    return out


def _theorem10(env: _Contexts, tol: float, A: float, k: float) -> IdentityReport:
    # k is the Jacobi modulus here, not a weight parameter
    ctx = env.get("quintic")
    rep = tr.theorem10_check(ctx, A, k, tol=tol)
    rep.notes = f"weight={ctx.G.label}"
    return rep


CATALOG: Dict[str, CatalogEntry] = _build()


def catalog_ids() -> List[str]:
    return sorted(CATALOG)


def get_entry(id: str) -> CatalogEntry:
    try:
        return CATALOG[id]
    except KeyError:
        raise UnknownIdentity(f"unknown identity {id!r}; known: {', '.join(catalog_ids())}") \
            from None


def resolve_ids(ids: Sequence[str]) -> List[str]:
    """Expand ``all``, check every id and return them sorted and unique."""
    if not ids or any(i.lower() == "all" for i in ids):
        return catalog_ids()
    for i in ids:
        get_entry(i)
    return sorted(set(ids))


@dataclass
class RunReport:
    """Outcome of a verify run."""

    version: str
    config: Dict[str, Any]
    reports: List[IdentityReport]
    timings: Optional[List[float]] = None
    summary: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        self.summary = summarize(self.reports)

    @property
    def failed(self) -> bool:
        return self.summary["failed"] > 0

    def to_dict(self) -> dict:
        recs = []
        for i, r in enumerate(self.reports):
            d = r.to_dict()
            if self.timings is not None:
                d["wall_s"] = self.timings[i]
            recs.append(d)
        return {"schema_version": SCHEMA_VERSION, "tool": "rrkernel", "version": self.version,
                "config": self.config, "summary": self.summary, "identities": recs}

    def to_csv(self) -> str:
        return reports_to_csv(self.reports, self.timings)


def summarize(reports: Sequence[IdentityReport]) -> Dict[str, int]:
    ident = [r for r in reports if r.kind == "identity"]
    probes = [r for r in reports if r.kind == "probe"]
    return {"total": len(reports),
            "identities": len(ident),
            "passed": sum(r.passed for r in ident),
            "failed": sum(not r.passed for r in ident),
            "probes": len(probes),
            "probes_matched": sum(r.passed for r in probes)}


CSV_FIELDS = ("id", "kind", "inputs", "lhs", "rhs", "abs_resid", "rel_resid", "tol", "passed",
              "notes")


def reports_to_csv(reports: Sequence[IdentityReport],
                   timings: Optional[Sequence[float]] = None) -> str:
    buf = io.StringIO()
    fields = CSV_FIELDS + (("wall_s",) if timings is not None else ())
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(fields)
    for i, r in enumerate(reports):
        inputs = ";".join(f"{k}={v!r}" for k, v in r.inputs.items())
        row = [r.id, r.kind, inputs, repr(r.lhs), repr(r.rhs), repr(r.abs_resid),
               repr(r.rel_resid), repr(r.tol), str(r.passed).lower(), r.notes]
        if timings is not None:
            row.append(repr(timings[i]))
        w.writerow(row)
    return buf.getvalue()


def run_entry(entry: CatalogEntry, env: _Contexts, tol: Optional[float] = None,
              timing: Optional[List[float]] = None) -> List[IdentityReport]:
    """Run one entry over its grid; errors become failure reports."""
    t_use = entry.default_tol if tol is None else tol
    out = []
    for inputs in entry.grid:
        t0 = time.perf_counter()
        try:
            rep = entry.runner(env, tol=t_use, **inputs)
        except (RRKernelError, ArithmeticError, ValueError) as exc:
            numeric = {k: v for k, v in inputs.items()
                       if isinstance(v, (int, float)) and not isinstance(v, bool)}
            rep = IdentityReport.failure(entry.id, numeric, t_use,
                                         f"{type(exc).__name__}: {exc}", kind=entry.kind)
        rep.kind = entry.kind
        out.append(rep)
        if timing is not None:
            timing.append(time.perf_counter() - t0)
    return out


def run_catalog(ids: Sequence[str] = ("all",), tol_override: Optional[float] = None,
                quad: QuadratureConfig = DEFAULT_QUAD, timing: bool = False) -> RunReport:
    """
    Run the selected entries under ``quad`` and collect a :class:`RunReport`.

    Entries run in sorted id order and each grid in its listed order.
    """
    selected = resolve_ids(ids)
    env = _Contexts()
    reports: List[IdentityReport] = []
    times: Optional[List[float]] = [] if timing else None
    with quadrature_defaults(quad):
        for i in selected:
            reports.extend(run_entry(CATALOG[i], env, tol_override, times))
    config = {"ids": selected, "tol_override": tol_override,
              "abs_tol": quad.abs_tol, "rel_tol": quad.rel_tol,
              "max_refinements": quad.max_refinements, "tail_eps": quad.tail_eps}
    return RunReport(__version__, config, reports, times)

