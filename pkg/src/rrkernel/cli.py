"""
Command-line front end: ``rrkernel eval | verify | solve | table``.

Exit codes: 0 success, 1 at least one identity failed (verify), 2 usage,
domain or lookup error. Quadrature flags can also be set through
``RRKERNEL_REL_TOL``, ``RRKERNEL_ABS_TOL``, ``RRKERNEL_MAX_REFINEMENTS``,
``RRKERNEL_TAIL_EPS`` and ``RRKERNEL_OUT``; explicit flags win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from . import catalog as cat
from . import elliptic as ell
from . import modular as mod
from . import qseries as qs
from . import series as ser
from . import solver as sol
from . import transform as tr
from .errors import (DomainError, OutOfRange, RRKernelError, UnknownFunction, UnknownName,
                     UnknownTable)
from .numerics import EPS, QuadratureConfig, quadrature_defaults

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

_TIGHT = QuadratureConfig(abs_tol=1e-17, rel_tol=4e-15, max_refinements=12, tail_eps=1e-17)


# ---------------------------------------------------------------------------
# eval registry: name -> (parameter names, function, quadrature-based?)

def _sn_cn_dn(i: int) -> Callable[..., float]:
    return lambda u, k: float(ell.jacobi_am_sn_cn_dn(u, k)[i])


FUNCTIONS: Dict[str, Tuple[Tuple[str, ...], Callable[..., float], bool]] = {
    "rr": (("q",), lambda q: float(qs.rr(q)), False),
    "rr_of_r": (("r",), lambda r: float(qs.rr_of_r(r)), False),
    "eta": (("t",), lambda t: float(qs.dedekind_eta_axis(t)), False),
    "f_minus_q": (("q",), lambda q: float(qs.f_minus_q(q)), False),
    "K": (("k",), lambda k: ell.agm_K(k), False),
    "k_r": (("r",), ell.singular_modulus, False),
    "k_i": (("k",), tr.k_i_of, False),
    "b_r": (("r",), tr.b_of_r, False),
    "F1": (("x",), lambda x: tr.F1_of(x), True),
    "F1_inv": (("y",), lambda y: tr.F1_inv(y), True),
    "F_i": (("x",), lambda x: ser.F_i_of(x), True),
    "C": (("nu",), ser.C_closed, False),
    "sn": (("u", "k"), _sn_cn_dn(1), False),
    "cn": (("u", "k"), _sn_cn_dn(2), False),
    "dn": (("u", "k"), _sn_cn_dn(3), False),
    "am": (("u", "k"), _sn_cn_dn(0), False),
    "F": (("phi", "k"), ell.incomplete_F, False),
    "BR": (("a",), ell.bring_radical, False),
    "omega": (("x", "n"), mod.omega_n, False),
    "hyp2f1": (("a", "b", "c", "z"), ell.hyp2f1, False),
    "m_inv_quintic": (("r",), lambda r: tr.m_inv(tr.MGContext(tr.quintic_weight()), r), True),
}


def evaluate(name: str, args: Dict[str, float], quad: QuadratureConfig) -> Dict[str, float]:
    """Value and error estimate of a registered function."""
    try:
        params, fn, quad_based = FUNCTIONS[name]
    except KeyError:
        raise UnknownFunction(f"unknown function {name!r}; known: {', '.join(sorted(FUNCTIONS))}") \
            from None
    missing = [p for p in params if p not in args]
    extra = [a for a in args if a not in params]
    if missing or extra:
        raise DomainError(f"{name} takes --{' --'.join(params)}"
                          + (f"; missing {missing}" if missing else "")
                          + (f"; unexpected {extra}" if extra else ""))
    call = [args[p] for p in params]
    with quadrature_defaults(quad):
        value = float(fn(*call))
    if quad_based:
        with quadrature_defaults(_TIGHT):
            err = abs(value - float(fn(*call)))
    else:
        err = 4.0 * EPS * abs(value)
    return {"name": name, **{p: args[p] for p in params}, "value": value, "err_estimate": err}


# ---------------------------------------------------------------------------
# grids and tables

def parse_grid(text: Optional[str]) -> List[float]:
    """``a:b:step`` (inclusive), ``v1,v2,...``, or empty for no points."""
    if text is None or not text.strip():
        return []
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise DomainError(f"range grid must be start:stop:step, got {text!r}")
        a, b, h = (float(p) for p in parts)
        if h <= 0:
            raise DomainError("grid step must be positive")
        n = int(math.floor((b - a) / h + 1e-9))
        return [float(np.round(a + i * h, 12)) for i in range(n + 1)] if n >= 0 else []
    return [float(v) for v in text.split(",") if v.strip()]


TABLES = ("omega", "qn", "br", "kr")


def _or_nan(fn: Callable[[], float]) -> float:
    # cells outside the map's range are written as nan instead of aborting the table
    try:
        return fn()
    except OutOfRange:
        return math.nan


def make_table(what: str, ns: Sequence[float], xs: Sequence[float],
               weight: str = "quintic") -> Tuple[List[str], List[List[float]]]:
    """
    Header and rows of one table; an empty grid gives no rows.

    Q_n(A) exists only while n m_inv(A) stays below the weight's supremum;
    other cells are nan.
    """
    if what == "omega":
        return ["x", "n", "omega_n"], [[x, n, mod.omega_n(x, n)] for x in xs for n in ns]
    if what == "qn":
        ctx = tr.MGContext(tr.get_weight(weight))
        return ["A", "n", "Q_n"], [[a, n, _or_nan(lambda: mod.q_n(ctx, a, n))]
                                   for a in xs for n in ns]
    if what == "br":
        return ["a", "BR"], [[a, ell.bring_radical(a)] for a in xs]
    if what == "kr":
        rows = []
        for r in xs:
            k, kp = ell.singular_modulus_pair(r)
            rows.append([r, k, kp])
        return ["r", "k_r", "kp_r"], rows
    raise UnknownTable(f"unknown table {what!r}; known: {', '.join(TABLES)}")


def _csv_text(header: Sequence[str], rows: Sequence[Sequence[float]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# argument handling

def _env(name: str, cast, default):
    raw = os.environ.get("RRKERNEL_" + name)
    if raw is None or raw == "":
        return default
    try:
        return cast(raw)
    except ValueError:
        raise SystemExit(f"rrkernel: bad value {raw!r} for RRKERNEL_{name}")


def build_parser() -> argparse.ArgumentParser:
    d = QuadratureConfig()
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    g = common.add_argument_group("quadrature and output")
    g.add_argument("--rel-tol", type=float, default=_env("REL_TOL", float, d.rel_tol))
    g.add_argument("--abs-tol", type=float, default=_env("ABS_TOL", float, d.abs_tol))
    g.add_argument("--max-refinements", type=int,
                   default=_env("MAX_REFINEMENTS", int, d.max_refinements))
    g.add_argument("--tail-eps", type=float, default=_env("TAIL_EPS", float, d.tail_eps))
    g.add_argument("--out", default=_env("OUT", str, None),
                   help="output file (JSON for eval/verify/solve, CSV for table)")

    p = argparse.ArgumentParser(prog="rrkernel", description=__doc__.strip().splitlines()[0],
                                allow_abbrev=False)
    p.add_argument("--version", action="version", version=f"rrkernel {__version__}")
    sub = p.add_subparsers(dest="cmd", required=True)

    pe = sub.add_parser("eval", parents=[common], allow_abbrev=False,
                        help="evaluate a library function")
    pe.add_argument("name", nargs="?", help="function name, e.g. rr, K, BR (see --list)")
    pe.add_argument("--list", action="store_true", help="list the functions and exit")

    pv = sub.add_parser("verify", parents=[common], allow_abbrev=False,
                        help="run catalogued identities")
    pv.add_argument("ids", nargs="*", default=["all"], help="identity ids or 'all'")
    pv.add_argument("--tol", type=float, default=None, help="override every tolerance")
    pv.add_argument("--csv", default=None, help="also write a flat CSV report")
    pv.add_argument("--timing", action="store_true", help="record wall-clock per identity")
    pv.add_argument("--list", action="store_true", help="list the catalog and exit")
    pv.add_argument("--quiet", action="store_true", help="print only the summary")

    ps = sub.add_parser("solve", parents=[common], allow_abbrev=False,
                        help="solve f(x) = a through R(q)")
    ps.add_argument("kind", help="quintic, sin, or a registered map name")
    ps.add_argument("--a", type=float, required=True)

    pt = sub.add_parser("table", parents=[common], allow_abbrev=False,
                        help="write a CSV table")
    pt.add_argument("what", help="omega, qn, br or kr")
    pt.add_argument("--n", default="2,3,5,6", help="indices for omega and qn")
    pt.add_argument("--x", default=None, help="x grid (omega)")
    pt.add_argument("--A", default=None, help="A grid (qn)")
    pt.add_argument("--a", default=None, help="a grid (br)")
    pt.add_argument("--r", default=None, help="r grid (kr)")
    pt.add_argument("--weight", default="quintic", help="weight for qn")
    return p


def _split_eval_args(tokens: Sequence[str]) -> Dict[str, float]:
    """Parse ``--key value`` / ``--key=value`` pairs into floats."""
    out: Dict[str, float] = {}
    it = iter(tokens)
    for tok in it:
        if not tok.startswith("--"):
            raise DomainError(f"unexpected argument {tok!r}")
        key, eq, val = tok[2:].partition("=")
        if not eq:
            try:
                val = next(it)
            except StopIteration:
                raise DomainError(f"--{key} needs a value") from None
        try:
            out[key] = float(val)
        except ValueError:
            raise DomainError(f"--{key} needs a number, got {val!r}") from None
    return out


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.generic):
        return _json_safe(obj.item())
    return obj


def _dump_json(obj, path: Optional[str], stdout) -> None:
    text = json.dumps(_json_safe(obj), indent=2, allow_nan=False) + "\n"
    if path and path != "-":
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)


def _quad(ns: argparse.Namespace) -> QuadratureConfig:
    return QuadratureConfig(abs_tol=ns.abs_tol, rel_tol=ns.rel_tol,
                            max_refinements=ns.max_refinements, tail_eps=ns.tail_eps)


# ---------------------------------------------------------------------------
# commands

def cmd_eval(ns, rest, stdout) -> int:
    if ns.list:
        for name in sorted(FUNCTIONS):
            stdout.write(f"{name}: --{' --'.join(FUNCTIONS[name][0])}\n")
        return EXIT_OK
    if ns.name is None:
        raise UnknownFunction("eval needs a function name (see eval --list)")
    res = evaluate(ns.name, _split_eval_args(rest), _quad(ns))
    _dump_json(res, ns.out, stdout)
    return EXIT_OK


def cmd_verify(ns, stdout) -> int:
    if ns.list:
        for i in cat.catalog_ids():
            e = cat.CATALOG[i]
            stdout.write(f"{i:15s} {e.kind:8s} tol={e.default_tol:.0e} n={len(e.grid)}  "
                         f"{e.equation_ref}\n")
        return EXIT_OK
    run = cat.run_catalog(ns.ids, ns.tol, _quad(ns), timing=ns.timing)
    to_stdout = ns.out == "-"
    if not ns.quiet and not to_stdout:
        for r in run.reports:
            stdout.write(r.line() + "\n")
    if ns.out:
        _dump_json(run.to_dict(), ns.out, stdout)
    if ns.csv:
        with open(ns.csv, "w", encoding="utf-8", newline="") as fh:
            fh.write(run.to_csv())
    if not to_stdout:
        s = run.summary
        stdout.write(f"{s['passed']}/{s['identities']} identities passed, {s['failed']} failed; "
                     f"{s['probes_matched']}/{s['probes']} probes matched\n")
    return EXIT_FAIL if run.failed else EXIT_OK


def cmd_solve(ns, stdout) -> int:
    trace: dict = {}
    with quadrature_defaults(_quad(ns)):
        if ns.kind == "sin":
            x = sol.solve_sin(ns.a, trace=trace)
            resid = abs(math.sin(x) - ns.a)
            method = "fundamental equation with the sine weight"
        else:
            m = sol.get_map(ns.kind)
            x = sol.solve_via_rr(m, ns.a, trace=trace)
            resid = abs(float(m.f(x)) - ns.a)
            method = "R(exp(-pi sqrt(m_G(a - f(0)))))"
    _dump_json({"kind": ns.kind, "a": ns.a, "root": x, "residual": resid, "method": method,
                "trace": trace}, ns.out, stdout)
    return EXIT_OK


def cmd_table(ns, stdout) -> int:
    if ns.what not in TABLES:
        raise UnknownTable(f"unknown table {ns.what!r}; known: {', '.join(TABLES)}")
    grid_arg = {"omega": ns.x, "qn": ns.A, "br": ns.a, "kr": ns.r}[ns.what]
    with quadrature_defaults(_quad(ns)):
        header, rows = make_table(ns.what, parse_grid(ns.n), parse_grid(grid_arg), ns.weight)
    text = _csv_text(header, rows)
    if ns.out and ns.out != "-":
        with open(ns.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        ns, rest = parser.parse_known_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    if rest and ns.cmd != "eval":
        stderr.write(f"rrkernel: unrecognized arguments: {' '.join(rest)}\n")
        return EXIT_USAGE
    try:
        if ns.cmd == "eval":
            return cmd_eval(ns, rest, stdout)
        if ns.cmd == "verify":
            return cmd_verify(ns, stdout)
        if ns.cmd == "solve":
            return cmd_solve(ns, stdout)
        return cmd_table(ns, stdout)
    except (UnknownName, DomainError, RRKernelError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        stderr.write(f"rrkernel: {type(exc).__name__}: {msg}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
