"""
Shared numerical primitives.

Quadrature uses the tanh-sinh (double exponential) rule with level doubling.
The rule clusters nodes doubly-exponentially at both endpoints, which is what
the integrands of this package need: most carry ``t**(-1/6)``-type endpoint
singularities, and the eta-weighted integrals decay exponentially.

Root finding for monotone maps is delegated to :func:`scipy.optimize.brentq`.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import BadBracket, NonConvergence, TailBoundViolated

EPS = np.finfo(float).eps

# At |t| = 6 the abscissae sit ~1e-275 (relative) from the endpoints, so even
# a t**(-5/6) endpoint singularity loses only ~1e-46 of mass beyond them.
_TS_TMAX = 6.0
_TS_MIN_LEVEL = 3


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-14
    rel_tol: float = 1e-12
    max_refinements: int = 9
    tail_eps: float = 1e-15

    def __post_init__(self):
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be >= 0")
        if self.rel_tol < 16 * EPS:
            raise ValueError("rel_tol must be at least 16 machine epsilons")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be >= 1")
        if not 0 < self.tail_eps <= max(self.abs_tol, 16 * EPS):
            raise ValueError("tail_eps must be positive and not exceed abs_tol")

    def scaled(self, factor: float) -> "QuadratureConfig":
        """Same config with absolute budgets multiplied by ``factor``."""
        return QuadratureConfig(self.abs_tol * factor, self.rel_tol,
                                self.max_refinements, self.tail_eps * factor)


@dataclass(frozen=True)
class Bracket:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise BadBracket(f"empty bracket [{self.lo}, {self.hi}]")


@dataclass(frozen=True)
class SeriesConfig:
    term_tol: float = 1e-17
    max_terms: int = 20000

    def __post_init__(self):
        if self.max_terms < 8:
            raise ValueError("max_terms must be >= 8")
        if self.term_tol <= 0:
            raise ValueError("term_tol must be positive")


DEFAULT_QUAD = QuadratureConfig()
DEFAULT_SERIES = SeriesConfig()

_QUAD_OVERRIDE: contextvars.ContextVar = contextvars.ContextVar("quad_override", default=None)


def resolve_quad(cfg: QuadratureConfig) -> QuadratureConfig:
    """``cfg``, or the active override when ``cfg`` is the shared default."""
    if cfg is DEFAULT_QUAD:
        return _QUAD_OVERRIDE.get() or cfg
    return cfg


@contextlib.contextmanager
def quadrature_defaults(cfg: QuadratureConfig):
    """Within the block, calls that use DEFAULT_QUAD run with ``cfg`` instead."""
    token = _QUAD_OVERRIDE.set(cfg)
    try:
        yield cfg
    finally:
        _QUAD_OVERRIDE.reset(token)


# ---------------------------------------------------------------------------
# tanh-sinh rule

@lru_cache(maxsize=None)
def _ts_level(level: int) -> Tuple[np.ndarray, np.ndarray]:
    """New positive abscissae of a level as (endpoint gap fraction, weight)."""
    if level == 0:
        t = np.arange(1.0, _TS_TMAX + 0.5)
    else:
        h = 2.0 ** -level
        t = np.arange(h, _TS_TMAX, 2 * h)
    u = 0.5 * math.pi * np.sinh(t)
    # gap / (b - a) = (1 - tanh u) / 2, computed without cancellation
    gap = 1.0 / (1.0 + np.exp(2.0 * u))
    w = 0.5 * math.pi * np.cosh(t) / np.cosh(u) ** 2
    return gap, w


def _evaluate(f, x: np.ndarray, vectorized: bool) -> np.ndarray:
    if vectorized:
        y = np.asarray(f(x), dtype=float)
        if y.shape != x.shape:
            y = np.broadcast_to(y, x.shape)
    else:
        y = np.fromiter((f(float(v)) for v in x), dtype=float, count=x.size)
    return y


def _level_sum(f, a, b, level, vectorized):
    gap, w = _ts_level(level)
    d = (b - a) * gap
    right = b - d
    left = a + d
    keep_r = right < b
    keep_l = left > a
    x = np.concatenate((right[keep_r], left[keep_l]))
    ww = np.concatenate((w[keep_r], w[keep_l]))
    if x.size == 0:
        return 0.0
    y = _evaluate(f, x, vectorized)
    if not np.all(np.isfinite(y)):
        bad = x[~np.isfinite(y)][0]
        raise NonConvergence(f"integrand not finite at x={bad!r} on [{a}, {b}]")
    return float(np.dot(ww, y))


def integrate_finite_err(f: Callable, a: float, b: float,
                         cfg: QuadratureConfig = DEFAULT_QUAD,
                         vectorized: bool = False) -> Tuple[float, float]:
    """Like :func:`integrate_finite` but also returns the error estimate."""
    cfg = resolve_quad(cfg)
    if a == b:
        return 0.0, 0.0
    if a > b:
        v, e = integrate_finite_err(f, b, a, cfg, vectorized)
        return -v, e
    half = 0.5 * (b - a)
    mid = a + half
    s = 0.5 * math.pi * float(_evaluate(f, np.array([mid]), vectorized)[0])
    s += _level_sum(f, a, b, 0, vectorized)
    prev = half * s
    err = math.inf
    for level in range(1, cfg.max_refinements + 1):
        s += _level_sum(f, a, b, level, vectorized)
        cur = half * s * 2.0 ** -level
        err = abs(cur - prev)
        if level >= _TS_MIN_LEVEL and err <= max(cfg.abs_tol, cfg.rel_tol * abs(cur)):
            return cur, err
        prev = cur
    raise NonConvergence(
        f"tanh-sinh on [{a}, {b}] not converged after {cfg.max_refinements} "
        f"refinements (last change {err:.3e})")


def integrate_finite(f: Callable, a: float, b: float,
                     cfg: QuadratureConfig = DEFAULT_QUAD,
                     vectorized: bool = False) -> float:
    """
    Integrate ``f`` over ``[a, b]``.

    Parameters
    ----------
    f : callable
        Integrand. With ``vectorized=True`` it receives a 1-d ndarray of nodes.
    a, b : float
        Limits; ``a > b`` flips the sign. Integrable endpoint singularities
        of power type (milder than ``1/x``) are fine; ``f`` is never
        evaluated exactly at an endpoint.
    cfg : QuadratureConfig

    Raises
    ------
    NonConvergence
        If ``cfg.max_refinements`` levels do not meet
        ``max(abs_tol, rel_tol * |value|)``.
    """
    return integrate_finite_err(f, a, b, cfg, vectorized)[0]


def integrate_decaying(f: Callable, a: float, tail_bound: Callable[[float], float],
                       cfg: QuadratureConfig = DEFAULT_QUAD,
                       vectorized: bool = False, t_cap: float = 1e6) -> float:
    """
    Integrate ``f`` over ``[a, inf)`` by truncation at a certified point.

    ``tail_bound(T)`` must bound ``|int_T^inf f|`` and decrease to zero. The
    cut ``T`` is the first point of a doubling sequence with
    ``tail_bound(T) <= cfg.tail_eps``; the discarded tail is therefore inside
    the budget. ``[a, T]`` is split into panels of doubling width.
    """
    cfg = resolve_quad(cfg)
    step = 1.0
    T = a + step
    while tail_bound(T) > cfg.tail_eps:
        step *= 2.0
        T = a + step
        if step > t_cap:
            raise TailBoundViolated(
                f"tail bound stays above {cfg.tail_eps:g} up to T={T:g}")
    edges = [a]
    width = 1.0
    while edges[-1] + width < T:
        edges.append(edges[-1] + width)
        width *= 2.0
    edges.append(T)
    sub = cfg.scaled(1.0 / (len(edges) - 1))
    return math.fsum(integrate_finite(f, lo, hi, sub, vectorized)
                     for lo, hi in zip(edges[:-1], edges[1:]))


# ---------------------------------------------------------------------------
# inversion and differentiation

def invert_monotone(f: Callable[[float], float], target: float, b: Bracket,
                    tol: float = 1e-14) -> float:
    """
    Solve ``f(x) = target`` for ``x`` in ``[b.lo, b.hi]``.

    ``f`` must be continuous and strictly monotone on the bracket.

    Raises
    ------
    BadBracket
        If the target is not enclosed by ``f(b.lo)``, ``f(b.hi)``.
    """
    glo = f(b.lo) - target
    if glo == 0:
        return b.lo
    ghi = f(b.hi) - target
    if ghi == 0:
        return b.hi
    if (glo > 0) == (ghi > 0):
        raise BadBracket(
            f"target {target!r} not enclosed: f({b.lo})-target={glo:.3e}, "
            f"f({b.hi})-target={ghi:.3e}")
    return brentq(lambda x: f(x) - target, b.lo, b.hi, xtol=tol,
                  rtol=4 * EPS, maxiter=200)


def expand_bracket(f: Callable[[float], float], target: float,
                   lo: float, hi: float, lo_limit: float, hi_limit: float,
                   grow: float = 2.0) -> Optional[Bracket]:
    """
    Slide and widen ``[lo, hi]`` until it encloses ``f = target``.

    ``f`` must be monotone; meant for maps in a log variable. Returns ``None``
    when a limit is reached without enclosing the target.
    """
    flo, fhi = f(lo), f(hi)
    increasing = fhi >= flo
    width = hi - lo
    while not min(flo, fhi) <= target <= max(flo, fhi):
        go_low = (target < flo) if increasing else (target > flo)
        if go_low:
            if lo <= lo_limit:
                return None
            lo, hi, fhi = max(lo - width, lo_limit), lo, flo
            flo = f(lo)
        else:
            if hi >= hi_limit:
                return None
            lo, hi, flo = hi, min(hi + width, hi_limit), fhi
            fhi = f(hi)
        width *= grow
    return Bracket(lo, hi)


def derivative_central(f: Callable[[float], float], x: float, h: float) -> float:
    """Central difference ``(f(x+h) - f(x-h)) / (2h)``."""
    return (f(x + h) - f(x - h)) / (2.0 * h)
