"""Identity report record shared by every ``*_check`` function."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Dict


@dataclass
class IdentityReport:
    """
    Outcome of one numeric identity evaluation.

    ``passed`` is true exactly when ``min(abs_resid, rel_resid) <= tol``.
    ``kind`` is ``"identity"`` for relations expected to hold, or ``"probe"``
    for diagnostics that record which reading of a formula holds; probe
    failures are informative and do not count as regressions.
    """

    id: str
    inputs: Dict[str, float]
    lhs: float
    rhs: float
    abs_resid: float
    rel_resid: float
    tol: float
    passed: bool
    notes: str = ""
    kind: str = "identity"
    extra: Dict[str, float] = field(default_factory=dict)

    @classmethod
    def build(cls, id: str, inputs, lhs: float, rhs: float, tol: float,
              notes: str = "", kind: str = "identity", extra=None) -> "IdentityReport":
        lhs = float(lhs)
        rhs = float(rhs)
        abs_resid = abs(lhs - rhs)
        scale = max(abs(lhs), abs(rhs))
        rel_resid = abs_resid / scale if scale > 0 else 0.0
        if math.isnan(abs_resid):
            abs_resid = rel_resid = math.inf
        passed = min(abs_resid, rel_resid) <= tol
        return cls(id, {k: float(v) for k, v in dict(inputs).items()}, lhs, rhs,
                   abs_resid, rel_resid, float(tol), passed, notes, kind,
                   {k: float(v) for k, v in dict(extra or {}).items()})

    @classmethod
    def failure(cls, id: str, inputs, tol: float, notes: str,
                kind: str = "identity") -> "IdentityReport":
        """Report for a check whose evaluation chain could not be completed."""
        return cls(id, {k: float(v) for k, v in dict(inputs).items()}, math.nan,
                   math.nan, math.inf, math.inf, float(tol), False, notes, kind)

    @property
    def residual(self) -> float:
        return min(self.abs_resid, self.rel_resid)

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("lhs", "rhs", "abs_resid", "rel_resid"):
            if not math.isfinite(d[key]):
                d[key] = str(d[key])
        return d

    def line(self) -> str:
        flag = "PASS" if self.passed else ("NOTE" if self.kind == "probe" else "FAIL")
        args = ", ".join(f"{k}={v:.6g}" for k, v in self.inputs.items())
        return (f"[{flag}] {self.id}({args}) lhs={self.lhs:.15g} rhs={self.rhs:.15g} "
                f"resid={self.residual:.2e} tol={self.tol:.0e}")
