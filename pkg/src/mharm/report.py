"""Verification reports: one LHS/RHS comparison per record."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Any

REL_FLOOR = 1e-300
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one identity or inequality check.

    ``relation`` is ``"eq"`` for equalities and ``"le"`` for bounds
    ``lhs <= rhs``; for a bound ``rel_err`` measures only the excess of the
    left side over the right.  Round-trip checks use ``"err"``: ``lhs`` is a
    relative discrepancy the check already computed, ``rhs`` is 0, and
    ``rel_err`` equals ``lhs``.
    """

    check_name: str
    generator: str
    params: dict[str, Any]
    lhs: float
    rhs: float
    abs_err: float
    rel_err: float
    tolerance: float
    resolution: dict[str, Any]
    passed: bool
    relation: str = "eq"
    warnings: tuple[str, ...] = ()
    fatal: bool = False

    @classmethod
    def build(
        cls,
        check_name: str,
        lhs: float,
        rhs: float,
        tolerance: float,
        *,
        generator: str = "",
        params: dict | None = None,
        resolution: dict | None = None,
        relation: str = "eq",
        warnings=(),
        fatal: bool = False,
        floor: float = REL_FLOOR,
    ) -> VerificationReport:
        lhs, rhs = float(lhs), float(rhs)
        if relation == "eq":
            abs_err = abs(lhs - rhs)
        elif relation == "le":
            abs_err = max(0.0, lhs - rhs)
        elif relation == "err":
            abs_err = abs(lhs - rhs)
        else:
            raise ValueError(f"unknown relation {relation!r}")
        rel_err = abs_err if relation == "err" else abs_err / max(abs(rhs), floor)
        ok = math.isfinite(rel_err) and rel_err <= tolerance and not fatal
        return cls(
            check_name=check_name,
            generator=generator,
            params=dict(params or {}),
            lhs=lhs,
            rhs=rhs,
            abs_err=abs_err,
            rel_err=rel_err,
            tolerance=float(tolerance),
            resolution=dict(resolution or {}),
            passed=bool(ok),
            relation=relation,
            warnings=tuple(warnings),
            fatal=fatal,
        )

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["warnings"] = list(self.warnings)
        return d

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        op = {"eq": "=", "le": "<=", "err": "~"}[self.relation]
        return (
            f"[{flag}] {self.check_name} ({self.generator}) lhs={self.lhs:.12g} {op} rhs={self.rhs:.12g} "
            f"rel_err={self.rel_err:.3e} tol={self.tolerance:.1e}"
        )


def sort_key(r: VerificationReport):
    return (r.check_name, r.generator, repr(sorted(r.params.items())))
