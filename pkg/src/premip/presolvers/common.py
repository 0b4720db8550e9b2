"""Shared presolver infrastructure: tiers, descriptors, read-only view."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Callable, List, Optional, Set, Tuple

from ..model import Locks, Problem, RowActivities
from ..numerics import (INF, NEG_INF, Mode, Number, NumericContext,
                        is_finite, rational_gcd)
from ..transactions import Transaction


class Tier(Enum):
    FAST = "fast"
    MEDIUM = "medium"
    EXHAUSTIVE = "exhaustive"


@dataclass(frozen=True)
class PresolverDescriptor:
    name: str
    tier: Tier
    apply_order: int
    delayed: bool = False
    internal_parallel: bool = False

    def __post_init__(self):
        if self.delayed and self.tier is not Tier.EXHAUSTIVE:
            raise ValueError("only exhaustive presolvers can be delayed")


@dataclass
class PresolveView:
    """Read-only handles a presolver works against.

    changed_rows/changed_cols are None on the first call (everything is
    new); afterwards they contain the indices touched since this
    presolver's previous call.
    """
    problem: Problem
    activities: RowActivities
    locks: Locks
    changed_rows: Optional[Set[int]] = None
    changed_cols: Optional[Set[int]] = None
    workers: int = 1
    parallel_enabled: bool = True

    @property
    def ctx(self) -> NumericContext:
        return self.problem.ctx

    def scan_rows(self) -> List[int]:
        """Active rows restricted to the changed set (all on first call)."""
        p = self.problem
        if self.changed_rows is None and self.changed_cols is None:
            return p.active_rows()
        rows = set(self.changed_rows or ())
        for j in (self.changed_cols or ()):
            if p.col_state[j].value == "active":
                rows.update(p.cols[j].keys())
        return sorted(i for i in rows if i < p.nrows and p.row_is_active(i))

    def scan_cols(self) -> List[int]:
        p = self.problem
        if self.changed_rows is None and self.changed_cols is None:
            return p.active_cols()
        cols = set(self.changed_cols or ())
        for i in (self.changed_rows or ()):
            if i < p.nrows and p.row_is_active(i):
                cols.update(p.rows[i].keys())
        return sorted(j for j in cols if j < p.ncols and p.col_is_active(j))

    def is_fresh(self) -> bool:
        return self.changed_rows is None and self.changed_cols is None


RunFn = Callable[[PresolveView], List[Transaction]]


# ---------------------------------------------------------------------------
# helpers shared by several presolvers


def integral_coeffs(ctx: NumericContext,
                    entries: List[Tuple[int, Number]]) -> Optional[List[Tuple[int, Number]]]:
    """Snap coefficients to integers; None if any is non-integral."""
    out = []
    for j, a in entries:
        if isinstance(a, Fraction):
            if a.denominator != 1:
                return None
            out.append((j, a))
        else:
            if not ctx.is_integral(a):
                return None
            out.append((j, ctx.round(a)))
    return out


def coeff_gcd(ctx: NumericContext, values: List[Number]) -> Number:
    """gcd of coefficient magnitudes; exact for rationals, snapped floats."""
    if ctx.mode is Mode.RATIONAL:
        g = Fraction(0)
        for v in values:
            g = rational_gcd(g, Fraction(v))
        return g
    g = 0
    for v in values:
        g = math.gcd(g, abs(int(round(v))))
    return float(g)


def implied_bound_from_row(view: PresolveView, i: int, j: int, a: Number
                           ) -> Tuple[Number, Number]:
    """(lower, upper) bound on column j implied by row i alone."""
    p = view.problem
    lo, up = NEG_INF, INF
    cl, cu = p.col_lower[j], p.col_upper[j]
    rhs, lhs = p.row_rhs[i], p.row_lhs[i]
    if is_finite(rhs):
        res = view.activities.min_residual(i, a, cl, cu)
        if is_finite(res):
            cap = (rhs - res) / a
            if a > 0:
                up = cap
            else:
                lo = cap
    if is_finite(lhs):
        res = view.activities.max_residual(i, a, cl, cu)
        if is_finite(res):
            cap = (lhs - res) / a
            if a > 0:
                lo = cap
            else:
                up = cap
    return lo, up
