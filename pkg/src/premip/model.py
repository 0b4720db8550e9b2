"""In-memory MIP representation.

The problem is  min c'x + offset,  lhs <= Ax <= rhs,  lb <= x <= ub,  with a
subset of integral columns.  The constraint matrix is stored twice: a
row-major view (dict col -> coeff per row) and a column-major view (dict
row -> coeff per column).  Both views are kept synchronized by every
mutation; deactivating a row or column removes its entries from the
opposite view immediately, so iteration never has to filter dead entries.

All mutations are funneled through ModelUpdate, which also maintains row
activities, lock counts, per-round modification flags, the change journal,
reduction counters and the postsolve record.  Presolvers never mutate.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from .numerics import INF, NEG_INF, Number, NumericContext, is_finite


class ColState(Enum):
    ACTIVE = "active"
    FIXED = "fixed"
    SUBSTITUTED = "substituted"
    INACTIVE = "inactive"


class InfeasibleError(Exception):
    """Raised when an applied change proves the problem primal infeasible."""


class UnboundedError(Exception):
    """Raised when a change proves the objective unbounded (if feasible)."""


# ---------------------------------------------------------------------------
# problem data


class Problem:
    def __init__(self, ctx: NumericContext, name: str = "problem"):
        self.ctx = ctx
        self.name = name
        self.obj: List[Number] = []
        self.obj_offset: Number = ctx.number(0)
        self.col_lower: List[Number] = []
        self.col_upper: List[Number] = []
        self.col_integral: List[bool] = []
        self.col_state: List[ColState] = []
        self.col_names: List[str] = []
        self.row_lhs: List[Number] = []
        self.row_rhs: List[Number] = []
        self.row_active: List[bool] = []
        self.row_names: List[str] = []
        self.rows: List[Dict[int, Number]] = []
        self.cols: List[Dict[int, Number]] = []
        self.nnz = 0

    # -- construction ------------------------------------------------------

    def add_col(self, lower: Number, upper: Number, obj: Number = 0,
                integral: bool = False, name: Optional[str] = None) -> int:
        j = len(self.col_lower)
        ctx = self.ctx
        self.col_lower.append(lower if not is_finite(lower) else ctx.number(lower))
        self.col_upper.append(upper if not is_finite(upper) else ctx.number(upper))
        self.obj.append(ctx.number(obj))
        self.col_integral.append(integral)
        self.col_state.append(ColState.ACTIVE)
        self.col_names.append(name if name is not None else f"C{j}")
        self.cols.append({})
        return j

    def add_row(self, entries: Dict[int, Number], lhs: Number = NEG_INF,
                rhs: Number = INF, name: Optional[str] = None) -> int:
        i = len(self.row_lhs)
        ctx = self.ctx
        self.row_lhs.append(lhs if not is_finite(lhs) else ctx.number(lhs))
        self.row_rhs.append(rhs if not is_finite(rhs) else ctx.number(rhs))
        self.row_active.append(True)
        self.row_names.append(name if name is not None else f"R{i}")
        row = {}
        for j, v in entries.items():
            v = ctx.number(v)
            if v == 0:
                continue
            row[j] = v
            self.cols[j][i] = v
            self.nnz += 1
        self.rows.append(row)
        return i

    # -- dimensions --------------------------------------------------------

    @property
    def ncols(self) -> int:
        return len(self.col_lower)

    @property
    def nrows(self) -> int:
        return len(self.row_lhs)

    def active_cols(self) -> List[int]:
        return [j for j in range(self.ncols) if self.col_state[j] is ColState.ACTIVE]

    def active_rows(self) -> List[int]:
        return [i for i in range(self.nrows) if self.row_active[i]]

    def col_is_active(self, j: int) -> bool:
        return self.col_state[j] is ColState.ACTIVE

    def row_is_active(self, i: int) -> bool:
        return self.row_active[i]

    # -- access ------------------------------------------------------------

    def row_entries(self, i: int) -> List[Tuple[int, Number]]:
        return sorted(self.rows[i].items())

    def col_entries(self, j: int) -> List[Tuple[int, Number]]:
        return sorted(self.cols[j].items())

    def entry(self, i: int, j: int) -> Number:
        return self.rows[i].get(j, self.ctx.number(0))

    def is_equation(self, i: int) -> bool:
        l, r = self.row_lhs[i], self.row_rhs[i]
        return is_finite(l) and is_finite(r) and self.ctx.approx_eq(l, r)

    def is_binary(self, j: int) -> bool:
        return (self.col_integral[j] and self.col_lower[j] == 0
                and self.col_upper[j] == 1)

    # -- integrity ---------------------------------------------------------

    def check_consistent(self) -> None:
        """Audit both matrix views; raises AssertionError on divergence."""
        row_triples = set()
        nnz = 0
        for i in range(self.nrows):
            if not self.row_active[i]:
                assert not self.rows[i], f"inactive row {i} keeps entries"
                continue
            for j, v in self.rows[i].items():
                assert v != 0, f"explicit zero at ({i},{j})"
                assert self.col_state[j] is ColState.ACTIVE, \
                    f"row {i} references dead column {j}"
                row_triples.add((i, j, v))
                nnz += 1
        col_triples = set()
        for j in range(self.ncols):
            if self.col_state[j] is not ColState.ACTIVE:
                assert not self.cols[j], f"dead column {j} keeps entries"
                continue
            for i, v in self.cols[j].items():
                assert self.row_active[i], f"column {j} references dead row {i}"
                col_triples.add((i, j, v))
        assert row_triples == col_triples, "row view and column view diverge"
        assert nnz == self.nnz, f"nnz counter {self.nnz} != actual {nnz}"

    def validate(self) -> List[str]:
        """Sanity warnings for freshly loaded problems."""
        warnings = []
        ctx = self.ctx
        for j in self.active_cols():
            lo, up = self.col_lower[j], self.col_upper[j]
            if lo > up:
                warnings.append(f"column {self.col_names[j]}: lower bound above upper")
            for v in (lo, up):
                if ctx.is_huge(v):
                    warnings.append(f"column {self.col_names[j]}: huge bound {v}")
        for i in self.active_rows():
            l, r = self.row_lhs[i], self.row_rhs[i]
            if l > r:
                warnings.append(f"row {self.row_names[i]}: lhs above rhs")
            for v in (l, r):
                if ctx.is_huge(v):
                    warnings.append(f"row {self.row_names[i]}: huge side {v}")
            for j, v in self.rows[i].items():
                if ctx.is_huge(v):
                    warnings.append(
                        f"row {self.row_names[i]}: huge coefficient on "
                        f"{self.col_names[j]}")
        return warnings

    def stable_hash(self) -> str:
        h = hashlib.sha256()
        ctx = self.ctx
        h.update(repr(ctx.mode).encode())
        h.update(ctx.format(self.obj_offset).encode())
        for j in range(self.ncols):
            h.update(b"|c")
            h.update(f"{j};{self.col_state[j].value};{self.col_integral[j]};"
                     f"{ctx.format(self.col_lower[j])};"
                     f"{ctx.format(self.col_upper[j])};"
                     f"{ctx.format(self.obj[j])}".encode())
        for i in range(self.nrows):
            h.update(b"|r")
            h.update(f"{i};{self.row_active[i]};"
                     f"{ctx.format(self.row_lhs[i])};"
                     f"{ctx.format(self.row_rhs[i])}".encode())
            for j, v in self.row_entries(i):
                h.update(f"({j}:{ctx.format(v)})".encode())
        return h.hexdigest()

    def copy(self) -> "Problem":
        p = Problem(self.ctx, self.name)
        p.obj = list(self.obj)
        p.obj_offset = self.obj_offset
        p.col_lower = list(self.col_lower)
        p.col_upper = list(self.col_upper)
        p.col_integral = list(self.col_integral)
        p.col_state = list(self.col_state)
        p.col_names = list(self.col_names)
        p.row_lhs = list(self.row_lhs)
        p.row_rhs = list(self.row_rhs)
        p.row_active = list(self.row_active)
        p.row_names = list(self.row_names)
        p.rows = [dict(r) for r in self.rows]
        p.cols = [dict(c) for c in self.cols]
        p.nnz = self.nnz
        return p


# ---------------------------------------------------------------------------
# row activities


def _min_contribution(a: Number, lo: Number, up: Number) -> Tuple[Number, bool]:
    """(finite part, is_infinite) of an entry's minimum-activity share."""
    if a > 0:
        return (a * lo, False) if is_finite(lo) else (0, True)
    return (a * up, False) if is_finite(up) else (0, True)


def _max_contribution(a: Number, lo: Number, up: Number) -> Tuple[Number, bool]:
    if a > 0:
        return (a * up, False) if is_finite(up) else (0, True)
    return (a * lo, False) if is_finite(lo) else (0, True)


class RowActivities:
    """Per-row minimum/maximum activity with infinite-contribution counters."""

    def __init__(self, nrows: int, ctx: NumericContext):
        zero = ctx.number(0)
        self.min_sum: List[Number] = [zero] * nrows
        self.max_sum: List[Number] = [zero] * nrows
        self.n_min_inf: List[int] = [0] * nrows
        self.n_max_inf: List[int] = [0] * nrows

    @staticmethod
    def compute(problem: Problem) -> "RowActivities":
        act = RowActivities(problem.nrows, problem.ctx)
        for i in problem.active_rows():
            for j, a in problem.rows[i].items():
                act.add_entry(i, a, problem.col_lower[j], problem.col_upper[j])
        return act

    def add_entry(self, i: int, a: Number, lo: Number, up: Number,
                  sign: int = 1) -> None:
        mval, minf = _min_contribution(a, lo, up)
        xval, xinf = _max_contribution(a, lo, up)
        if minf:
            self.n_min_inf[i] += sign
        else:
            self.min_sum[i] = self.min_sum[i] + sign * mval
        if xinf:
            self.n_max_inf[i] += sign
        else:
            self.max_sum[i] = self.max_sum[i] + sign * xval

    def remove_entry(self, i: int, a: Number, lo: Number, up: Number) -> None:
        self.add_entry(i, a, lo, up, sign=-1)

    def min_effective(self, i: int) -> Number:
        return NEG_INF if self.n_min_inf[i] > 0 else self.min_sum[i]

    def max_effective(self, i: int) -> Number:
        return INF if self.n_max_inf[i] > 0 else self.max_sum[i]

    def min_residual(self, i: int, a: Number, lo: Number, up: Number) -> Number:
        """Minimum activity of row i excluding one entry with coeff a."""
        val, inf = _min_contribution(a, lo, up)
        remaining = self.n_min_inf[i] - (1 if inf else 0)
        if remaining > 0:
            return NEG_INF
        return self.min_sum[i] - val

    def max_residual(self, i: int, a: Number, lo: Number, up: Number) -> Number:
        val, inf = _max_contribution(a, lo, up)
        remaining = self.n_max_inf[i] - (1 if inf else 0)
        if remaining > 0:
            return INF
        return self.max_sum[i] - val

    def snapshot(self, i: int) -> Tuple[Number, Number, int, int]:
        return (self.min_sum[i], self.max_sum[i],
                self.n_min_inf[i], self.n_max_inf[i])

    def restore(self, i: int, snap: Tuple[Number, Number, int, int]) -> None:
        self.min_sum[i], self.max_sum[i], self.n_min_inf[i], self.n_max_inf[i] = snap


# ---------------------------------------------------------------------------
# locks


class Locks:
    """Up-/down-lock counts: how many rows block moving a column up/down."""

    def __init__(self, ncols: int):
        self.up: List[int] = [0] * ncols
        self.down: List[int] = [0] * ncols

    @staticmethod
    def compute(problem: Problem) -> "Locks":
        locks = Locks(problem.ncols)
        for i in problem.active_rows():
            lfin = is_finite(problem.row_lhs[i])
            rfin = is_finite(problem.row_rhs[i])
            for j, a in problem.rows[i].items():
                locks.add_entry(j, a, lfin, rfin)
        return locks

    def add_entry(self, j: int, a: Number, lhs_finite: bool,
                  rhs_finite: bool, sign: int = 1) -> None:
        if a > 0:
            if rhs_finite:
                self.up[j] += sign
            if lhs_finite:
                self.down[j] += sign
        else:
            if lhs_finite:
                self.up[j] += sign
            if rhs_finite:
                self.down[j] += sign

    def remove_entry(self, j: int, a: Number, lhs_finite: bool,
                     rhs_finite: bool) -> None:
        self.add_entry(j, a, lhs_finite, rhs_finite, sign=-1)


# ---------------------------------------------------------------------------
# modification flags and journal

Setter = Tuple[int, str]  # (applied transaction index, presolver name)


class ModificationFlags:
    """First-writer markers for the three guarded aspects plus deactivation.

    Cleared at the start of every round (or before every presolver in the
    sequential apply-immediately mode); set only by the apply engine.
    """

    def __init__(self):
        self.row_coeffs: Dict[int, Setter] = {}
        self.row_bounds: Dict[int, Setter] = {}
        self.col_bounds: Dict[int, Setter] = {}
        self.col_coeffs: Dict[int, Setter] = {}
        self.row_gone: Dict[int, Setter] = {}
        self.col_gone: Dict[int, Setter] = {}

    def clear(self) -> None:
        self.row_coeffs.clear()
        self.row_bounds.clear()
        self.col_bounds.clear()
        self.col_coeffs.clear()
        self.row_gone.clear()
        self.col_gone.clear()

    @staticmethod
    def _mark(d: Dict[int, Setter], idx: int, setter: Setter) -> None:
        if idx not in d:
            d[idx] = setter


# ---------------------------------------------------------------------------
# postsolve record entries (applied-change log, replayable forward)


@dataclass
class FixEntry:
    kind = "fix"
    col: int
    value: Number


@dataclass
class BoundChangeEntry:
    kind = "bound"
    col: int
    side: str  # "lower" | "upper"
    old: Number
    new: Number


@dataclass
class SideChangeEntry:
    kind = "side"
    row: int
    side: str  # "lhs" | "rhs"
    old: Number
    new: Number


@dataclass
class CoeffChangeEntry:
    kind = "coeff"
    row: int
    col: int
    old: Number
    new: Number


@dataclass
class RedundantRowEntry:
    kind = "redundant_row"
    row: int


@dataclass
class SubstituteEntry:
    """x[col] was eliminated via the equation sum(coeffs) == rhs."""
    kind = "substitute"
    col: int
    row: int  # -1 for implied aggregations without a physical row
    coeffs: List[Tuple[int, Number]]
    rhs: Number
    lb: Number
    ub: Number


@dataclass
class FreeSingletonEntry:
    """Zero-cost continuous singleton relaxed out of its only row."""
    kind = "free_singleton"
    col: int
    row: int
    coeff: Number
    rest: List[Tuple[int, Number]]
    lhs: Number
    rhs: Number
    lb: Number
    ub: Number


@dataclass
class AggregateEntry:
    """Columns kept/gone merged into slot `kept`: y = x_kept + scale*x_gone."""
    kind = "aggregate"
    kept: int
    gone: int
    scale: Number
    kept_lb: Number
    kept_ub: Number
    gone_lb: Number
    gone_ub: Number


@dataclass
class ImplyIntegralEntry:
    kind = "imply_integral"
    col: int


RecordEntry = object  # any of the dataclasses above


# ---------------------------------------------------------------------------
# the mutation funnel


class ModelUpdate:
    """Owns the problem plus all derived state during a presolve run.

    Every change goes through one of the methods below, which keep the
    matrix views, activities, locks, flags, journal, counters and the
    postsolve record consistent.  Methods return True when they changed
    anything.
    """

    def __init__(self, problem: Problem, stats=None,
                 record: Optional[List[RecordEntry]] = None):
        self.problem = problem
        self.ctx = problem.ctx
        self.activities = RowActivities.compute(problem)
        self.locks = Locks.compute(problem)
        self.flags = ModificationFlags()
        self.journal: List[Tuple[str, int]] = []
        self.stats = stats
        self.record = record if record is not None else []
        self._pending_side_checks: set = set()

    # -- journal / flags helpers -------------------------------------------

    def _touch_row(self, i: int) -> None:
        self.journal.append(("row", i))

    def _touch_col(self, j: int) -> None:
        self.journal.append(("col", j))

    def _stat(self, field_name: str, amount: int = 1) -> None:
        if self.stats is not None:
            setattr(self.stats, field_name,
                    getattr(self.stats, field_name) + amount)

    # -- low-level entry ops (activities + locks + views) -------------------

    def _remove_entry(self, i: int, j: int) -> None:
        p = self.problem
        a = p.rows[i].pop(j)
        del p.cols[j][i]
        p.nnz -= 1
        self.activities.remove_entry(i, a, p.col_lower[j], p.col_upper[j])
        self.locks.remove_entry(j, a, is_finite(p.row_lhs[i]),
                                is_finite(p.row_rhs[i]))

    def _put_entry(self, i: int, j: int, v: Number) -> None:
        p = self.problem
        old = p.rows[i].get(j)
        lfin, rfin = is_finite(p.row_lhs[i]), is_finite(p.row_rhs[i])
        if old is not None:
            self.activities.remove_entry(i, old, p.col_lower[j], p.col_upper[j])
            self.locks.remove_entry(j, old, lfin, rfin)
        else:
            p.nnz += 1
        p.rows[i][j] = v
        p.cols[j][i] = v
        self.activities.add_entry(i, v, p.col_lower[j], p.col_upper[j])
        self.locks.add_entry(j, v, lfin, rfin)

    def _set_side_raw(self, i: int, side: str, v: Number, setter: Setter,
                      count: bool = True, record: bool = True,
                      check: bool = True) -> bool:
        p = self.problem
        old = p.row_lhs[i] if side == "lhs" else p.row_rhs[i]
        if old == v:
            return False
        was_finite = is_finite(old)
        now_finite = is_finite(v)
        if was_finite != now_finite:
            # lock structure of every entry in the row changes
            lfin, rfin = is_finite(p.row_lhs[i]), is_finite(p.row_rhs[i])
            for j, a in p.rows[i].items():
                self.locks.remove_entry(j, a, lfin, rfin)
        if side == "lhs":
            p.row_lhs[i] = v
        else:
            p.row_rhs[i] = v
        if was_finite != now_finite:
            lfin, rfin = is_finite(p.row_lhs[i]), is_finite(p.row_rhs[i])
            for j, a in p.rows[i].items():
                self.locks.add_entry(j, a, lfin, rfin)
        if check:
            # deferred: two side steps of one transaction may cross
            # transiently, so the check runs when the transaction completes
            self._pending_side_checks.add(i)
        self.flags._mark(self.flags.row_bounds, i, setter)
        self._touch_row(i)
        if count:
            self._stat("side_changes")
        if record:
            self.record.append(SideChangeEntry(i, side, old, v))
        return True

    def _check_sides(self, i: int) -> None:
        p = self.problem
        if p.row_lhs[i] > p.row_rhs[i] and not self.ctx.feas_leq(
                p.row_lhs[i], p.row_rhs[i]):
            raise InfeasibleError(
                f"row {p.row_names[i]}: sides cross after update")

    def flush_side_checks(self) -> None:
        pending = sorted(self._pending_side_checks)
        self._pending_side_checks.clear()
        for i in pending:
            if self.problem.row_is_active(i):
                self._check_sides(i)

    def _set_col_bound_raw(self, j: int, side: str, v: Number, setter: Setter,
                           count: bool = True, record: bool = True) -> bool:
        """Unchecked bound replacement (may relax); updates activities."""
        p = self.problem
        old = p.col_lower[j] if side == "lower" else p.col_upper[j]
        if old == v:
            return False
        for i, a in p.cols[j].items():
            self.activities.remove_entry(i, a, p.col_lower[j], p.col_upper[j])
        if side == "lower":
            p.col_lower[j] = v
        else:
            p.col_upper[j] = v
        for i, a in p.cols[j].items():
            self.activities.add_entry(i, a, p.col_lower[j], p.col_upper[j])
            self._touch_row(i)
        self.flags._mark(self.flags.col_bounds, j, setter)
        self._touch_col(j)
        if count:
            self._stat("bound_changes")
        if record:
            self.record.append(BoundChangeEntry(j, side, old, v))
        return True

    def _check_empty_row(self, i: int) -> None:
        p = self.problem
        if p.row_active[i] and not p.rows[i]:
            zero = self.ctx.number(0)
            if not (self.ctx.feas_leq(p.row_lhs[i], zero)
                    and self.ctx.feas_leq(zero, p.row_rhs[i])):
                raise InfeasibleError(
                    f"row {p.row_names[i]} became empty with violated sides")

    # -- public change operations -------------------------------------------

    def change_lower(self, j: int, v: Number, setter: Setter) -> bool:
        p = self.problem
        old = p.col_lower[j]
        if v <= old:
            return False
        if not self.ctx.feas_leq(v, p.col_upper[j]):
            raise InfeasibleError(
                f"column {p.col_names[j]}: new lower bound crosses upper")
        v = min(v, p.col_upper[j])
        return self._set_col_bound_raw(j, "lower", v, setter)

    def change_upper(self, j: int, v: Number, setter: Setter) -> bool:
        p = self.problem
        old = p.col_upper[j]
        if v >= old:
            return False
        if not self.ctx.feas_leq(p.col_lower[j], v):
            raise InfeasibleError(
                f"column {p.col_names[j]}: new upper bound crosses lower")
        v = max(v, p.col_lower[j])
        return self._set_col_bound_raw(j, "upper", v, setter)

    def change_lhs(self, i: int, v: Number, setter: Setter) -> bool:
        return self._set_side_raw(i, "lhs", v, setter)

    def change_rhs(self, i: int, v: Number, setter: Setter) -> bool:
        return self._set_side_raw(i, "rhs", v, setter)

    def change_coeff(self, i: int, j: int, v: Number, setter: Setter) -> bool:
        p = self.problem
        old = p.rows[i].get(j, self.ctx.number(0))
        if old == v:
            return False
        if self.ctx.eq_zero(v):
            if j not in p.rows[i]:
                return False
            self._remove_entry(i, j)
        else:
            self._put_entry(i, j, v)
        self.flags._mark(self.flags.row_coeffs, i, setter)
        self.flags._mark(self.flags.col_coeffs, j, setter)
        self._touch_row(i)
        self._touch_col(j)
        self._stat("coeff_changes")
        self.record.append(CoeffChangeEntry(i, j, old, p.rows[i].get(j, 0)))
        self._check_empty_row(i)
        return True

    def fix_column(self, j: int, v: Number, setter: Setter) -> bool:
        p = self.problem
        ctx = self.ctx
        if not (ctx.feas_leq(p.col_lower[j], v)
                and ctx.feas_leq(v, p.col_upper[j])):
            raise InfeasibleError(
                f"column {p.col_names[j]}: fixing value outside bounds")
        touched = []
        for i, a in sorted(p.cols[j].items()):
            touched.append((i, a))
        for i, a in touched:
            self._remove_entry(i, j)
            if is_finite(p.row_lhs[i]):
                self._set_side_raw(i, "lhs", p.row_lhs[i] - a * v, setter,
                                   count=False, record=False, check=False)
            if is_finite(p.row_rhs[i]):
                self._set_side_raw(i, "rhs", p.row_rhs[i] - a * v, setter,
                                   count=False, record=False, check=False)
            self._check_sides(i)
            self.flags._mark(self.flags.row_coeffs, i, setter)
            self._touch_row(i)
        p.obj_offset = p.obj_offset + p.obj[j] * v
        p.col_state[j] = ColState.FIXED
        p.col_lower[j] = v
        p.col_upper[j] = v
        self.flags._mark(self.flags.col_bounds, j, setter)
        self.flags._mark(self.flags.col_coeffs, j, setter)
        self.flags._mark(self.flags.col_gone, j, setter)
        self._touch_col(j)
        self._stat("deleted_cols")
        self.record.append(FixEntry(j, v))
        for i, _ in touched:
            self._check_empty_row(i)
        return True

    def mark_row_redundant(self, i: int, setter: Setter) -> bool:
        p = self.problem
        lfin, rfin = is_finite(p.row_lhs[i]), is_finite(p.row_rhs[i])
        for j, a in sorted(p.rows[i].items()):
            del p.cols[j][i]
            self.locks.remove_entry(j, a, lfin, rfin)
            p.nnz -= 1
            self.flags._mark(self.flags.col_coeffs, j, setter)
            self._touch_col(j)
        p.rows[i].clear()
        p.row_active[i] = False
        self.flags._mark(self.flags.row_coeffs, i, setter)
        self.flags._mark(self.flags.row_bounds, i, setter)
        self.flags._mark(self.flags.row_gone, i, setter)
        self._touch_row(i)
        self._stat("deleted_rows")
        self.record.append(RedundantRowEntry(i))
        return True

    def predict_substitution_fill(self, j: int, i: int) -> int:
        """Net nnz change of eliminating column j via equation row i."""
        p = self.problem
        ctx = self.ctx
        piv = p.rows[i][j]
        eq_cols = [k for k in p.rows[i] if k != j]
        delta = 0
        for r, arj in p.cols[j].items():
            if r == i:
                continue
            factor = arj / piv
            delta -= 1  # column j leaves row r
            for k in eq_cols:
                old = p.rows[r].get(k)
                new = (old if old is not None else 0) - factor * p.rows[i][k]
                if old is None:
                    if not ctx.eq_zero(new):
                        delta += 1
                elif ctx.eq_zero(new):
                    delta -= 1
        delta -= 1  # column j leaves row i
        return delta

    def predict_pair_fill(self, j: int, k: int, beta: Number) -> int:
        """Net nnz change of substituting x_j := alpha + beta*x_k."""
        p = self.problem
        ctx = self.ctx
        delta = 0
        for r, arj in p.cols[j].items():
            delta -= 1
            old = p.rows[r].get(k)
            new = (old if old is not None else 0) + beta * arj
            if old is None:
                if not ctx.eq_zero(new):
                    delta += 1
            elif ctx.eq_zero(new):
                delta -= 1
        return delta

    def substitute_column(self, j: int, i: int, setter: Setter) -> bool:
        """Eliminate column j everywhere using active equation row i."""
        p = self.problem
        ctx = self.ctx
        piv = p.rows[i][j]
        b = p.row_lhs[i]
        row_snapshot = p.row_entries(i)
        lo, up = p.col_lower[j], p.col_upper[j]
        self.record.append(SubstituteEntry(j, i, row_snapshot, b, lo, up))
        eq_entries = [(k, v) for k, v in row_snapshot if k != j]
        # rewrite every other row containing j
        for r in sorted(k for k in p.cols[j] if k != i):
            arj = p.rows[r][j]
            factor = arj / piv
            self._remove_entry(r, j)
            for k, aik in eq_entries:
                new = p.rows[r].get(k, ctx.number(0)) - factor * aik
                if ctx.eq_zero(new):
                    if k in p.rows[r]:
                        self._remove_entry(r, k)
                else:
                    self._put_entry(r, k, new)
                self.flags._mark(self.flags.col_coeffs, k, setter)
                self._touch_col(k)
                self._stat("coeff_changes")
            shift = factor * b
            if is_finite(p.row_lhs[r]):
                self._set_side_raw(r, "lhs", p.row_lhs[r] - shift, setter,
                                   count=False, record=False, check=False)
            if is_finite(p.row_rhs[r]):
                self._set_side_raw(r, "rhs", p.row_rhs[r] - shift, setter,
                                   count=False, record=False, check=False)
            self._check_sides(r)
            self.flags._mark(self.flags.row_coeffs, r, setter)
            self._touch_row(r)
            self._check_empty_row(r)
        # objective
        cj = p.obj[j]
        if cj != 0:
            p.obj_offset = p.obj_offset + cj * b / piv
            for k, aik in eq_entries:
                p.obj[k] = p.obj[k] - cj * aik / piv
            p.obj[j] = ctx.number(0)
        # the defining row now carries the bounds of the eliminated column
        self._remove_entry(i, j)
        self.flags._mark(self.flags.row_coeffs, i, setter)
        if piv > 0:
            new_lhs = b - piv * up if is_finite(up) else NEG_INF
            new_rhs = b - piv * lo if is_finite(lo) else INF
        else:
            new_lhs = b - piv * lo if is_finite(lo) else NEG_INF
            new_rhs = b - piv * up if is_finite(up) else INF
        self._set_side_raw(i, "lhs", new_lhs, setter, count=False,
                           record=False, check=False)
        self._set_side_raw(i, "rhs", new_rhs, setter, count=False,
                           record=False, check=False)
        self._check_sides(i)
        p.col_state[j] = ColState.SUBSTITUTED
        p.cols[j].clear()
        self.flags._mark(self.flags.col_bounds, j, setter)
        self.flags._mark(self.flags.col_coeffs, j, setter)
        self.flags._mark(self.flags.col_gone, j, setter)
        self._touch_col(j)
        self._touch_row(i)
        self._stat("deleted_cols")
        if not is_finite(new_lhs) and not is_finite(new_rhs):
            self.mark_row_redundant(i, setter)
        else:
            self._check_empty_row(i)
        return True

    def substitute_pair(self, j: int, k: int, alpha: Number, beta: Number,
                        setter: Setter) -> bool:
        """Replace x_j by alpha + beta*x_k everywhere (implied aggregation)."""
        p = self.problem
        ctx = self.ctx
        lo, up = p.col_lower[j], p.col_upper[j]
        self.record.append(SubstituteEntry(
            j, -1, [(j, ctx.number(1)), (k, -beta)], alpha, lo, up))
        for r in sorted(p.cols[j]):
            arj = p.rows[r][j]
            self._remove_entry(r, j)
            new = p.rows[r].get(k, ctx.number(0)) + beta * arj
            if ctx.eq_zero(new):
                if k in p.rows[r]:
                    self._remove_entry(r, k)
            else:
                self._put_entry(r, k, new)
            self._stat("coeff_changes")
            shift = arj * alpha
            if is_finite(p.row_lhs[r]):
                self._set_side_raw(r, "lhs", p.row_lhs[r] - shift, setter,
                                   count=False, record=False, check=False)
            if is_finite(p.row_rhs[r]):
                self._set_side_raw(r, "rhs", p.row_rhs[r] - shift, setter,
                                   count=False, record=False, check=False)
            self._check_sides(r)
            self.flags._mark(self.flags.row_coeffs, r, setter)
            self._touch_row(r)
            self._check_empty_row(r)
        cj = p.obj[j]
        if cj != 0:
            p.obj_offset = p.obj_offset + cj * alpha
            p.obj[k] = p.obj[k] + beta * cj
            p.obj[j] = ctx.number(0)
        # bounds of x_j imply bounds on x_k
        if beta > 0:
            imp_lo = (lo - alpha) / beta if is_finite(lo) else NEG_INF
            imp_up = (up - alpha) / beta if is_finite(up) else INF
        else:
            imp_lo = (up - alpha) / beta if is_finite(up) else NEG_INF
            imp_up = (lo - alpha) / beta if is_finite(lo) else INF
        if p.col_integral[k]:
            imp_lo = ctx.round_up_bound(imp_lo)
            imp_up = ctx.round_down_bound(imp_up)
        if is_finite(imp_lo):
            self.change_lower(k, imp_lo, setter)
        if is_finite(imp_up):
            self.change_upper(k, imp_up, setter)
        p.col_state[j] = ColState.SUBSTITUTED
        p.cols[j].clear()
        self.flags._mark(self.flags.col_bounds, j, setter)
        self.flags._mark(self.flags.col_coeffs, j, setter)
        self.flags._mark(self.flags.col_gone, j, setter)
        # the receiving column's role changed even if its bounds did not
        self.flags._mark(self.flags.col_bounds, k, setter)
        self.flags._mark(self.flags.col_coeffs, k, setter)
        self._touch_col(j)
        self._touch_col(k)
        self._stat("deleted_cols")
        return True

    def delete_free_singleton(self, j: int, i: int, setter: Setter) -> bool:
        """Project a zero-cost continuous singleton out of its only row."""
        p = self.problem
        a = p.rows[i][j]
        lo, up = p.col_lower[j], p.col_upper[j]
        lhs, rhs = p.row_lhs[i], p.row_rhs[i]
        rest = [(k, v) for k, v in p.row_entries(i) if k != j]
        self.record.append(FreeSingletonEntry(j, i, a, rest, lhs, rhs, lo, up))
        self._remove_entry(i, j)
        if a > 0:
            new_rhs = rhs - a * lo if (is_finite(rhs) and is_finite(lo)) else INF
            new_lhs = lhs - a * up if (is_finite(lhs) and is_finite(up)) else NEG_INF
        else:
            new_rhs = rhs - a * up if (is_finite(rhs) and is_finite(up)) else INF
            new_lhs = lhs - a * lo if (is_finite(lhs) and is_finite(lo)) else NEG_INF
        self._set_side_raw(i, "lhs", new_lhs, setter, count=False,
                           record=False, check=False)
        self._set_side_raw(i, "rhs", new_rhs, setter, count=False,
                           record=False, check=False)
        self._check_sides(i)
        self.flags._mark(self.flags.row_coeffs, i, setter)
        self.flags._mark(self.flags.row_bounds, i, setter)
        p.col_state[j] = ColState.INACTIVE
        self.flags._mark(self.flags.col_bounds, j, setter)
        self.flags._mark(self.flags.col_coeffs, j, setter)
        self.flags._mark(self.flags.col_gone, j, setter)
        self._touch_row(i)
        self._touch_col(j)
        self._stat("deleted_cols")
        if not is_finite(new_lhs) and not is_finite(new_rhs):
            self.mark_row_redundant(i, setter)
        else:
            self._check_empty_row(i)
        return True

    def aggregate_parallel_cols(self, gone: int, kept: int, scale: Number,
                                setter: Setter) -> bool:
        """Merge column `gone` = scale * column `kept` into slot `kept`."""
        p = self.problem
        lo_k, up_k = p.col_lower[kept], p.col_upper[kept]
        lo_g, up_g = p.col_lower[gone], p.col_upper[gone]
        self.record.append(AggregateEntry(kept, gone, scale,
                                          lo_k, up_k, lo_g, up_g))
        for r in sorted(p.cols[gone]):
            self._remove_entry(r, gone)
            self.flags._mark(self.flags.row_coeffs, r, setter)
            self._touch_row(r)
        p.obj[gone] = self.ctx.number(0)
        # merged bounds: y = x_kept + scale * x_gone
        if scale > 0:
            new_lo = lo_k + scale * lo_g if (is_finite(lo_k) and is_finite(lo_g)) else NEG_INF
            new_up = up_k + scale * up_g if (is_finite(up_k) and is_finite(up_g)) else INF
        else:
            new_lo = lo_k + scale * up_g if (is_finite(lo_k) and is_finite(up_g)) else NEG_INF
            new_up = up_k + scale * lo_g if (is_finite(up_k) and is_finite(lo_g)) else INF
        self._set_col_bound_raw(kept, "lower", new_lo, setter, count=False,
                                record=False)
        self._set_col_bound_raw(kept, "upper", new_up, setter, count=False,
                                record=False)
        p.col_state[gone] = ColState.SUBSTITUTED
        self.flags._mark(self.flags.col_bounds, gone, setter)
        self.flags._mark(self.flags.col_coeffs, gone, setter)
        self.flags._mark(self.flags.col_gone, gone, setter)
        self.flags._mark(self.flags.col_bounds, kept, setter)
        self.flags._mark(self.flags.col_coeffs, kept, setter)
        self._touch_col(gone)
        self._touch_col(kept)
        self._stat("deleted_cols")
        return True

    def imply_integral(self, j: int, setter: Setter) -> bool:
        p = self.problem
        ctx = self.ctx
        if p.col_integral[j]:
            return False
        p.col_integral[j] = True
        self.record.append(ImplyIntegralEntry(j))
        lo = ctx.round_up_bound(p.col_lower[j])
        up = ctx.round_down_bound(p.col_upper[j])
        if is_finite(lo) and is_finite(up) and lo > up:
            raise InfeasibleError(
                f"column {p.col_names[j]}: integral rounding empties domain")
        if is_finite(lo) and lo > p.col_lower[j]:
            self._set_col_bound_raw(j, "lower", lo, setter)
        if is_finite(up) and up < p.col_upper[j]:
            self._set_col_bound_raw(j, "upper", up, setter)
        self._touch_col(j)
        return True
