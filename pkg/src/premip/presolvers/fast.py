"""Fast presolvers: scan only rows/columns changed since their last call."""
from __future__ import annotations

from typing import List

from ..model import InfeasibleError
from ..numerics import (is_finite, bound_improves_lower,
                        bound_improves_upper)
from ..transactions import (ReductionStep, StepKind, Transaction, assert_row,
                            assert_row_bounds, assert_col_bounds)
from .common import PresolveView, coeff_gcd, integral_coeffs


def run_colsingleton(view: PresolveView) -> List[Transaction]:
    """Remove continuous columns that appear in exactly one constraint."""
    p = view.problem
    ctx = view.ctx
    txs: List[Transaction] = []
    for j in view.scan_cols():
        if len(p.cols[j]) != 1 or p.col_integral[j]:
            continue
        (i, a), = p.cols[j].items()
        row_max = max(abs(v) for v in p.rows[i].values())
        if abs(a) < ctx.markowitz_threshold * row_max or a == 0:
            continue
        asserts = [assert_col_bounds(j), assert_row(i), assert_row_bounds(i)]
        if p.is_equation(i):
            txs.append(Transaction("colsingleton", asserts + [
                ReductionStep(StepKind.SUBSTITUTE_IN_OBJECTIVE, row=i, col=j)]))
        elif p.obj[j] == 0:
            txs.append(Transaction("colsingleton", asserts + [
                ReductionStep(StepKind.DELETE_COLUMN, row=i, col=j)]))
        # singletons with cost in inequalities are left to Stuffing/DualFix
    return txs


def run_coefftightening(view: PresolveView) -> List[Transaction]:
    """Shrink coefficients of integral columns in single-sided rows, then
    normalize all-integral rows by their gcd."""
    p = view.problem
    ctx = view.ctx
    act = view.activities
    txs: List[Transaction] = []
    for i in view.scan_rows():
        lhs, rhs = p.row_lhs[i], p.row_rhs[i]
        if is_finite(lhs) == is_finite(rhs):
            continue  # only rows with exactly one finite side
        sense = 1 if is_finite(rhs) else -1
        side = rhs if sense > 0 else -lhs
        maxact = act.max_effective(i) if sense > 0 else -act.min_effective(i)
        if not is_finite(maxact):
            continue
        coeffs = {j: sense * a for j, a in p.rows[i].items()}
        steps: List[ReductionStep] = []
        changed = True
        guard = 0
        while changed and guard < 2 * len(coeffs):
            changed = False
            guard += 1
            for j in sorted(coeffs):
                if not p.col_integral[j]:
                    continue
                lo, up = p.col_lower[j], p.col_upper[j]
                if not (is_finite(lo) and is_finite(up)) or lo == up:
                    continue
                a = coeffs[j]
                mag = abs(a)
                if not (maxact > side and not ctx.approx_eq(maxact, side)):
                    break
                if not ctx.feas_leq(maxact - mag * (up - lo), side):
                    continue
                new_mag = maxact - side
                if not new_mag < mag or ctx.approx_eq(new_mag, mag):
                    continue
                if a > 0:
                    new_a = new_mag
                    ref = up
                else:
                    new_a = -new_mag
                    ref = lo
                new_side = side - (a - new_a) * ref
                maxact = maxact - (a - new_a) * ref
                side = new_side
                coeffs[j] = new_a
                steps.append(ReductionStep(StepKind.CHANGE_COEFF, row=i,
                                           col=j, value=sense * new_a))
                if sense > 0:
                    steps.append(ReductionStep(StepKind.CHANGE_RHS, row=i,
                                               value=side))
                else:
                    steps.append(ReductionStep(StepKind.CHANGE_LHS, row=i,
                                               value=-side))
                changed = True
        # gcd normalization of all-integral rows
        if all(p.col_integral[j] for j in coeffs):
            as_ints = integral_coeffs(ctx, sorted(coeffs.items()))
            if as_ints is not None and len(as_ints) > 0:
                g = coeff_gcd(ctx, [v for _, v in as_ints])
                if g != 0 and g != 1:
                    new_side = ctx.floor(side / g)
                    for j, v in as_ints:
                        steps.append(ReductionStep(
                            StepKind.CHANGE_COEFF, row=i, col=j,
                            value=sense * (v / g)))
                    if sense > 0:
                        steps.append(ReductionStep(StepKind.CHANGE_RHS,
                                                   row=i, value=new_side))
                    else:
                        steps.append(ReductionStep(StepKind.CHANGE_LHS,
                                                   row=i, value=-new_side))
        if steps:
            txs.append(Transaction("coefftightening",
                                   [assert_row(i), assert_row_bounds(i)]
                                   + steps))
    return txs


def run_propagation(view: PresolveView) -> List[Transaction]:
    """Activity-based bound tightening plus redundant-row detection."""
    p = view.problem
    ctx = view.ctx
    act = view.activities
    txs: List[Transaction] = []
    for i in view.scan_rows():
        lhs, rhs = p.row_lhs[i], p.row_rhs[i]
        entries = p.row_entries(i)
        if not entries:
            continue
        min_eff, max_eff = act.min_effective(i), act.max_effective(i)
        if is_finite(rhs) and not ctx.feas_leq(min_eff, rhs):
            raise InfeasibleError(
                f"row {p.row_names[i]}: minimum activity exceeds rhs")
        if is_finite(lhs) and not ctx.feas_leq(lhs, max_eff):
            raise InfeasibleError(
                f"row {p.row_names[i]}: maximum activity below lhs")
        if ctx.feas_leq(max_eff, rhs) and ctx.feas_leq(lhs, min_eff):
            txs.append(Transaction("propagation", [
                assert_row(i), assert_row_bounds(i),
                ReductionStep(StepKind.MARK_ROW_REDUNDANT, row=i)]))
            continue
        for j, a in entries:
            lo, up = p.col_lower[j], p.col_upper[j]
            integral = p.col_integral[j]
            if is_finite(rhs):
                res = act.min_residual(i, a, lo, up)
                if is_finite(res):
                    cap = (rhs - res) / a
                    if a > 0:
                        cand = ctx.round_down_bound(cap) if integral else cap
                        if bound_improves_upper(ctx, up, cand, integral):
                            txs.append(Transaction("propagation", [
                                ReductionStep(StepKind.CHANGE_UPPER, col=j,
                                              value=cand)]))
                    else:
                        cand = ctx.round_up_bound(cap) if integral else cap
                        if bound_improves_lower(ctx, lo, cand, integral):
                            txs.append(Transaction("propagation", [
                                ReductionStep(StepKind.CHANGE_LOWER, col=j,
                                              value=cand)]))
            if is_finite(lhs):
                res = act.max_residual(i, a, lo, up)
                if is_finite(res):
                    cap = (lhs - res) / a
                    if a > 0:
                        cand = ctx.round_up_bound(cap) if integral else cap
                        if bound_improves_lower(ctx, lo, cand, integral):
                            txs.append(Transaction("propagation", [
                                ReductionStep(StepKind.CHANGE_LOWER, col=j,
                                              value=cand)]))
                    else:
                        cand = ctx.round_down_bound(cap) if integral else cap
                        if bound_improves_upper(ctx, up, cand, integral):
                            txs.append(Transaction("propagation", [
                                ReductionStep(StepKind.CHANGE_UPPER, col=j,
                                              value=cand)]))
    return txs
