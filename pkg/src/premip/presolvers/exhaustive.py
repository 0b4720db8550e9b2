"""Exhaustive presolvers; Probing, DomCol and Sparsify fan their iteration
space out to forked workers when the instance is big enough to pay for it."""
from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from ..model import InfeasibleError
from ..numerics import (INF, NEG_INF, Number, bound_improves_lower,
                        bound_improves_upper, is_finite)
from ..parallel import chunk_evenly, fork_map
from ..transactions import (ReductionStep, StepKind, Transaction, assert_row,
                            assert_row_bounds, assert_col_bounds)
from .common import PresolveView

# work-size gates below which forking is not worth the overhead
PROBING_PARALLEL_MIN_CANDIDATES = 192
PROBING_PARALLEL_MIN_NNZ = 2000
DOMCOL_PARALLEL_MIN_GROUPS = 512
SPARSIFY_PARALLEL_MIN_EQS = 512


# ---------------------------------------------------------------------------
# ImplInt


def run_implint(view: PresolveView) -> List[Transaction]:
    """Continuous columns forced to integer values by an integral equation."""
    p = view.problem
    ctx = view.ctx
    txs: List[Transaction] = []
    for i in p.active_rows():
        if not p.is_equation(i):
            continue
        entries = p.row_entries(i)
        if len(entries) < 2:
            continue
        cont = [(j, a) for j, a in entries if not p.col_integral[j]]
        if len(cont) != 1:
            continue
        j, piv = cont[0]
        if abs(piv) < 1:
            continue  # unit coefficient up to an integral row scale only
        b = p.row_lhs[i]
        if not ctx.is_integral(b / piv):
            continue
        if all(ctx.is_integral(a / piv) for k, a in entries if k != j):
            txs.append(Transaction("implint", [
                assert_row(i), assert_row_bounds(i),
                ReductionStep(StepKind.IMPLY_INTEGRAL, col=j)]))
    return txs


# ---------------------------------------------------------------------------
# DomCol

_DOMCOL_VIEW: Optional[PresolveView] = None


def _domcol_sense_ok(p, ctx, i, aj, ak) -> bool:
    """aj dominates ak on row i under its sense normalization."""
    rhs_fin = is_finite(p.row_rhs[i])
    lhs_fin = is_finite(p.row_lhs[i])
    if rhs_fin and lhs_fin:
        return ctx.approx_eq(aj, ak)
    if rhs_fin:
        return aj < ak or ctx.approx_eq(aj, ak)
    if lhs_fin:
        return aj > ak or ctx.approx_eq(aj, ak)
    return True


def _domcol_group(args) -> List[Transaction]:
    support, cols = args
    view = _DOMCOL_VIEW
    p = view.problem
    ctx = view.ctx
    txs: List[Transaction] = []
    for xi in range(len(cols)):
        for yi in range(xi + 1, len(cols)):
            j, k = cols[xi], cols[yi]
            cj, ck = p.obj[j], p.obj[k]
            j_over_k = ((cj < ck or ctx.approx_eq(cj, ck)) and all(
                _domcol_sense_ok(p, ctx, i, p.rows[i][j], p.rows[i][k])
                for i in support))
            k_over_j = ((ck < cj or ctx.approx_eq(cj, ck)) and all(
                _domcol_sense_ok(p, ctx, i, p.rows[i][k], p.rows[i][j])
                for i in support))
            for dom, sub in (((j, k) if j_over_k else (None, None)),
                             ((k, j) if k_over_j else (None, None))):
                if dom is None:
                    continue
                tx = _domcol_fix(view, support, dom, sub)
                if tx is not None:
                    txs.append(tx)
    return txs


def _domcol_fix(view, support, dom, sub) -> Optional[Transaction]:
    """Fix the dominated column when the dominating one has unlimited
    headroom to absorb the shifted mass (or vice versa)."""
    p = view.problem
    dom_int, sub_int = p.col_integral[dom], p.col_integral[sub]
    asserts = [assert_col_bounds(dom), assert_col_bounds(sub)]
    asserts += [assert_row(i) for i in support]
    if p.col_upper[dom] == INF and is_finite(p.col_lower[sub]):
        if (not dom_int) or sub_int:
            return Transaction("domcol", asserts + [
                ReductionStep(StepKind.FIX_COLUMN, col=sub,
                              value=p.col_lower[sub])])
    if p.col_lower[sub] == NEG_INF and is_finite(p.col_upper[dom]):
        if (not sub_int) or dom_int:
            return Transaction("domcol", asserts + [
                ReductionStep(StepKind.FIX_COLUMN, col=dom,
                              value=p.col_upper[dom])])
    return None


def run_domcol(view: PresolveView) -> List[Transaction]:
    """Detect dominated columns among columns with equal support."""
    global _DOMCOL_VIEW
    p = view.problem
    buckets: Dict[tuple, List[int]] = {}
    for j in p.active_cols():
        entries = p.col_entries(j)
        if not entries:
            continue
        buckets.setdefault(tuple(i for i, _ in entries), []).append(j)
    groups = [(s, cols) for s, cols in sorted(buckets.items())
              if len(cols) >= 2]
    if not groups:
        return []
    _DOMCOL_VIEW = view
    try:
        if (view.workers > 1 and view.parallel_enabled
                and len(groups) >= DOMCOL_PARALLEL_MIN_GROUPS):
            chunks = chunk_evenly(groups, 4 * view.workers)
            results = fork_map(_domcol_chunk, chunks, view.workers)
            return [tx for part in results for tx in part]
        return [tx for g in groups for tx in _domcol_group(g)]
    finally:
        _DOMCOL_VIEW = None


def _domcol_chunk(groups) -> List[Transaction]:
    return [tx for g in groups for tx in _domcol_group(g)]


# ---------------------------------------------------------------------------
# DualInfer


def run_dualinfer(view: PresolveView) -> List[Transaction]:
    """Bound the dual multipliers via continuous columns' reduced-cost
    conditions; provably nonzero multipliers turn rows into equations,
    provably signed reduced costs fix columns."""
    p = view.problem
    ctx = view.ctx
    cont = [j for j in p.active_cols()
            if not p.col_integral[j] and p.cols[j]]
    if not cont:
        return []
    ylb = [NEG_INF] * p.nrows
    yub = [INF] * p.nrows
    for i in p.active_rows():
        if not is_finite(p.row_rhs[i]):
            ylb[i] = ctx.number(0)
        if not is_finite(p.row_lhs[i]):
            yub[i] = ctx.number(0)

    dual_rows = []
    for j in cont:
        entries = p.col_entries(j)
        il, iu = NEG_INF, INF
        for i, a in entries:
            from .common import implied_bound_from_row
            lo_r, up_r = implied_bound_from_row(view, i, j, a)
            il = max(il, lo_r)
            iu = min(iu, up_r)
        free_below = (not is_finite(p.col_lower[j])) or (
            is_finite(il) and ctx.feas_geq(il, p.col_lower[j]))
        free_above = (not is_finite(p.col_upper[j])) or (
            is_finite(iu) and ctx.feas_leq(iu, p.col_upper[j]))
        if free_below and free_above:
            rel = "E"
        elif free_above:
            rel = "L"  # sum a*y <= c
        elif free_below:
            rel = "G"
        else:
            continue
        dual_rows.append((j, entries, rel, p.obj[j]))
    if not dual_rows:
        return []

    def dual_min_max(entries):
        mn, mx = ctx.number(0), ctx.number(0)
        n_mn = n_mx = 0
        for i, a in entries:
            lo, up = ylb[i], yub[i]
            if a > 0:
                if is_finite(lo):
                    mn = mn + a * lo
                else:
                    n_mn += 1
                if is_finite(up):
                    mx = mx + a * up
                else:
                    n_mx += 1
            else:
                if is_finite(up):
                    mn = mn + a * up
                else:
                    n_mn += 1
                if is_finite(lo):
                    mx = mx + a * lo
                else:
                    n_mx += 1
        return (NEG_INF if n_mn else mn), (INF if n_mx else mx), n_mn, n_mx

    for _ in range(2):
        for j, entries, rel, c in dual_rows:
            mn, mx, n_mn, n_mx = dual_min_max(entries)
            if rel in ("E", "L") and is_finite(mn) and not ctx.feas_leq(mn, c):
                return []  # dual system inconsistent: stay conservative
            if rel in ("E", "G") and is_finite(mx) and not ctx.feas_leq(c, mx):
                return []
            for i, a in entries:
                lo, up = ylb[i], yub[i]
                if rel in ("E", "L"):
                    if a > 0 and (n_mn == 0 or (n_mn == 1 and not is_finite(lo))):
                        res = mn - (a * lo if is_finite(lo) else 0)
                        cand = (c - res) / a
                        if cand < up:
                            yub[i] = cand
                    elif a < 0 and (n_mn == 0 or (n_mn == 1 and not is_finite(up))):
                        res = mn - (a * up if is_finite(up) else 0)
                        cand = (c - res) / a
                        if cand > lo:
                            ylb[i] = cand
                if rel in ("E", "G"):
                    if a > 0 and (n_mx == 0 or (n_mx == 1 and not is_finite(up))):
                        res = mx - (a * up if is_finite(up) else 0)
                        cand = (c - res) / a
                        if cand > lo:
                            ylb[i] = cand
                    elif a < 0 and (n_mx == 0 or (n_mx == 1 and not is_finite(lo))):
                        res = mx - (a * lo if is_finite(lo) else 0)
                        cand = (c - res) / a
                        if cand < up:
                            yub[i] = cand
                if ylb[i] > yub[i] and not ctx.feas_leq(ylb[i], yub[i]):
                    return []

    txs: List[Transaction] = []
    for i in p.active_rows():
        lhs, rhs = p.row_lhs[i], p.row_rhs[i]
        if is_finite(ylb[i]) and ylb[i] > ctx.feastol and is_finite(lhs) \
                and not p.is_equation(i):
            txs.append(Transaction("dualinfer", [
                assert_row(i), assert_row_bounds(i),
                ReductionStep(StepKind.CHANGE_RHS, row=i, value=lhs)]))
        elif is_finite(yub[i]) and yub[i] < -ctx.feastol and is_finite(rhs) \
                and not p.is_equation(i):
            txs.append(Transaction("dualinfer", [
                assert_row(i), assert_row_bounds(i),
                ReductionStep(StepKind.CHANGE_LHS, row=i, value=rhs)]))
    for j, entries, rel, c in dual_rows:
        mn, mx, n_mn, n_mx = dual_min_max(entries)
        dmin = c - mx if is_finite(mx) else NEG_INF
        dmax = c - mn if is_finite(mn) else INF
        if is_finite(dmin) and dmin > ctx.feastol \
                and is_finite(p.col_lower[j]):
            txs.append(Transaction("dualinfer", [
                assert_col_bounds(j),
                ReductionStep(StepKind.FIX_COLUMN, col=j,
                              value=p.col_lower[j])]))
        elif is_finite(dmax) and dmax < -ctx.feastol \
                and is_finite(p.col_upper[j]):
            txs.append(Transaction("dualinfer", [
                assert_col_bounds(j),
                ReductionStep(StepKind.FIX_COLUMN, col=j,
                              value=p.col_upper[j])]))
    return txs


# ---------------------------------------------------------------------------
# Probing

_PROBE_VIEW: Optional[PresolveView] = None


def _probe_propagate(view: PresolveView, k: int, val: int):
    """Fix binary k to val and run up to two propagation passes on scratch
    bound/activity overlays.  Returns {col: (lo, up)} or None if infeasible."""
    p = view.problem
    ctx = view.ctx
    act = view.activities
    bounds: Dict[int, Tuple[Number, Number]] = {}
    rowstate: Dict[int, list] = {}

    def col_bounds(j):
        if j in bounds:
            return bounds[j]
        return p.col_lower[j], p.col_upper[j]

    def row_state(i):
        st = rowstate.get(i)
        if st is None:
            st = list(act.snapshot(i))
            rowstate[i] = st
        return st

    def shift(i, a, old_lo, old_up, new_lo, new_up):
        st = row_state(i)
        for sign, lo, up in ((-1, old_lo, old_up), (1, new_lo, new_up)):
            if a > 0:
                if is_finite(lo):
                    st[0] += sign * a * lo
                else:
                    st[2] += sign
                if is_finite(up):
                    st[1] += sign * a * up
                else:
                    st[3] += sign
            else:
                if is_finite(up):
                    st[0] += sign * a * up
                else:
                    st[2] += sign
                if is_finite(lo):
                    st[1] += sign * a * lo
                else:
                    st[3] += sign

    def set_bounds(j, new_lo, new_up):
        old_lo, old_up = col_bounds(j)
        if new_lo == old_lo and new_up == old_up:
            return False
        for i, a in p.cols[j].items():
            shift(i, a, old_lo, old_up, new_lo, new_up)
        bounds[j] = (new_lo, new_up)
        return True

    v = ctx.number(val)
    set_bounds(k, v, v)
    affected = set(p.cols[k].keys())
    for _ in range(2):
        next_affected = set()
        for i in sorted(affected):
            st = row_state(i)
            min_eff = NEG_INF if st[2] else st[0]
            max_eff = INF if st[3] else st[1]
            lhs, rhs = p.row_lhs[i], p.row_rhs[i]
            if is_finite(rhs) and not ctx.feas_leq(min_eff, rhs):
                return None
            if is_finite(lhs) and not ctx.feas_leq(lhs, max_eff):
                return None
            for j, a in p.row_entries(i):
                lo, up = col_bounds(j)
                if lo == up:
                    continue
                new_lo, new_up = lo, up
                if is_finite(rhs):
                    if st[2] == 0 or (st[2] == 1 and not is_finite(
                            lo if a > 0 else -up)):
                        mval = (a * lo if a > 0 else a * up)
                        res = st[0] - (mval if is_finite(mval) else 0)
                        if st[2] == 1 and is_finite(mval):
                            res = NEG_INF
                        if is_finite(res):
                            cap = (rhs - res) / a
                            if a > 0:
                                cand = ctx.round_down_bound(cap) \
                                    if p.col_integral[j] else cap
                                if cand < new_up:
                                    new_up = cand
                            else:
                                cand = ctx.round_up_bound(cap) \
                                    if p.col_integral[j] else cap
                                if cand > new_lo:
                                    new_lo = cand
                if is_finite(lhs):
                    if st[3] == 0 or (st[3] == 1 and not is_finite(
                            up if a > 0 else -lo)):
                        xval = (a * up if a > 0 else a * lo)
                        res = st[1] - (xval if is_finite(xval) else 0)
                        if st[3] == 1 and is_finite(xval):
                            res = INF
                        if is_finite(res):
                            cap = (lhs - res) / a
                            if a > 0:
                                cand = ctx.round_up_bound(cap) \
                                    if p.col_integral[j] else cap
                                if cand > new_lo:
                                    new_lo = cand
                            else:
                                cand = ctx.round_down_bound(cap) \
                                    if p.col_integral[j] else cap
                                if cand < new_up:
                                    new_up = cand
                if new_lo > new_up and not ctx.feas_leq(new_lo, new_up):
                    return None
                if (new_lo, new_up) != (lo, up):
                    if set_bounds(j, new_lo, new_up):
                        next_affected.update(p.cols[j].keys())
        affected = next_affected
        if not affected:
            break
    for i in rowstate:
        st = rowstate[i]
        min_eff = NEG_INF if st[2] else st[0]
        max_eff = INF if st[3] else st[1]
        if is_finite(p.row_rhs[i]) and not ctx.feas_leq(min_eff, p.row_rhs[i]):
            return None
        if is_finite(p.row_lhs[i]) and not ctx.feas_leq(p.row_lhs[i], max_eff):
            return None
    return bounds


def _probe_one(k: int):
    view = _PROBE_VIEW
    return (_probe_propagate(view, k, 0), _probe_propagate(view, k, 1))


def _probe_chunk(candidates: List[int]):
    return [(k, _probe_one(k)) for k in candidates]


def run_probing(view: PresolveView) -> List[Transaction]:
    """Probe binary columns to 0 and 1; derive fixings, global bounds and
    affine couplings from the two propagation branches."""
    global _PROBE_VIEW
    p = view.problem
    ctx = view.ctx
    binaries = [j for j in p.active_cols() if p.is_binary(j)]
    if view.is_fresh():
        changed_bins = binaries
    else:
        changed = set(view.scan_cols())
        changed_bins = [j for j in binaries if j in changed]
    cap = min(p.ncols, 10 * len(changed_bins))
    candidates = binaries[:cap]
    if not candidates:
        return []
    _PROBE_VIEW = view
    try:
        if (view.workers > 1 and view.parallel_enabled
                and len(candidates) >= PROBING_PARALLEL_MIN_CANDIDATES
                and p.nnz >= PROBING_PARALLEL_MIN_NNZ):
            chunks = chunk_evenly(candidates, 4 * view.workers)
            parts = fork_map(_probe_chunk, chunks, view.workers)
            results = [r for part in parts for r in part]
        else:
            results = _probe_chunk(candidates)
    finally:
        _PROBE_VIEW = None

    txs: List[Transaction] = []
    for k, (res0, res1) in results:
        if res0 is None and res1 is None:
            raise InfeasibleError(
                f"probing {p.col_names[k]}: both branches infeasible")
        if res0 is None:
            txs.append(Transaction("probing", [ReductionStep(
                StepKind.FIX_COLUMN, col=k, value=ctx.number(1))]))
            continue
        if res1 is None:
            txs.append(Transaction("probing", [ReductionStep(
                StepKind.FIX_COLUMN, col=k, value=ctx.number(0))]))
            continue
        touched = sorted((set(res0) | set(res1)) - {k})
        bound_steps = []
        aggregations = []
        for j in touched:
            lo0, up0 = res0.get(j, (p.col_lower[j], p.col_upper[j]))
            lo1, up1 = res1.get(j, (p.col_lower[j], p.col_upper[j]))
            glb, gub = min(lo0, lo1), max(up0, up1)
            integral = p.col_integral[j]
            if bound_improves_lower(ctx, p.col_lower[j], glb, integral):
                bound_steps.append(ReductionStep(StepKind.CHANGE_LOWER,
                                                 col=j, value=glb))
            if bound_improves_upper(ctx, p.col_upper[j], gub, integral):
                bound_steps.append(ReductionStep(StepKind.CHANGE_UPPER,
                                                 col=j, value=gub))
            forced0 = ctx.approx_eq(lo0, up0)
            forced1 = ctx.approx_eq(lo1, up1)
            if forced0 and forced1 and not ctx.approx_eq(lo0, lo1):
                alpha, beta = lo0, lo1 - lo0
                if p.col_integral[j] and not (ctx.is_integral(alpha)
                                              and ctx.is_integral(beta)):
                    continue
                aggregations.append(Transaction("probing", [
                    assert_col_bounds(j), assert_col_bounds(k),
                    ReductionStep(StepKind.SUBSTITUTE_COLUMN, col=j, col2=k,
                                  value=alpha, scale=beta)]))
        for step in bound_steps:
            txs.append(Transaction("probing", [step]))
        txs.extend(aggregations)
    return txs


# ---------------------------------------------------------------------------
# Substitution


def run_substitution(view: PresolveView) -> List[Transaction]:
    """Pick a pivot column in each equation and eliminate it everywhere."""
    p = view.problem
    ctx = view.ctx
    txs: List[Transaction] = []
    for i in p.active_rows():
        if not p.is_equation(i):
            continue
        entries = p.row_entries(i)
        if len(entries) < 2:
            continue
        b = p.row_lhs[i]
        max_mag = max(abs(a) for _, a in entries)
        best = None
        for j, a in entries:
            if abs(a) < ctx.markowitz_threshold * max_mag or a == 0:
                continue
            if p.col_integral[j]:
                if not all(p.col_integral[k] for k, _ in entries if k != j):
                    continue
                if not ctx.is_integral(b / a):
                    continue
                if not all(ctx.is_integral(ak / a)
                           for k, ak in entries if k != j):
                    continue
                type_rank = 1
            else:
                type_rank = 0
            fill = (len(p.cols[j]) - 1) * (len(entries) - 2)
            key = (type_rank, fill, -abs(a), j)
            if best is None or key < best[0]:
                best = (key, j)
        if best is None:
            continue
        j = best[1]
        txs.append(Transaction("substitution", [
            assert_row(i), assert_row_bounds(i), assert_col_bounds(j),
            ReductionStep(StepKind.SUBSTITUTE_COLUMN, row=i, col=j)]))
    return txs


# ---------------------------------------------------------------------------
# Sparsify

_SPARSIFY_VIEW: Optional[PresolveView] = None


def _sparsify_equation(e: int) -> List[Transaction]:
    view = _SPARSIFY_VIEW
    p = view.problem
    ctx = view.ctx
    eq_entries = p.row_entries(e)
    b = p.row_lhs[e]
    shared_count: Dict[int, int] = {}
    for j, _ in eq_entries:
        for t in p.cols[j]:
            if t != e:
                shared_count[t] = shared_count.get(t, 0) + 1
    txs: List[Transaction] = []
    for t in sorted(t for t, n in shared_count.items() if n >= 2):
        target = p.rows[t]
        best = None
        for j, aek in eq_entries:
            atk = target.get(j)
            if atk is None:
                continue
            s = -atk / aek
            canceled = 0
            for j2, ae2 in eq_entries:
                at2 = target.get(j2)
                if at2 is not None and ctx.eq_zero(at2 + s * ae2):
                    canceled += 1
            fill = sum(1 for j2, _ in eq_entries if j2 not in target)
            net = canceled - fill
            if canceled >= 2 and net >= 1:
                key = (-net, -canceled, j)
                if best is None or key < best[0]:
                    best = (key, s)
        if best is None:
            continue
        s = best[1]
        steps = [assert_row(e), assert_row_bounds(e),
                 assert_row(t), assert_row_bounds(t)]
        for j, aek in eq_entries:
            new = target.get(j, ctx.number(0)) + s * aek
            steps.append(ReductionStep(StepKind.CHANGE_COEFF, row=t, col=j,
                                       value=0 if ctx.eq_zero(new) else new))
        shift = s * b
        if is_finite(p.row_lhs[t]):
            steps.append(ReductionStep(StepKind.CHANGE_LHS, row=t,
                                       value=p.row_lhs[t] + shift))
        if is_finite(p.row_rhs[t]):
            steps.append(ReductionStep(StepKind.CHANGE_RHS, row=t,
                                       value=p.row_rhs[t] + shift))
        txs.append(Transaction("sparsify", steps))
    return txs


def _sparsify_chunk(eqs: List[int]) -> List[Transaction]:
    return [tx for e in eqs for tx in _sparsify_equation(e)]


def run_sparsify(view: PresolveView) -> List[Transaction]:
    """Add multiples of equations to overlapping rows to cancel nonzeros."""
    global _SPARSIFY_VIEW
    p = view.problem
    eqs = [i for i in p.active_rows()
           if p.is_equation(i) and len(p.rows[i]) >= 2]
    if not eqs:
        return []
    _SPARSIFY_VIEW = view
    try:
        if (view.workers > 1 and view.parallel_enabled
                and len(eqs) >= SPARSIFY_PARALLEL_MIN_EQS):
            chunks = chunk_evenly(eqs, 4 * view.workers)
            parts = fork_map(_sparsify_chunk, chunks, view.workers)
            return [tx for part in parts for tx in part]
        return _sparsify_chunk(eqs)
    finally:
        _SPARSIFY_VIEW = None
