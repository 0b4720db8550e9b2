"""Round-based presolve driver.

The loop starts with trivial presolve and a fast round.  Whenever a round
applies enough reductions the next round is fast again; otherwise the tier
escalates fast -> medium -> exhaustive.  A round at a tier runs all
presolvers of that tier and the cheaper tiers, concurrently in principle
(each gets a private transaction list and a read-only view), then applies
the collected transactions in one deterministic batch.  When the exhaustive
tier fails to find enough reductions for the first time, delayed presolvers
(Sparsify) are enabled and the loop returns to fast; the second failure
terminates.  Trivial presolve runs again after every round.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, List, Optional

from .model import (InfeasibleError, ModelUpdate, Problem, UnboundedError)
from .options import PresolveOptions
from .presolvers import (REGISTRY, PresolveView, Tier, run_trivial, runner)
from .transactions import (ApplyOutcome, PostsolveRecord, Transaction,
                           TxStatus, apply_all)


class Verdict(Enum):
    REDUCED = "reduced"
    UNCHANGED = "unchanged"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass
class RoundStats:
    bound_changes: int = 0
    deleted_cols: int = 0
    side_changes: int = 0
    deleted_rows: int = 0
    coeff_changes: int = 0
    tx_found: int = 0
    tx_applied: int = 0
    tx_discarded: int = 0
    tx_canceled: int = 0
    rounds_fast: int = 0
    rounds_medium: int = 0
    rounds_exhaustive: int = 0
    presolve_seconds: float = 0.0
    presolver_found: Dict[str, int] = None
    presolver_applied: Dict[str, int] = None

    def __post_init__(self):
        self.presolver_found = {}
        self.presolver_applied = {}

    def merge_changes(self, other: "_Window") -> None:
        self.bound_changes += other.bound_changes
        self.deleted_cols += other.deleted_cols
        self.side_changes += other.side_changes
        self.deleted_rows += other.deleted_rows
        self.coeff_changes += other.coeff_changes

    def as_dict(self) -> Dict[str, int]:
        out = {
            "rounds.fast": self.rounds_fast,
            "rounds.medium": self.rounds_medium,
            "rounds.exhaustive": self.rounds_exhaustive,
            "transactions.found": self.tx_found,
            "transactions.applied": self.tx_applied,
            "transactions.discarded": self.tx_discarded,
            "transactions.canceled": self.tx_canceled,
            "changes.bounds": self.bound_changes,
            "changes.sides": self.side_changes,
            "changes.coefficients": self.coeff_changes,
            "changes.deletedrows": self.deleted_rows,
            "changes.deletedcols": self.deleted_cols,
        }
        for name in sorted(self.presolver_found):
            out[f"presolver.{name}.found"] = self.presolver_found[name]
            out[f"presolver.{name}.applied"] = \
                self.presolver_applied.get(name, 0)
        return out


@dataclass
class _Window:
    """Reduction counters accumulated since the last evaluation."""
    bound_changes: int = 0
    deleted_cols: int = 0
    side_changes: int = 0
    deleted_rows: int = 0
    coeff_changes: int = 0

    def reset(self) -> None:
        self.bound_changes = 0
        self.deleted_cols = 0
        self.side_changes = 0
        self.deleted_rows = 0
        self.coeff_changes = 0


def enough_reductions(window, problem: Problem, abortfac: float) -> bool:
    """Positive sense of the abort test: did the last window of work change
    enough of the problem to justify restarting at the fast tier?"""
    ncols = len(problem.active_cols())
    nrows = len(problem.active_rows())
    nnz = problem.nnz
    if 0.1 * window.bound_changes + window.deleted_cols > abortfac * ncols:
        return True
    if window.side_changes + window.deleted_rows > abortfac * nrows:
        return True
    if window.coeff_changes > abortfac * nnz:
        return True
    return False


@dataclass
class PresolveResult:
    problem: Problem
    record: PostsolveRecord
    verdict: Verdict
    stats: RoundStats


_TIER_INCLUDES = {
    Tier.FAST: (Tier.FAST,),
    Tier.MEDIUM: (Tier.FAST, Tier.MEDIUM),
    Tier.EXHAUSTIVE: (Tier.FAST, Tier.MEDIUM, Tier.EXHAUSTIVE),
}


class _Driver:
    def __init__(self, problem: Problem, options: PresolveOptions, log=None):
        self.options = options
        self.log = log
        self.reduced = problem.copy()
        self.record = PostsolveRecord.for_problem(self.reduced)
        self.stats = RoundStats()
        self.window = _Window()
        self.update = ModelUpdate(self.reduced, stats=self.window,
                                  record=self.record.entries)
        self.update.txn_counter = 0
        self.watermarks: Dict[str, Optional[int]] = {}
        self.workers = options.resolved_threads()

    # -- helpers ------------------------------------------------------------

    def _line(self, level: int, text: str) -> None:
        if self.log is not None:
            self.log.line(level, text)

    def _make_view(self, name: str) -> PresolveView:
        mark = self.watermarks.get(name)
        if mark is None:
            view = PresolveView(self.update.problem, self.update.activities,
                                self.update.locks, None, None,
                                workers=self.workers,
                                parallel_enabled=self.options.internal_parallel)
        else:
            rows, cols = set(), set()
            for kind, idx in self.update.journal[mark:]:
                (rows if kind == "row" else cols).add(idx)
            view = PresolveView(self.update.problem, self.update.activities,
                                self.update.locks, rows, cols,
                                workers=self.workers,
                                parallel_enabled=self.options.internal_parallel)
        self.watermarks[name] = len(self.update.journal)
        return view

    def _tally(self, txs: List[Transaction],
               outcomes: List[ApplyOutcome]) -> None:
        self.stats.tx_found += len(txs)
        for tx, o in zip(txs, outcomes):
            found = self.stats.presolver_found
            found[tx.presolver] = found.get(tx.presolver, 0) + 1
            if o.status is TxStatus.APPLIED:
                self.stats.tx_applied += 1
                applied = self.stats.presolver_applied
                applied[tx.presolver] = applied.get(tx.presolver, 0) + 1
            elif o.status is TxStatus.DISCARDED:
                self.stats.tx_discarded += 1
            else:
                self.stats.tx_canceled += 1

    def _trivial_fixpoint(self) -> None:
        for _ in range(100):
            self.update.flags.clear()
            view = PresolveView(self.update.problem, self.update.activities,
                                self.update.locks, None, None, workers=1)
            txs = run_trivial(view)
            if not txs:
                return
            outcomes = apply_all(self.update, txs, self.log)
            self._tally(txs, outcomes)
            if not any(o.status is TxStatus.APPLIED for o in outcomes):
                return

    # -- main loop -----------------------------------------------------------

    def run(self) -> PresolveResult:
        t0 = time.perf_counter()
        verdict: Optional[Verdict] = None
        try:
            self._trivial_fixpoint()
            tier = Tier.FAST
            delayed_enabled = False
            rounds = 0
            while rounds < self.options.max_rounds:
                rounds += 1
                if tier is Tier.FAST:
                    self.stats.rounds_fast += 1
                elif tier is Tier.MEDIUM:
                    self.stats.rounds_medium += 1
                else:
                    self.stats.rounds_exhaustive += 1
                self._line(2, f"round {rounds} tier {tier.value}")
                active = [d for d in REGISTRY
                          if d.tier in _TIER_INCLUDES[tier]
                          and self.options.is_enabled(d.name)
                          and (not d.delayed or delayed_enabled)]
                if self.options.apply_immediately and self.workers == 1:
                    self._round_immediate(active)
                else:
                    self._round_batched(active)
                self._trivial_fixpoint()
                enough = enough_reductions(self.window, self.update.problem,
                                           self.options.abortfac)
                self.stats.merge_changes(self.window)
                self.window.reset()
                if enough:
                    tier = Tier.FAST
                    continue
                if tier is Tier.FAST:
                    tier = Tier.MEDIUM
                elif tier is Tier.MEDIUM:
                    tier = Tier.EXHAUSTIVE
                else:
                    has_delayed = any(d.delayed and self.options.is_enabled(d.name)
                                      for d in REGISTRY)
                    if not delayed_enabled and has_delayed:
                        delayed_enabled = True
                        tier = Tier.FAST
                        self._line(2, "delayed presolvers enabled")
                    else:
                        break
        except InfeasibleError as exc:
            self._line(1, f"infeasible: {exc}")
            verdict = Verdict.INFEASIBLE
        except UnboundedError as exc:
            self._line(1, f"unbounded: {exc}")
            verdict = Verdict.UNBOUNDED
        if verdict is None:
            self.stats.merge_changes(self.window)
            self.window.reset()
            verdict = (Verdict.REDUCED if self.stats.tx_applied > 0
                       else Verdict.UNCHANGED)
        self.stats.presolve_seconds = time.perf_counter() - t0
        return PresolveResult(self.reduced, self.record, verdict, self.stats)

    def _round_batched(self, active) -> None:
        """Collect every presolver's private transaction list against the
        round-start snapshot, then validate and apply in priority order."""
        self.update.flags.clear()
        collected: List[Transaction] = []
        for desc in active:
            view = self._make_view(desc.name)
            txs = runner(desc.name)(view)
            if txs:
                self._line(3, f"presolver {desc.name} found {len(txs)}")
            collected.extend(txs)
        outcomes = apply_all(self.update, collected, self.log)
        self._tally(collected, outcomes)

    def _round_immediate(self, active) -> None:
        """Sequential mode: apply each presolver's transactions before the
        next presolver runs, so later presolvers see updated data."""
        for desc in active:
            self.update.flags.clear()
            view = self._make_view(desc.name)
            txs = runner(desc.name)(view)
            if not txs:
                continue
            self._line(3, f"presolver {desc.name} found {len(txs)}")
            outcomes = apply_all(self.update, txs, self.log)
            self._tally(txs, outcomes)


def presolve(problem: Problem, options: Optional[PresolveOptions] = None,
             log=None) -> PresolveResult:
    """Run the full presolving loop on a copy of the problem."""
    options = options or PresolveOptions()
    return _Driver(problem, options, log).run()


def presolve_sequential_immediate(problem: Problem,
                                  options: Optional[PresolveOptions] = None,
                                  log=None) -> PresolveResult:
    """Single-threaded variant that applies each presolver's reductions
    immediately; may legitimately take a different sequence of rounds."""
    options = options or PresolveOptions()
    if options.resolved_threads() != 1:
        raise ValueError("apply-immediately requires exactly one thread")
    options = replace(options, apply_immediately=True)
    return _Driver(problem, options, log).run()
