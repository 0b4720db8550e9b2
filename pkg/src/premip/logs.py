"""Leveled message log with the fixed per-step transaction line format.

Verbosity levels: 0 errors only, 1 summary, 2 rounds, 3 per-presolver
counts, 4 per-step transaction lines.  A log at level k is exactly the
level-(k+1) log with the deeper lines filtered out, which the report
generator and the determinism checks rely on.
"""
from __future__ import annotations

import io
import sys
from typing import Optional, TextIO

from .numerics import NumericContext
from .transactions import ApplyOutcome, Transaction


class MessageLog:
    def __init__(self, verbosity: int = 1, stream: Optional[TextIO] = None):
        self.verbosity = verbosity
        self.stream = stream if stream is not None else sys.stderr
        self._txn_index = 0

    def line(self, level: int, text: str) -> None:
        if level <= self.verbosity:
            self.stream.write(text + "\n")

    def transaction(self, txn: Transaction, outcome: ApplyOutcome,
                    ctx: NumericContext) -> None:
        if self.verbosity < 4:
            self._txn_index += 1
            return
        status = outcome.status.value
        for step in txn.steps:
            r = step.row if step.row is not None else -1
            c = step.col if step.col is not None else -1
            v = ctx.format(step.value) if step.value is not None else "0"
            self.line(4, f"{txn.presolver} row {r} col {c} val {v} "
                         f"kind {step.kind.name} status {status}")
        conflict = outcome.conflicting_presolver or "none"
        redundant = 1 if outcome.redundant else 0
        self.line(4, f"txn {txn.presolver} index {self._txn_index} "
                     f"status {status} conflict {conflict} "
                     f"redundant {redundant}")
        self._txn_index += 1


def capture_log(verbosity: int = 4):
    """MessageLog writing into an in-memory buffer (handy for tests)."""
    buf = io.StringIO()
    return MessageLog(verbosity, buf), buf
