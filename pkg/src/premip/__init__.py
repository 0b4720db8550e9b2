"""premip: solver-independent presolving for mixed-integer and linear
programs.

Reductions are emitted by presolvers as transactions against a read-only
problem snapshot and applied by the core in a deterministic order; stale
transactions are discarded instead of locked against.  The reduced problem
comes with a postsolve record that maps any primal solution back to the
original space.  All arithmetic is generic over float-with-tolerances or
exact rational numbers.
"""
from .numerics import INF, NEG_INF, Mode, NumericContext
from .model import (ColState, InfeasibleError, ModelUpdate, Problem,
                    UnboundedError)
from .options import PresolveOptions
from .transactions import (ApplyOutcome, PostsolveRecord, ReductionStep,
                           StepKind, Transaction, TxStatus, apply_all,
                           classify_redundant)
from .scheduler import (PresolveResult, RoundStats, Verdict,
                        enough_reductions, presolve,
                        presolve_sequential_immediate)
from .postsolve import PostsolveError, Solution, postsolve_primal, replay
from .mps import MpsError, read_mps, read_sol, write_mps, write_sol
from .records import read_record, write_record
from .report import build_report, parse_log, render_report, shifted_geomean
from .logs import MessageLog, capture_log

__version__ = "0.1.0"

__all__ = [
    "INF", "NEG_INF", "Mode", "NumericContext",
    "ColState", "InfeasibleError", "ModelUpdate", "Problem", "UnboundedError",
    "PresolveOptions",
    "ApplyOutcome", "PostsolveRecord", "ReductionStep", "StepKind",
    "Transaction", "TxStatus", "apply_all", "classify_redundant",
    "PresolveResult", "RoundStats", "Verdict", "enough_reductions",
    "presolve", "presolve_sequential_immediate",
    "PostsolveError", "Solution", "postsolve_primal", "replay",
    "MpsError", "read_mps", "read_sol", "write_mps", "write_sol",
    "read_record", "write_record",
    "build_report", "parse_log", "render_report", "shifted_geomean",
    "MessageLog", "capture_log",
]
