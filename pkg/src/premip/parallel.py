"""Deterministic process-based fan-out for internally parallel presolvers.

Workers are forked so they inherit the current problem snapshot without
serialization; each task returns a picklable result and results are always
gathered in task order, so the output is identical to a sequential run.
Small work loads fall back to in-process execution because fork/IPC
overhead would dominate.
"""
from __future__ import annotations

import multiprocessing
import sys
from typing import Callable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def fork_available() -> bool:
    return (sys.platform.startswith("linux")
            and "fork" in multiprocessing.get_all_start_methods())


def fork_map(fn: Callable[[T], R], items: Sequence[T], workers: int) -> List[R]:
    """Apply fn to every item, preserving order.

    Runs sequentially unless more than one worker is requested, more than
    one item exists, and fork is available.  fn must be a module-level
    function; shared state must be reachable through module globals set
    before the call (inherited by the forked children).
    """
    if workers <= 1 or len(items) <= 1 or not fork_available():
        return [fn(it) for it in items]
    ctx = multiprocessing.get_context("fork")
    with ctx.Pool(min(workers, len(items))) as pool:
        return pool.map(fn, items, chunksize=1)


def chunk_evenly(items: Sequence[T], parts: int) -> List[List[T]]:
    """Split into at most `parts` contiguous chunks of near-equal size."""
    n = len(items)
    parts = max(1, min(parts, n))
    out = []
    base, extra = divmod(n, parts)
    start = 0
    for p in range(parts):
        size = base + (1 if p < extra else 0)
        out.append(list(items[start:start + size]))
        start += size
    return out
