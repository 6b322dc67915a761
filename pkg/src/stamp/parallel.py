"""Deterministic worker-pool helper.

Work items are mapped by a pure function and results returned in input order,
so output never depends on the worker count. STAMP_THREADS bounds the pool.
"""

from __future__ import annotations

import os
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    raw = os.environ.get("STAMP_THREADS", "")
    if raw.strip():
        try:
            n = int(raw)
        except ValueError:
            raise ValueError(f"STAMP_THREADS must be an integer, got {raw!r}") from None
        if n < 1:
            raise ValueError(f"STAMP_THREADS must be >= 1, got {n}")
        return n
    return min(8, os.cpu_count() or 1)


def ordered_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Apply fn to every item, preserving input order in the result."""
    seq: Sequence[T] = list(items)
    workers = min(worker_count(), len(seq)) or 1
    if workers == 1:
        return [fn(item) for item in seq]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seq))
