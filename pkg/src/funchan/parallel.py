"""Optional thread parallelism for parameter sweeps.

FUNCHAN_THREADS caps the worker count; the default of 1 keeps everything
sequential.  Results always come back in input order, so output files are
identical whatever the cap.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    raw = os.environ.get("FUNCHAN_THREADS", "1")
    try:
        count = int(raw)
    except ValueError:
        count = 1
    return max(1, count)


def ordered_map(fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """map() preserving order, threaded when FUNCHAN_THREADS > 1."""
    seq: Sequence[T] = list(items)
    workers = thread_count()
    if workers <= 1 or len(seq) <= 1:
        return [fn(item) for item in seq]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seq))
