"""Thread fan-out for independent point evaluations."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def worker_count() -> int:
    """Worker threads from ``FRACLAP_THREADS`` (unset or 0 means one per CPU)."""
    raw = os.environ.get("FRACLAP_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"FRACLAP_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"FRACLAP_THREADS must be >= 0, got {n}")
    return n or (os.cpu_count() or 1)


def thread_map(func: Callable[[T], R], items: Iterable[T]) -> list[R]:
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
