"""Order-preserving parallel map capped by ``COVSPEC_THREADS``."""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
U = TypeVar("U")


def worker_count() -> int:
    env = os.environ.get("COVSPEC_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"COVSPEC_THREADS must be a positive integer, got {env!r}") from None
    return max(1, min(4, os.cpu_count() or 1))


def pmap(fn: Callable[[T], U], items: Iterable[T]) -> list[U]:
    """``list(map(fn, items))``, possibly threaded; results keep input order."""
    items = list(items)
    n = min(worker_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, items))
