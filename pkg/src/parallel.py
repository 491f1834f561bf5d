"""
Shared worker pool for embarrassingly parallel work (power curves, Monte Carlo
partitions).

Results are always returned in submission order, so output never depends on
scheduling.  Callers must not submit work from inside a pool thread.
"""

import concurrent.futures
import logging
import os
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

_executor: concurrent.futures.ThreadPoolExecutor | None = None


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("BFDESIGN_WORKERS", "4")))
    except ValueError:
        logger.warning("Ignoring non-integer BFDESIGN_WORKERS value")
        return 4


def get_executor() -> concurrent.futures.ThreadPoolExecutor:
    """Get or create the process-wide thread pool."""
    global _executor
    if _executor is None:
        workers = _worker_count()
        logger.debug(f"Starting thread pool with {workers} workers")
        _executor = concurrent.futures.ThreadPoolExecutor(max_workers=workers)
    return _executor


def map_ordered(fn: Callable[[T], R], items: Iterable[T], parallel: bool = True) -> list[R]:
    """Apply ``fn`` to every item, optionally on the pool, keeping input order."""
    items = list(items)
    if not parallel or len(items) < 2:
        return [fn(item) for item in items]
    return list(get_executor().map(fn, items))


def shutdown_executor() -> None:
    """Shutdown the thread pool."""
    global _executor
    if _executor is not None:
        _executor.shutdown(wait=False)
        _executor = None
