"""Ordered fan-out of per-image work."""

import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def run_ordered(fn: Callable[[T], R], tasks: Iterable[T], jobs: int = 1) -> list[R]:
    """Apply ``fn`` to every task; results come back in task order regardless of jobs.

    ``fn`` and the tasks must be picklable when ``jobs > 1``.
    """
    items = list(tasks)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    workers = min(jobs, len(items))
    logger.debug("running %d tasks on %d workers", len(items), workers)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
