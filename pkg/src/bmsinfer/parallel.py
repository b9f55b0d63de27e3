"""Order-preserving map over a bounded worker pool."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor


def default_jobs() -> int:
    return os.cpu_count() or 1


def pmap(fn, items, jobs: int = 1) -> list:
    """``[fn(x) for x in items]``, evaluated on up to ``jobs`` processes.

    Results come back in input order, so callers stay deterministic no matter
    how the pool schedules the work. ``fn`` must be picklable.
    """
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    workers = min(jobs, len(items))
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items, chunksize=chunk))
