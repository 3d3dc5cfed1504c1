"""Optional thread parallelism, bounded by the CONEXA_THREADS environment variable."""

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    """Number of worker threads to use; defaults to 1 (serial)."""
    raw = os.environ.get("CONEXA_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def pmap(fn, items):
    """Order-preserving map, threaded when CONEXA_THREADS > 1.

    Only safe for pure functions; every call site in this package satisfies that.
    """
    items = list(items)
    workers = worker_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
