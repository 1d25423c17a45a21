"""Worker pool sizing.  ``SZLENK_LAB_THREADS`` caps the number of threads;
the compiled kernels release the GIL, so threads give real parallelism for
the large norm evaluations."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor


def worker_count() -> int:
    cap = os.environ.get("SZLENK_LAB_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return n


def ordered_map(fn, items):
    """``[fn(x) for x in items]``, possibly evaluated concurrently; results
    keep the input order."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
