"""Worker-count control.

BILIP_THREADS caps internal parallelism. All parallel reductions in this
package are order-independent (min/max/all), so results do not depend on
the budget.
"""

import os
from concurrent.futures import ThreadPoolExecutor


def thread_budget() -> int:
    raw = os.environ.get("BILIP_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def map_chunks(fn, chunks):
    """Apply fn to each chunk, threaded when the budget allows it."""
    budget = thread_budget()
    chunks = list(chunks)
    if budget <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=min(budget, len(chunks))) as pool:
        return list(pool.map(fn, chunks))
