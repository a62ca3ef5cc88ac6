"""Order-preserving fan-out used by the per-keyword, per-k and per-asset loops."""

from concurrent.futures import ThreadPoolExecutor


def ordered_map(func, items, threads=1):
    """
    Applies func to every item and returns the results in input order.

    Work runs on a thread pool when threads > 1; the collected list is the
    same for any thread count.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
