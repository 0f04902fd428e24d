"""Order-preserving parallel map over a thread pool."""

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(fn: Callable[[T], R], items: Iterable[T], n_workers: int = 1) -> List[R]:
    """Apply ``fn`` to every item and return results in input order.

    With ``n_workers == 1`` everything runs inline on the calling thread.
    Results never depend on the worker count.
    """
    items = list(items)
    if n_workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n_workers, thread_name_prefix="cdans-worker") as pool:
        return list(pool.map(fn, items))
