"""
Order-preserving fan-out of independent replicates.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

from .logging_utils import get_logger

T = TypeVar("T")
R = TypeVar("R")

logger = get_logger("trigzeros.parallel")


def replicate_map(
    fn: Callable[[T], R],
    items: Iterable[T],
    max_workers: Optional[int] = None,
) -> List[R]:
    """
    Apply ``fn`` to every item and return results in input order.

    Args:
        fn: Pure function of one item
        items: Work items (typically RNG streams)
        max_workers: Thread count; ``None`` or ``<= 1`` runs sequentially

    Returns:
        List of results aligned with ``items``
    """
    work: Sequence[T] = list(items)
    if not max_workers or max_workers <= 1 or len(work) < 2:
        return [fn(item) for item in work]

    logger.debug(f"Dispatching {len(work)} replicates to {max_workers} threads")
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        return list(executor.map(fn, work))


def chunked(items: Sequence[T], size: int) -> List[Sequence[T]]:
    """Split a sequence into consecutive chunks of at most ``size`` items."""
    if size < 1:
        raise ValueError("chunk size must be positive")
    return [items[start:start + size] for start in range(0, len(items), size)]
