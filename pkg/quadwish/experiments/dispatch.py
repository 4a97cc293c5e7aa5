# quadwish/experiments/dispatch.py

"""
Thread-pool dispatch of independent experiment runs.

Results come back in submission order regardless of which run finishes
first, so output built from them is deterministic. Each run owns its own
RNG stream; nothing is shared between runs except read-only inputs.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from quadwish.config import get_settings
from quadwish.log import get_logger

logger = get_logger()

T = TypeVar("T")
R = TypeVar("R")


def map_runs(
    fn: Callable[[T], R],
    items: Sequence[T],
    max_workers: Optional[int] = None,
    label: str = "run",
) -> List[R]:
    """
    Apply ``fn`` to every item, in parallel when more than one worker is
    configured, and return results in item order.

    The first exception raised by any run is re-raised after the pool
    shuts down.
    """
    workers = min(max_workers or get_settings().max_workers, max(len(items), 1))

    def _wrapped(indexed):
        idx, item = indexed
        logger.debug("[%s-%d] started", label, idx)
        out = fn(item)
        logger.info("[%s-%d] finished", label, idx)
        return out

    if workers <= 1:
        return [_wrapped(pair) for pair in enumerate(items)]

    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix=label) as executor:
        return list(executor.map(_wrapped, enumerate(items)))
