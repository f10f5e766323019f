import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List, Tuple, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")

# Thread pools shared by estimators and the design search, one per worker count
_executors: Dict[int, ThreadPoolExecutor] = {}
_lock = threading.Lock()


def get_executor(workers: int) -> ThreadPoolExecutor:
    with _lock:
        executor = _executors.get(workers)
        if executor is None:
            executor = ThreadPoolExecutor(max_workers=workers, thread_name_prefix="fidelium")
            _executors[workers] = executor
        return executor


def shard_ranges(total: int, shards: int) -> List[Tuple[int, int]]:
    """Split the counter range [0, total) into contiguous (start, stop) pieces."""
    shards = max(1, min(shards, total))
    bounds = [total * i // shards for i in range(shards + 1)]
    return [(bounds[i], bounds[i + 1]) for i in range(shards) if bounds[i] < bounds[i + 1]]


def run_ordered(fn: Callable[..., T], jobs: Iterable[tuple], workers: int = 1) -> List[T]:
    """Run fn(*job) for every job and return results in job order.

    With a single worker everything runs inline on the calling thread.
    """
    jobs = list(jobs)
    if workers <= 1 or len(jobs) <= 1:
        return [fn(*job) for job in jobs]
    executor = get_executor(workers)
    futures = [executor.submit(fn, *job) for job in jobs]
    return [future.result() for future in futures]
