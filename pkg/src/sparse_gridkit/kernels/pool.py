import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, Iterable, List, TypeVar

T = TypeVar("T")

# below this much work a launch runs inline: thread hand-off costs more than it saves
PARALLEL_THRESHOLD = 32768

_EXECUTORS: Dict[int, ThreadPoolExecutor] = {}
_LOCK = threading.Lock()


def get_executor(worker_count: int) -> ThreadPoolExecutor:
    """Shared executor per pool size"""
    with _LOCK:
        executor = _EXECUTORS.get(worker_count)
        if executor is None:
            executor = ThreadPoolExecutor(max_workers=worker_count, thread_name_prefix=f"gridkit-{worker_count}")
            _EXECUTORS[worker_count] = executor
        return executor


def run_tasks(fn: Callable[[T], None], tasks: Iterable[T], worker_count: int, work: int = 0) -> None:
    """Run fn over tasks and block until all finish.

    Tasks must write disjoint outputs; the result is then independent of how
    many threads ran them.
    """
    tasks: List[T] = list(tasks)
    if worker_count <= 1 or len(tasks) <= 1 or work < PARALLEL_THRESHOLD:
        for task in tasks:
            fn(task)
        return
    # list() re-raises the first task error in the caller
    list(get_executor(worker_count).map(fn, tasks))


def shutdown_pools() -> None:
    with _LOCK:
        for executor in _EXECUTORS.values():
            executor.shutdown(wait=True)
        _EXECUTORS.clear()
