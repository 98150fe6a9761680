"""
Thread pool executor adapter

numpy releases the GIL inside its array kernels, so a thread pool is enough
to spread sampling and tuple joins across cores.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Iterable, List

from .base import ExecutorAdapter


class ThreadPoolAdapter(ExecutorAdapter):
    """ExecutorAdapter backed by concurrent.futures.ThreadPoolExecutor"""

    def __init__(self, threads: int):
        """
        Initialize the pool

        Args:
            threads: Number of worker threads (>= 1)
        """
        if threads < 1:
            raise ValueError("threads must be positive")
        self._threads = threads
        self._pool = ThreadPoolExecutor(max_workers=threads, thread_name_prefix='toral-mass')

    @property
    def threads(self) -> int:
        return self._threads

    def map(self, fn: Callable[[Any], Any], items: Iterable[Any]) -> List[Any]:
        futures = [self._pool.submit(fn, item) for item in items]
        return [future.result() for future in futures]

    def shutdown(self) -> None:
        self._pool.shutdown(wait=True)
