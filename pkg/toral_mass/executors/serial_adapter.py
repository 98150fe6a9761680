"""
Single-threaded executor adapter
"""
from typing import Any, Callable, Iterable, List

from .base import ExecutorAdapter


class SerialAdapter(ExecutorAdapter):
    """Runs every item in the calling thread"""

    @property
    def threads(self) -> int:
        return 1

    def map(self, fn: Callable[[Any], Any], items: Iterable[Any]) -> List[Any]:
        return [fn(item) for item in items]

    def shutdown(self) -> None:
        pass
