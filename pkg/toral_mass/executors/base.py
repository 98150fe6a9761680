"""
Base executor adapter interface

All executor adapters must implement this interface. Results are always
returned in submission order, which is what makes reductions independent
of the thread count.
"""
from abc import ABC, abstractmethod
from typing import Any, Callable, Iterable, List


class ExecutorAdapter(ABC):
    """
    Abstract base class for executor adapters
    """

    @property
    @abstractmethod
    def threads(self) -> int:
        """Number of workers"""
        pass

    @abstractmethod
    def map(self, fn: Callable[[Any], Any], items: Iterable[Any]) -> List[Any]:
        """
        Apply fn to every item

        Args:
            fn: Pure function of one item
            items: Work items

        Returns:
            Results in the order of items
        """
        pass

    @abstractmethod
    def shutdown(self) -> None:
        """Release worker resources"""
        pass
