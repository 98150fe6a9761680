"""
Correlation models
"""
from dataclasses import dataclass, field
from typing import Optional, Dict, Any, Tuple

from ..exceptions import ToralValidationError


@dataclass(frozen=True)
class StructureSet:
    """Multiset of chain lengths l_j >= 2 with sum k, stored in descending order"""
    parts: Tuple[int, ...]

    def __post_init__(self):
        parts = tuple(sorted((int(p) for p in self.parts), reverse=True))
        if not parts or any(p < 2 for p in parts):
            raise ToralValidationError("structure set parts must all be at least 2")
        object.__setattr__(self, 'parts', parts)

    @property
    def k(self) -> int:
        return sum(self.parts)

    @property
    def is_gaussian(self) -> bool:
        """True for the all-2 structure behind the (k-1)!! moments"""
        return all(p == 2 for p in self.parts)

    def to_dict(self) -> Dict[str, Any]:
        return {'parts': list(self.parts), 'k': self.k}


@dataclass
class QuasiCorrelationCount:
    """|C_n(l; K)| together with the exact integer threshold used"""
    K: str
    norm_squared_bound: int
    count: int

    def to_dict(self) -> Dict[str, Any]:
        return {'K': self.K, 'norm_squared_bound': self.norm_squared_bound, 'count': self.count}


@dataclass
class CorrelationReport:
    """
    Exact correlation counts for one (n, d, l)

    Tuples are ordered: permutations of the same multiset are counted separately.
    """
    n: int
    d: int
    l: int
    N: int
    count_S: int
    count_D: int
    quasi: Optional[QuasiCorrelationCount] = None
    hypotheses: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.count_S < 0 or self.count_D < 0:
            raise ToralValidationError("correlation counts must be non-negative")
        if self.count_D > self.count_S:
            raise ToralValidationError("diagonal_inclusion violated: |D_n(l)| exceeds |S_n(l)|")

    @property
    def count_offdiag(self) -> int:
        return self.count_S - self.count_D

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            'n': self.n,
            'd': self.d,
            'l': self.l,
            'N': self.N,
            'count_S': self.count_S,
            'count_D': self.count_D,
            'count_offdiag': self.count_offdiag,
        }
        if self.quasi is not None:
            result['quasi'] = self.quasi.to_dict()
        if self.hypotheses:
            result['hypotheses'] = {name: value.to_dict() if hasattr(value, 'to_dict') else value
                                    for name, value in self.hypotheses.items()}
        return result
