"""
Lattice point models
"""
from dataclasses import dataclass, field
from typing import Optional, Dict, Any, List, Sequence, Tuple

import numpy as np

from ..exceptions import ToralValidationError


@dataclass(frozen=True, eq=False)
class LatticePointSet:
    """
    The set E_n of integer d-vectors of squared norm n

    Points are stored in canonical order: ascending angle for d=2,
    lexicographic for d=3. The arrays are read-only.
    """
    n: int
    d: int
    points: np.ndarray
    angles: Optional[np.ndarray] = None
    _index: Dict[Tuple[int, ...], int] = field(init=False, repr=False)
    _antipodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ToralValidationError(f"dimension must be 2 or 3, got {self.d}")
        if self.n < 1:
            raise ToralValidationError("n must be a positive integer")
        points = np.asarray(self.points, dtype=np.int64).reshape(-1, self.d).copy()
        points.setflags(write=False)
        object.__setattr__(self, 'points', points)

        if points.shape[0] and not np.all((points * points).sum(axis=1) == self.n):
            raise ToralValidationError("lattice invariant violated: every point must have squared norm n")
        index = {tuple(int(c) for c in row): i for i, row in enumerate(points)}
        if len(index) != points.shape[0]:
            raise ToralValidationError("lattice invariant violated: points must be distinct")
        try:
            antipodes = np.array([index[tuple(-int(c) for c in row)] for row in points], dtype=np.int64)
        except KeyError:
            raise ToralValidationError("lattice invariant violated: set must be closed under negation")
        antipodes.setflags(write=False)
        object.__setattr__(self, '_index', index)
        object.__setattr__(self, '_antipodes', antipodes)

        if self.d == 2:
            angles = self.angles
            if angles is None:
                angles = np.mod(np.arctan2(points[:, 1], points[:, 0]), 2.0 * np.pi)
            angles = np.asarray(angles, dtype=np.float64).copy()
            if angles.shape != (points.shape[0],):
                raise ToralValidationError("lattice invariant violated: one angle per point")
            if angles.size > 1 and not np.all(np.diff(angles) > 0):
                raise ToralValidationError("lattice invariant violated: angles must be strictly increasing")
            angles.setflags(write=False)
            object.__setattr__(self, 'angles', angles)
        elif self.angles is not None:
            raise ToralValidationError("angles are only defined for d=2")

    @property
    def N(self) -> int:
        """Cardinality of the set"""
        return int(self.points.shape[0])

    @property
    def antipodes(self) -> np.ndarray:
        """antipodes[i] is the index of -points[i]"""
        return self._antipodes

    def contains(self, point: Sequence[int]) -> bool:
        return tuple(int(c) for c in point) in self._index

    def index_of(self, point: Sequence[int]) -> int:
        """
        Position of a point in canonical order

        Raises:
            ToralValidationError: Point not in the set
        """
        key = tuple(int(c) for c in point)
        if len(key) != self.d or key not in self._index:
            raise ToralValidationError(f"point {list(key)} is not in E_{self.n}")
        return self._index[key]

    def unit_vectors(self) -> np.ndarray:
        """Points projected to the unit sphere"""
        return self.points / np.sqrt(float(self.n))

    def to_dict(self, include_points: bool = True) -> Dict[str, Any]:
        """Convert to dictionary"""
        result: Dict[str, Any] = {'n': self.n, 'd': self.d, 'N': self.N}
        if include_points:
            result['points'] = self.points.tolist()
            if self.angles is not None:
                result['angles'] = self.angles.tolist()
        return result


@dataclass
class DiscrepancyResult:
    """
    Discrepancy value with its extremal arc or cap

    For d=2 the witness holds the arc endpoints; for d=3 the cap centre,
    height t (cap = {u : <u, centre> >= t}) and chordal radius.
    """
    value: float
    witness: Dict[str, Any]
    exact: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            'value': self.value,
            'exact': self.exact,
            'witness': self.witness,
        }


@dataclass
class HypothesisResult:
    """Outcome of an arithmetic hypothesis check for one n"""
    name: str
    holds: bool
    margin: Optional[float] = None
    witness: Optional[List[List[int]]] = None
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {'name': self.name, 'holds': self.holds}
        if self.margin is not None:
            result['margin'] = self.margin
        if self.witness is not None:
            result['witness'] = self.witness
        result.update(self.details)
        return result
