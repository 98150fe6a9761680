"""
Pair-distance service: distributions of distances between projected lattice points
"""
import itertools
import logging
import math
from typing import Optional, Sequence, Union

import numpy as np

from .base_service import BaseService
from ...exceptions import ToralValidationError
from ...models import LatticePointSet, CoefficientVector, PairDistanceVariant, parse_fraction

logger = logging.getLogger(__name__)

_CHUNK_ELEMENTS = 1 << 22


class PairDistanceService(BaseService):
    """F, F_lambda0, F3 and close-pair counts"""

    def _threshold(self, s, n: int) -> int:
        """floor(s^2 n): |l^ - l'^| <= s iff |l - l'|^2 <= s^2 n, compared on integers"""
        s = parse_fraction(s, 's')
        if not 0 <= s <= 2:
            raise ToralValidationError("s must lie in [0, 2]")
        return math.floor(s * s * n)

    def _squared_distances(self, points: np.ndarray, rows: np.ndarray) -> np.ndarray:
        diff = points[rows][:, None, :] - points[None, :, :]
        return (diff * diff).sum(axis=2)

    def pair_distance_distribution(
        self,
        source: Union[CoefficientVector, LatticePointSet],
        s,
        variant: PairDistanceVariant = PairDistanceVariant.F,
        lambda0: Optional[Sequence[int]] = None
    ) -> float:
        """
        Exact pair-distance distributions on the unit circle or sphere

        F(s) = sum over 0 < |l^ - l'^| <= s of |c_l|^2 |c_l'|^2 (needs a coefficient vector, d=2)
        F_lambda0(s) = #{l : |l^ - lambda0^| <= s} / N (d=2)
        F3(s) = #{l != l' : |l^ - l'^| <= s} / N^2 (d=3)
        """
        variant = PairDistanceVariant(variant)
        lattice = source.lattice if isinstance(source, CoefficientVector) else source
        self._validate_lattice(lattice)
        bound = self._threshold(s, lattice.n)
        P = lattice.points

        if variant is PairDistanceVariant.F:
            if lattice.d != 2:
                raise ToralValidationError("F is defined for d=2")
            if not isinstance(source, CoefficientVector):
                raise ToralValidationError("F needs a coefficient vector")
            v = source.squared_moduli()
            total = 0.0
            step = max(1, _CHUNK_ELEMENTS // lattice.N)
            for start in range(0, lattice.N, step):
                rows = np.arange(start, min(lattice.N, start + step))
                sq = self._squared_distances(P, rows)
                close = (sq > 0) & (sq <= bound)
                total += float(v[rows] @ (close * v[None, :]).sum(axis=1))
            return total

        if variant is PairDistanceVariant.F_LAMBDA0:
            if lattice.d != 2:
                raise ToralValidationError("F_lambda0 is defined for d=2")
            if lambda0 is None:
                raise ToralValidationError("F_lambda0 needs lambda0")
            index = lattice.index_of(lambda0)
            sq = self._squared_distances(P, np.array([index]))[0]
            return float(np.count_nonzero(sq <= bound)) / lattice.N

        if lattice.d != 3:
            raise ToralValidationError("F3 is defined for d=3")
        count = 0
        step = max(1, _CHUNK_ELEMENTS // lattice.N)
        for start in range(0, lattice.N, step):
            rows = np.arange(start, min(lattice.N, start + step))
            sq = self._squared_distances(P, rows)
            count += int(np.count_nonzero((sq > 0) & (sq <= bound)))
        return count / float(lattice.N) ** 2

    def pair_distance_curve(
        self,
        source: Union[CoefficientVector, LatticePointSet],
        grid: Sequence[float],
        variant: PairDistanceVariant = PairDistanceVariant.F,
        lambda0: Optional[Sequence[int]] = None
    ) -> np.ndarray:
        """The distribution evaluated at every s of a grid"""
        return np.array([self.pair_distance_distribution(source, s, variant, lambda0) for s in grid])

    def close_pair_count(self, points: np.ndarray, T: float) -> int:
        """
        Ordered pairs i != j of unit vectors with |x_i - x_j| <= 1/T

        Circle points are swept in angular order; sphere points are binned
        in a grid of cell width 1/T and compared with the 27 neighbouring cells.

        Raises:
            ToralValidationError: T <= 1 or points not of dimension 2 or 3
        """
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] not in (2, 3):
            raise ToralValidationError("points must be an (M, 2) or (M, 3) array")
        if not T > 1:
            raise ToralValidationError("T must exceed 1")
        radius = 1.0 / T
        M = points.shape[0]
        if M < 2:
            return 0

        if points.shape[1] == 2:
            angles = np.sort(np.mod(np.arctan2(points[:, 1], points[:, 0]), 2.0 * math.pi))
            # chord <= 1/T iff arc <= 2 asin(1/(2T))
            limit = 2.0 * math.asin(min(1.0, radius / 2.0))
            count = 0
            for offset in range(1, M):
                gaps = np.mod(np.roll(angles, -offset) - angles, 2.0 * math.pi)
                within = int(np.count_nonzero(gaps <= limit))
                if within == 0:
                    break
                count += within
            return 2 * count

        cells = np.floor(points / radius).astype(np.int64)
        unique_cells, inverse, counts = np.unique(cells, axis=0, return_inverse=True, return_counts=True)
        inverse = inverse.reshape(-1)
        order = np.argsort(inverse, kind='stable')
        sorted_points = points[order]
        cell_of = inverse[order]
        starts = np.cumsum(counts) - counts

        # shifted so every neighbour cell packs to a non-negative key; keys of unique_cells stay sorted
        low = unique_cells.min(axis=0) - 1
        base = int((unique_cells.max(axis=0) - low).max()) + 2

        def pack(c: np.ndarray) -> np.ndarray:
            shifted = c - low
            return (shifted[:, 0] * base + shifted[:, 1]) * base + shifted[:, 2]

        keys = pack(unique_cells)
        r2 = radius * radius
        count = 0
        for offset in itertools.product((-1, 0, 1), repeat=3):
            target = pack(unique_cells + np.array(offset, dtype=np.int64))
            slot = np.minimum(np.searchsorted(keys, target), keys.shape[0] - 1)
            found = keys[slot] == target
            per_point = np.where(found, counts[slot], 0)[cell_of]
            total = int(per_point.sum())
            if total == 0:
                continue
            first = np.where(found, starts[slot], 0)[cell_of]
            i = np.repeat(np.arange(M), per_point)
            j = np.repeat(first - (np.cumsum(per_point) - per_point), per_point) + np.arange(total)
            diff = sorted_points[i] - sorted_points[j]
            count += int(np.count_nonzero(np.einsum('ij,ij->i', diff, diff) <= r2))
        # the zero offset pairs every point with itself
        return count - M
