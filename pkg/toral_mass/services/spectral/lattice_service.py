"""
Lattice service: lattice points on circles and spheres and their equidistribution
"""
import logging
import math
from typing import Dict, Any, Optional, Sequence, Tuple

import numpy as np

from .base_service import BaseService
from ...exceptions import ToralMassError, ToralValidationError, ToralComputationError
from ...kernels import uniform_block, Stream
from ...models import LatticePointSet, DiscrepancyResult, HypothesisResult, DiscrepancyMode

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
HALF_LOG_HALF_PI = 0.5 * math.log(math.pi / 2.0)
_CHUNK_ELEMENTS = 1 << 22


def _isqrt_array(values: np.ndarray) -> np.ndarray:
    """Elementwise floor(sqrt(v)) for non-negative int64 values, corrected to be exact"""
    root = np.floor(np.sqrt(values.astype(np.float64))).astype(np.int64)
    root[(root + 1) * (root + 1) <= values] += 1
    root[root * root > values] -= 1
    return root


def _row_chunk(columns: int) -> int:
    return max(1, _CHUNK_ELEMENTS // max(columns, 1))


class LatticeService(BaseService):
    """Enumeration of E_n, angular and spherical-cap discrepancy"""

    def enumerate_lattice_points(self, n: int, d: int) -> LatticePointSet:
        """
        All integer solutions of a_1^2 + ... + a_d^2 = n in canonical order

        Args:
            n: Squared radius, n >= 1
            d: Dimension, 2 or 3

        Returns:
            LatticePointSet; empty when n is not a sum of d squares
        """
        self._validate_dimension(d)
        if int(n) != n or n < 1:
            raise ToralValidationError("n must be a positive integer")
        n = int(n)
        m = math.isqrt(n)

        if d == 2:
            a = np.arange(-m, m + 1, dtype=np.int64)
            rest = n - a * a
            b = _isqrt_array(rest)
            hit = b * b == rest
            a, b = a[hit], b[hit]
            pos = np.stack([a, b], axis=1)
            neg = np.stack([a[b > 0], -b[b > 0]], axis=1)
            points = np.concatenate([pos, neg]) if pos.size else np.empty((0, 2), dtype=np.int64)
            angles = np.mod(np.arctan2(points[:, 1], points[:, 0]), TWO_PI)
            order = np.argsort(angles, kind='stable')
            return LatticePointSet(n=n, d=2, points=points[order], angles=angles[order])

        rows = []
        for a in range(-m, m + 1):
            rest_a = n - a * a
            mb = math.isqrt(rest_a)
            b = np.arange(-mb, mb + 1, dtype=np.int64)
            rest = rest_a - b * b
            c = _isqrt_array(rest)
            hit = c * c == rest
            b, c = b[hit], c[hit]
            if not b.size:
                continue
            col_a = np.full(b.shape, a, dtype=np.int64)
            rows.append(np.stack([col_a, b, c], axis=1))
            pos = c > 0
            rows.append(np.stack([col_a[pos], b[pos], -c[pos]], axis=1))
        if not rows:
            return LatticePointSet(n=n, d=3, points=np.empty((0, 3), dtype=np.int64))
        points = np.concatenate(rows)
        order = np.lexsort((points[:, 2], points[:, 1], points[:, 0]))
        return LatticePointSet(n=n, d=3, points=points[order])

    def is_sum_of_squares(self, n: int, d: int) -> bool:
        """
        True iff n is a sum of d integer squares

        d=3 uses the three-square criterion (n is not 4^a (8b + 7));
        d=2 scans a <= sqrt(n/2) and stops at the first hit.
        """
        self._validate_dimension(d)
        if int(n) != n or n < 1:
            raise ToralValidationError("n must be a positive integer")
        n = int(n)
        if d == 3:
            while n % 4 == 0:
                n //= 4
            return n % 8 != 7
        for a in range(math.isqrt(n // 2) + 1):
            b = math.isqrt(n - a * a)
            if b * b == n - a * a:
                return True
        return False

    def discrepancy_from_angles(self, angles: Sequence[float]) -> DiscrepancyResult:
        """
        Exact sup over closed arcs of |count / N - length / 2pi|

        Over-counts are attained by closed arcs between two data angles,
        under-counts by open arcs between two data angles, so scanning all
        ordered endpoint pairs in both forms is exact.

        Args:
            angles: Distinct angles; reduced mod 2pi and sorted

        Returns:
            DiscrepancyResult with exact=True
        """
        phi = np.sort(np.mod(np.asarray(angles, dtype=np.float64).reshape(-1), TWO_PI))
        N = phi.shape[0]
        if N == 0:
            raise ToralValidationError("discrepancy needs at least one angle")
        if not np.all(np.isfinite(phi)):
            raise ToralValidationError("angles must be finite")
        if N > 1 and not np.all(np.diff(phi) > 0):
            raise ToralValidationError("angles must be distinct modulo 2pi")

        best = (-1.0, 0, 0, 'closed')
        cols = np.arange(N)
        step = _row_chunk(N)
        for start in range(0, N, step):
            rows = np.arange(start, min(N, start + step))
            k = (cols[None, :] - rows[:, None]) % N
            length = np.mod(phi[None, :] - phi[rows][:, None], TWO_PI) / TWO_PI
            over = (k + 1) / N - length
            under = length - (k - 1) / N
            for values, form in ((over, 'closed'), (under, 'open')):
                flat = int(np.argmax(values))
                value = float(values.flat[flat])
                if value > best[0]:
                    i, j = divmod(flat, N)
                    best = (value, int(rows[i]), j, form)

        value, i, j, form = best
        witness = {
            'start': float(phi[i]),
            'end': float(phi[j]),
            'form': form,
        }
        return DiscrepancyResult(value=value, witness=witness, exact=True)

    def angular_discrepancy(self, lattice: LatticePointSet) -> DiscrepancyResult:
        """Delta(n) of the lattice angles; d=2 only"""
        self._validate_lattice(lattice, d=2)
        return self.discrepancy_from_angles(lattice.angles)

    def check_hypothesis_D(self, lattice: LatticePointSet, epsilon: float) -> HypothesisResult:
        """
        Delta(n) <= (log n)^(-log(pi/2)/2 + epsilon)

        Raises:
            ToralValidationError: n <= 2, epsilon <= 0 or d != 2
        """
        self._validate_lattice(lattice, d=2)
        if lattice.n <= 2:
            raise ToralValidationError("hypothesis D needs n >= 3 so that log n > 1")
        self._validate_positive(epsilon, 'epsilon')
        threshold = math.log(lattice.n) ** (-HALF_LOG_HALF_PI + epsilon)
        discrepancy = self.angular_discrepancy(lattice).value
        margin = threshold - discrepancy
        return HypothesisResult(
            name='D',
            holds=discrepancy <= threshold,
            margin=margin,
            details={'discrepancy': discrepancy, 'threshold': threshold, 'epsilon': epsilon},
        )

    def spherical_cap_discrepancy(
        self,
        lattice: LatticePointSet,
        mode: DiscrepancyMode = DiscrepancyMode.EXACT,
        samples: int = 4096,
        seed: int = 0
    ) -> DiscrepancyResult:
        """
        Spherical-cap discrepancy Delta_3(n) of the projected points

        Args:
            lattice: Set with d=3
            mode: exact scans every cap whose boundary circle passes through
                one, two or three points; sampled draws uniform centres
            samples: Number of centres in sampled mode
            seed: Seed of the centre stream in sampled mode

        Returns:
            DiscrepancyResult; exact=False in sampled mode (a lower bound)

        Raises:
            ToralBudgetError: exact mode with N above exact_cap_bound
        """
        self._validate_lattice(lattice, d=3)
        mode = DiscrepancyMode(mode)
        try:
            if mode is DiscrepancyMode.EXACT:
                self._check_budget(lattice.N, 'exact spherical-cap scan (points)', self.config.get_exact_cap_bound())
                return self._cap_discrepancy_exact(lattice)
            if samples < 1:
                raise ToralValidationError("samples must be positive")
            return self._cap_discrepancy_sampled(lattice, int(samples), int(seed))
        except ToralMassError:
            raise
        except (FloatingPointError, ValueError, ArithmeticError) as e:
            raise ToralComputationError(f"spherical-cap discrepancy failed: {str(e)}")

    def _cap_discrepancy_exact(self, lattice: LatticePointSet) -> DiscrepancyResult:
        P = lattice.points
        N = lattice.N
        sqrt_n = math.sqrt(lattice.n)
        best: Dict[str, Any] = {'value': -1.0}

        def scan(normals: np.ndarray, heights: np.ndarray):
            keep = np.any(normals != 0, axis=1)
            normals, heights = normals[keep], heights[keep]
            step = _row_chunk(N)
            for start in range(0, normals.shape[0], step):
                C = normals[start:start + step]
                h = heights[start:start + step]
                dots = C @ P.T
                ge = (dots >= h[:, None]).sum(axis=1)
                gt = (dots > h[:, None]).sum(axis=1)
                le = N - gt
                lt = N - ge
                norms = np.sqrt((C * C).sum(axis=1).astype(np.float64))
                t = np.clip(h / (norms * sqrt_n), -1.0, 1.0)
                area = (1.0 - t) / 2.0
                candidates = (
                    (ge / N - area, 1.0, 'closed'),
                    (area - gt / N, 1.0, 'open'),
                    (le / N - (1.0 - area), -1.0, 'closed'),
                    ((1.0 - area) - lt / N, -1.0, 'open'),
                )
                for values, sign, form in candidates:
                    idx = int(np.argmax(values))
                    if values[idx] > best['value']:
                        centre = sign * C[idx] / norms[idx]
                        height = float(sign * t[idx])
                        best.update(
                            value=float(values[idx]),
                            centre=[float(x) for x in centre],
                            height=height,
                            chordal_radius=math.sqrt(max(0.0, 2.0 * (1.0 - height))),
                            form=form,
                        )

        # caps centred at a point, boundary through another point
        scan(np.repeat(P, N, axis=0), (P @ P.T).reshape(-1))

        # caps whose boundary passes through two points
        i, j = np.triu_indices(N, k=1)
        C = P[i] + P[j]
        scan(C, (C * P[i]).sum(axis=1))

        # caps whose boundary passes through three points
        for a in range(N - 2):
            j, k = np.triu_indices(N - a - 1, k=1)
            j, k = j + a + 1, k + a + 1
            C = np.cross(P[j] - P[a], P[k] - P[a])
            scan(C, C @ P[a])

        witness = {key: best[key] for key in ('centre', 'height', 'chordal_radius', 'form')}
        return DiscrepancyResult(value=best['value'], witness=witness, exact=True)

    def _cap_discrepancy_sampled(self, lattice: LatticePointSet, samples: int, seed: int) -> DiscrepancyResult:
        U = lattice.unit_vectors()
        N = lattice.N
        u = uniform_block(seed, Stream.CAP_CENTRES, 0, samples, width=2)
        z = 1.0 - 2.0 * u[:, 0]
        phi = TWO_PI * u[:, 1]
        s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
        centres = np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=1)

        rank = np.arange(N)
        best_value, best_centre, best_height, best_form = -1.0, None, 0.0, 'closed'
        step = _row_chunk(N)
        for start in range(0, samples, step):
            block = centres[start:start + step]
            dots = np.sort(block @ U.T, axis=1)
            area = (1.0 - dots) / 2.0
            over = (N - rank)[None, :] / N - area
            under = area - (N - rank - 1)[None, :] / N
            for values, form in ((over, 'closed'), (under, 'open')):
                flat = int(np.argmax(values))
                if values.flat[flat] > best_value:
                    row, col = divmod(flat, N)
                    best_value = float(values.flat[flat])
                    best_centre = block[row]
                    best_height = float(dots[row, col])
                    best_form = form

        witness = {
            'centre': [float(x) for x in best_centre],
            'height': best_height,
            'chordal_radius': math.sqrt(max(0.0, 2.0 * (1.0 - best_height))),
            'form': best_form,
            'samples': samples,
            'seed': seed,
        }
        return DiscrepancyResult(value=best_value, witness=witness, exact=False)

    def cap_discrepancy_ratio(self, result: DiscrepancyResult, n: int, eta: float) -> float:
        """Delta_3(n) * n^eta for a user-supplied exponent eta"""
        if n < 1:
            raise ToralValidationError("n must be a positive integer")
        return result.value * float(n) ** eta

    def nearest_neighbor_clockwise(self, lattice: LatticePointSet, point: Sequence[int]) -> Tuple[int, int]:
        """
        The angular successor of point in decreasing-angle order, wrapping

        Raises:
            ToralValidationError: point not in the set, or N = 1
        """
        self._validate_lattice(lattice, d=2, min_points=2)
        index = lattice.index_of(point)
        successor = lattice.points[(index - 1) % lattice.N]
        return int(successor[0]), int(successor[1])

    def minimal_gap(self, lattice: LatticePointSet) -> float:
        """Smallest Euclidean distance between two distinct points"""
        self._validate_lattice(lattice, min_points=2)
        P = lattice.points
        if lattice.d == 2:
            diff = P - np.roll(P, 1, axis=0)
            return math.sqrt(int((diff * diff).sum(axis=1).min()))
        best: Optional[int] = None
        step = _row_chunk(lattice.N)
        for start in range(0, lattice.N, step):
            block = P[start:start + step]
            diff = block[:, None, :] - P[None, :, :]
            sq = (diff * diff).sum(axis=2)
            sq[sq == 0] = np.iinfo(np.int64).max
            value = int(sq.min())
            best = value if best is None else min(best, value)
        return math.sqrt(best)
