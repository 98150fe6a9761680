"""
Correlation service: exact counts of zero-sum and small-sum lattice tuples

All tuples are ordered. Sums are compared through exact int64 keys, never
through floating point.
"""
import logging
import math
from collections import Counter
from fractions import Fraction
from typing import Dict, Any, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .base_service import BaseService
from ...exceptions import ToralValidationError
from ...executors import get_executor
from ...kernels import KeyPacker, fold_sums
from ...models import (
    LatticePointSet,
    StructureSet,
    QuasiCorrelationCount,
    CorrelationReport,
    HypothesisResult,
    parse_fraction,
)

logger = logging.getLogger(__name__)

_CHUNK_ELEMENTS = 1 << 22


def _digits(flat: int, N: int, h: int) -> Tuple[int, ...]:
    """Base-N digits of flat, most significant first"""
    out = []
    for _ in range(h):
        flat, digit = divmod(int(flat), N)
        out.append(digit)
    return tuple(reversed(out))


def _integer_root(value: int, q: int) -> int:
    """floor(value ** (1/q)) for a non-negative integer value"""
    if value < 2:
        return value
    root = int(math.exp(math.log(value) / q))
    while root ** q > value:
        root -= 1
    while (root + 1) ** q <= value:
        root += 1
    return root


class _FoldTable:
    """Distinct h-fold sums of a point set with their multiplicities"""

    def __init__(self, points: np.ndarray, h: int, packer: KeyPacker):
        self.N = points.shape[0]
        self.h = h
        sums = fold_sums(points, h)
        self.keys, self.first, self.counts = np.unique(
            packer.pack(sums), return_index=True, return_counts=True
        )
        self.vectors = sums[self.first]

    def __len__(self) -> int:
        return int(self.keys.shape[0])

    def lookup(self, keys: np.ndarray) -> np.ndarray:
        """Multiplicity of every key, 0 where absent"""
        pos = np.minimum(np.searchsorted(self.keys, keys), len(self) - 1)
        return np.where(self.keys[pos] == keys, self.counts[pos], 0)

    def tuple_of(self, row: int) -> Tuple[int, ...]:
        """Index tuple of the first ordered tuple realising distinct sum number row"""
        return _digits(self.first[row], self.N, self.h)


class CorrelationService(BaseService):
    """Spectral correlations S_n(l), D_n(l) and quasi-correlations C_n(l; K)"""

    def _split(self, lattice: LatticePointSet, l: int) -> Tuple[int, int, KeyPacker]:
        if int(l) != l or l < 2:
            raise ToralValidationError("tuple length l must be an integer >= 2")
        self._validate_lattice(lattice, min_points=0)
        h1, h2 = l // 2, l - l // 2
        packer = KeyPacker(h2 * math.isqrt(lattice.n), lattice.d)
        return h1, h2, packer

    def _count_zero_sums(self, lattice: LatticePointSet, l: int) -> int:
        h1, h2, packer = self._split(lattice, l)
        N = lattice.N
        if N == 0:
            return 0
        self._check_budget(N ** h1 + N ** h2, f"zero-sum enumeration for l={l}")
        left = _FoldTable(lattice.points, h1, packer)
        rest = fold_sums(lattice.points, h2 - 1)

        def join_row(i: int) -> int:
            keys = packer.negate(packer.pack(rest + lattice.points[i]))
            return int(left.lookup(keys).sum())

        return sum(get_executor(self.config).map(join_row, range(N)))

    def count_correlations(
        self, lattice: LatticePointSet, l: int, emit_tuples: bool = False
    ) -> Union[CorrelationReport, Tuple[CorrelationReport, List[Tuple[int, ...]]]]:
        """
        Exact |S_n(l)| by meet-in-the-middle, with |D_n(l)| for even l

        Args:
            lattice: E_n
            l: Tuple length, l >= 2
            emit_tuples: Also return every zero-sum tuple as canonical indices

        Returns:
            CorrelationReport, or (report, tuples) when emit_tuples is set

        Raises:
            ToralBudgetError: N^floor(l/2) + N^ceil(l/2) above the work budget
        """
        count_S = self._count_zero_sums(lattice, l)
        count_D = self.count_diagonal(lattice, l) if l % 2 == 0 else 0
        report = CorrelationReport(
            n=lattice.n, d=lattice.d, l=l, N=lattice.N, count_S=count_S, count_D=count_D
        )
        logger.info("E_%d (d=%d, N=%d): |S(%d)| = %d, |D(%d)| = %d",
                    lattice.n, lattice.d, lattice.N, l, count_S, l, count_D)
        if emit_tuples:
            return report, list(self.iter_correlation_tuples(lattice, l))
        return report

    def iter_correlation_tuples(self, lattice: LatticePointSet, l: int) -> Iterator[Tuple[int, ...]]:
        """
        Stream every ordered zero-sum l-tuple as canonical point indices

        Tuples are produced in increasing order of their last ceil(l/2)
        indices, then of their first floor(l/2) indices.
        """
        h1, h2, packer = self._split(lattice, l)
        N = lattice.N
        if N == 0:
            return
        self._check_budget(N ** h1 + N ** h2, f"zero-sum tuple stream for l={l}")
        left_keys = packer.pack(fold_sums(lattice.points, h1))
        order = np.argsort(left_keys, kind='stable')
        sorted_keys = left_keys[order]
        rest = fold_sums(lattice.points, h2 - 1)
        for i in range(N):
            wanted = packer.negate(packer.pack(rest + lattice.points[i]))
            lo = np.searchsorted(sorted_keys, wanted, side='left')
            hi = np.searchsorted(sorted_keys, wanted, side='right')
            for tail in np.nonzero(hi > lo)[0]:
                right = (i,) + _digits(tail, N, h2 - 1)
                for flat in order[lo[tail]:hi[tail]]:
                    yield _digits(flat, N, h1) + right

    def count_diagonal(self, lattice: LatticePointSet, l: int) -> int:
        """
        Exact |D_n(2k)|

        A tuple is diagonal iff each orbit {mu, -mu} appears as often as mu
        as it does as -mu, so |D_n(2k)| = (2k)! [y^k] (sum_j y^j / (j!)^2)^(N/2).

        Raises:
            ToralValidationError: l odd
        """
        if int(l) != l or l < 2 or l % 2:
            raise ToralValidationError("diagonal count needs an even l >= 2")
        self._validate_lattice(lattice, min_points=0)
        k = l // 2
        orbits = lattice.N // 2
        base = [Fraction(1, math.factorial(j) ** 2) for j in range(k + 1)]

        def multiply(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
            out = [Fraction(0)] * (k + 1)
            for i, x in enumerate(a):
                if x:
                    for j in range(k + 1 - i):
                        out[i + j] += x * b[j]
            return out

        result = [Fraction(1)] + [Fraction(0)] * k
        power = base
        e = orbits
        while e:
            if e & 1:
                result = multiply(result, power)
            power = multiply(power, power)
            e >>= 1
        count = result[k] * math.factorial(l)
        if count.denominator != 1:
            raise ToralValidationError("diagonal count is not an integer")
        return int(count)

    def is_diagonal(self, points: Sequence[Sequence[int]]) -> bool:
        """True iff every point occurs as often as its negation"""
        counts = Counter(tuple(int(c) for c in p) for p in points)
        return all(counts[tuple(-c for c in p)] == m for p, m in counts.items())

    def structure_set(
        self, points: Sequence[Sequence[int]], lattice: LatticePointSet
    ) -> Tuple[bool, Optional[StructureSet]]:
        """
        Admissibility and structure set of a 2k-tuple

        Admissible means diagonal with lambda_{2i-1} != -lambda_{2i}. The
        classes are generated by 2i-1 ~ 2i and j ~ j' whenever
        lambda_j + lambda_j' = 0; the parts are half the class sizes.

        Raises:
            ToralValidationError: odd length, or an entry outside the set
        """
        if len(points) == 0 or len(points) % 2:
            raise ToralValidationError("structure sets need a tuple of even length")
        rows = [tuple(int(c) for c in p) for p in points]
        for row in rows:
            lattice.index_of(row)
        if not self.is_diagonal(rows):
            return False, None
        negated = [tuple(-c for c in row) for row in rows]
        if any(rows[2 * i] == negated[2 * i + 1] for i in range(len(rows) // 2)):
            return False, None

        parent = list(range(len(rows)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        def union(i: int, j: int):
            parent[find(i)] = find(j)

        for i in range(0, len(rows), 2):
            union(i, i + 1)
        for i, row in enumerate(rows):
            for j in range(i + 1, len(rows)):
                if rows[j] == negated[i]:
                    union(i, j)
        sizes = Counter(find(i) for i in range(len(rows)))
        return True, StructureSet(tuple(size // 2 for size in sizes.values()))

    def enumerate_structure_sets(self, k: int) -> List[StructureSet]:
        """All multisets of parts >= 2 summing to k, largest first part first"""
        if k < 2:
            raise ToralValidationError("structure sets need k >= 2")

        def partitions(total: int, largest: int) -> Iterator[Tuple[int, ...]]:
            if total == 0:
                yield ()
                return
            for part in range(min(total, largest), 1, -1):
                for tail in partitions(total - part, part):
                    yield (part,) + tail

        return [StructureSet(parts) for parts in partitions(k, k)]

    def _quasi_scan(
        self, lattice: LatticePointSet, l: int, bound: int, want_witness: bool = False
    ) -> Tuple[int, Optional[Tuple[int, ...]]]:
        h1, h2, packer = self._split(lattice, l)
        N = lattice.N
        if N == 0 or bound < 1:
            return 0, None
        self._check_budget(N ** h1 + N ** h2, f"quasi-correlation tables for l={l}")
        left = _FoldTable(lattice.points, h1, packer)
        right = _FoldTable(lattice.points, h2, packer)
        self._check_budget(len(left) * len(right), f"quasi-correlation ball join for l={l}")

        count = 0
        step = max(1, _CHUNK_ELEMENTS // max(1, len(right) * lattice.d))
        for start in range(0, len(left), step):
            sums = left.vectors[start:start + step, None, :] + right.vectors[None, :, :]
            sq = (sums * sums).sum(axis=2)
            hit = (sq > 0) & (sq <= bound)
            if not hit.any():
                continue
            if want_witness:
                row, col = np.argwhere(hit)[0]
                return 1, left.tuple_of(start + int(row)) + right.tuple_of(int(col))
            weights = left.counts[start:start + step, None] * right.counts[None, :]
            count += int(weights[hit].sum())
        return count, None

    def count_quasi_correlations(self, lattice: LatticePointSet, l: int, K) -> CorrelationReport:
        """
        Count ordered l-tuples with 0 < ||sum|| <= K

        K is read as an exact rational and compared through floor(K^2).

        Raises:
            ToralValidationError: K outside (0, l*sqrt(n)]
            ToralBudgetError: table or join size above the work budget
        """
        K = parse_fraction(K, 'K')
        if K <= 0 or K * K > l * l * lattice.n:
            raise ToralValidationError("K must lie in (0, l*sqrt(n)]")
        bound = math.floor(K * K)
        count, _ = self._quasi_scan(lattice, l, bound)
        report = self.count_correlations(lattice, l)
        report.quasi = QuasiCorrelationCount(K=str(K), norm_squared_bound=bound, count=count)
        return report

    def separation_bound(self, n: int, delta) -> int:
        """floor(n^(1 - 2 delta)) in exact integer arithmetic"""
        delta = parse_fraction(delta, 'delta')
        if delta <= 0:
            raise ToralValidationError("delta must be positive")
        if n == 1:
            return 1
        exponent = 1 - 2 * delta
        if exponent < 0:
            return 0
        return _integer_root(n ** exponent.numerator, exponent.denominator)

    def check_hypothesis_A(self, lattice: LatticePointSet, l: int, delta) -> HypothesisResult:
        """
        (l, delta)-separateness: no l-tuple has 0 < ||sum|| <= n^(1/2 - delta)

        A found witness is rechecked in Python integers before it is returned.
        """
        bound = self.separation_bound(lattice.n, delta)
        _, found = self._quasi_scan(lattice, l, bound, want_witness=True)
        details: Dict[str, Any] = {'l': l, 'delta': str(parse_fraction(delta, 'delta')), 'norm_squared_bound': bound}
        if found is None:
            return HypothesisResult(name='A', holds=True, details=details)
        witness = [[int(c) for c in lattice.points[i]] for i in found]
        total = [sum(column) for column in zip(*witness)]
        norm_sq = sum(c * c for c in total)
        if not 0 < norm_sq <= bound:
            raise ToralValidationError("separateness witness failed its exact recheck")
        details['witness_norm_squared'] = norm_sq
        return HypothesisResult(name='A', holds=False, witness=witness, details=details)

    def check_diagonal_domination(self, lattice: LatticePointSet, l: int, gamma: float) -> float:
        """(|S_n(l)| - |D_n(l)|) / N^(l/2 - gamma); the constant is left to the caller"""
        if l % 2:
            raise ToralValidationError("diagonal domination needs an even l")
        self._validate_positive(gamma, 'gamma')
        report = self.count_correlations(lattice, l)
        if lattice.N == 0:
            return 0.0
        return report.count_offdiag / float(lattice.N) ** (l / 2.0 - gamma)

    def correlation_report(
        self,
        lattice: LatticePointSet,
        l: int,
        K=None,
        delta=None,
        gamma: Optional[float] = None
    ) -> CorrelationReport:
        """Counts for one (n, d, l) with the optional quasi count and hypothesis checks"""
        if K is not None and delta is not None:
            raise ToralValidationError("give either K or delta, not both")
        if K is not None:
            report = self.count_quasi_correlations(lattice, l, K)
        else:
            report = self.count_correlations(lattice, l)
        if delta is not None:
            result = self.check_hypothesis_A(lattice, l, delta)
            report.hypotheses['A'] = result
        if gamma is not None:
            margin = report.count_offdiag / float(max(lattice.N, 1)) ** (l / 2.0 - gamma)
            report.hypotheses['diagonal_domination'] = {'gamma': gamma, 'margin': margin}
        return report
