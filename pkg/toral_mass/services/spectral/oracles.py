"""
Brute-force reference counts and sums

These enumerate every ordered tuple directly and are only meant for small
sets; they back the equivalence self-test and the test suite.
"""
import itertools
import math

import numpy as np

from ...kernels import g_kernel
from ...models import LatticePointSet, CoefficientVector


def _tuple_sums(points: np.ndarray, l: int):
    """Yield (prefix, sums) where sums[i, j] is the tuple sum for prefix + (i, j)"""
    N, d = points.shape
    pair_sums = points[:, None, :] + points[None, :, :]
    for prefix in itertools.product(range(N), repeat=l - 2):
        offset = points[list(prefix)].sum(axis=0) if prefix else np.zeros(d, dtype=np.int64)
        yield prefix, pair_sums + offset


def brute_force_zero_sums(lattice: LatticePointSet, l: int) -> int:
    """|S_n(l)| by scanning all N^l ordered tuples"""
    if lattice.N == 0 or l < 2:
        return 0
    return sum(int(np.count_nonzero(np.all(s == 0, axis=2))) for _, s in _tuple_sums(lattice.points, l))


def brute_force_quasi(lattice: LatticePointSet, l: int, norm_squared_bound: int) -> int:
    """Ordered l-tuples with 0 < |sum|^2 <= norm_squared_bound"""
    if lattice.N == 0:
        return 0
    total = 0
    for _, s in _tuple_sums(lattice.points, l):
        sq = (s * s).sum(axis=2)
        total += int(np.count_nonzero((sq > 0) & (sq <= norm_squared_bound)))
    return total


def brute_force_diagonal(lattice: LatticePointSet, l: int) -> int:
    """|D_n(l)| by testing antipodal balance of every zero-sum tuple"""
    if lattice.N == 0 or l % 2:
        return 0
    antipodes = lattice.antipodes
    count = 0
    for prefix, s in _tuple_sums(lattice.points, l):
        for i, j in zip(*np.nonzero(np.all(s == 0, axis=2))):
            indices = list(prefix) + [int(i), int(j)]
            balance = {}
            for index in indices:
                key = min(index, int(antipodes[index]))
                balance[key] = balance.get(key, 0) + (1 if index == key else -1)
            if all(value == 0 for value in balance.values()):
                count += 1
    return count


def brute_force_moment(cv: CoefficientVector, r: float, k: int) -> float:
    """
    k-th centred moment of X summed over ordered pair tuples without deduplication

    sum over (l_i != l'_i), i <= k, with sum (l_i - l'_i) = 0 of prod c_l conj(c_l') g_d(r |l - l'|)
    """
    P = cv.lattice.points
    c = cv.coeffs
    i, j = np.nonzero(~np.eye(cv.N, dtype=bool))
    deltas = P[i] - P[j]
    lengths = np.sqrt((deltas * deltas).sum(axis=1).astype(np.float64))
    weights = c[i] * np.conj(c[j]) * g_kernel(cv.d, r * lengths)
    total = 0j
    for prefix in itertools.product(range(deltas.shape[0]), repeat=k - 1):
        offset = deltas[list(prefix)].sum(axis=0)
        product = np.prod(weights[list(prefix)])
        hit = np.all(deltas + offset == 0, axis=1)
        total += product * weights[hit].sum()
    scale = (2.0 * math.pi) ** (cv.d / 2.0) * r ** cv.d
    return float((scale ** k * total).real)
