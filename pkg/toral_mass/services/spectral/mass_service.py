"""
Mass service: the random L2-mass X(x) = integral of f_n^2 over B_x(r) and its moments

X(x) = vol(B_r) + C sum_delta W_delta e(<x, delta>) with C = (2 pi)^{d/2} r^d,
where delta runs over the distinct differences lambda - lambda' (lambda != lambda')
and W_delta sums c_lambda conj(c_lambda') g_d(r |delta|) over its representations.
Every exact moment below is a finite sum over this difference table.
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, Any, Optional, Sequence, Union

import numpy as np

from .base_service import BaseService
from ...exceptions import (
    ToralMassError,
    ToralValidationError,
    ToralQuadratureError,
    ToralComputationError,
)
from ...executors import get_executor
from ...kernels import KeyPacker, fold_sums, g_kernel, h_kernel
from ...models import CoefficientVector

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
IMAG_TOL = 1e-9
MOMENT_IMAG_TOL = 1e-10
_CHUNK_ELEMENTS = 1 << 22
_QUADRATURE_START = {2: 16, 3: 8}
_QUADRATURE_LIMIT = {2: 512, 3: 64}
_QUADRATURE_BLOCK = 1 << 16


def ball_volume(d: int, r: float) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * r ** d


@dataclass(frozen=True, eq=False)
class DifferenceTable:
    """Distinct differences delta with aggregated weights W_delta at radius r"""
    d: int
    n: int
    r: float
    deltas: np.ndarray
    weights: np.ndarray
    volume: float
    scale: float

    @property
    def size(self) -> int:
        return int(self.deltas.shape[0])

    def packer(self, h: int) -> KeyPacker:
        """Key packer for h-fold sums of deltas"""
        return KeyPacker(2 * h * math.isqrt(self.n), self.d)


class MassService(BaseService):
    """Exact, quadrature and asymptotic values of the moments of X"""

    def _validate_radius(self, r: float, name: str = 'r'):
        if not 0.0 < r < 0.5:
            raise ToralValidationError(f"radius invariant violated: {name} must lie in (0, 1/2)")

    def difference_table(self, cv: CoefficientVector, r: float) -> DifferenceTable:
        """
        Build the deduplicated difference table of cv at radius r

        Raises:
            ToralBudgetError: N^2 above the work budget
        """
        self._validate_radius(r)
        N = cv.N
        self._check_budget(N * N, 'difference table')
        support = np.nonzero(cv.coeffs)[0]
        P = cv.lattice.points[support]
        c = cv.coeffs[support]
        i, j = np.nonzero(~np.eye(support.shape[0], dtype=bool))
        deltas = P[i] - P[j]
        products = c[i] * np.conj(c[j])

        packer = KeyPacker(2 * math.isqrt(cv.lattice.n), cv.d)
        keys, first, inverse = np.unique(packer.pack(deltas), return_index=True, return_inverse=True)
        summed = np.zeros(keys.shape[0], dtype=np.complex128)
        np.add.at(summed, inverse.reshape(-1), products)
        unique_deltas = deltas[first]
        lengths = np.sqrt((unique_deltas * unique_deltas).sum(axis=1).astype(np.float64))
        weights = summed * g_kernel(cv.d, r * lengths)
        logger.debug("difference table: %d distinct of %d ordered pairs", keys.shape[0], deltas.shape[0])
        return DifferenceTable(
            d=cv.d,
            n=cv.lattice.n,
            r=r,
            deltas=unique_deltas,
            weights=np.asarray(weights, dtype=np.complex128),
            volume=ball_volume(cv.d, r),
            scale=TWO_PI ** (cv.d / 2.0) * r ** cv.d,
        )

    def evaluate_table(self, table: DifferenceTable, x) -> Union[float, np.ndarray]:
        """X at one point or at every row of an (m, d) array"""
        points = np.asarray(x, dtype=np.float64)
        single = points.ndim == 1
        points = np.atleast_2d(points)
        if points.shape[1] != table.d:
            raise ToralValidationError(f"centre must have {table.d} coordinates")
        out = np.empty(points.shape[0])
        if table.size == 0:
            out[:] = table.volume
            return float(out[0]) if single else out
        deltas = table.deltas.T.astype(np.float64)
        step = max(1, _CHUNK_ELEMENTS // table.size)
        for start in range(0, points.shape[0], step):
            phases = np.exp(2j * np.pi * (points[start:start + step] @ deltas))
            values = table.scale * (phases @ table.weights)
            worst = float(np.max(np.abs(values.imag)))
            if worst > IMAG_TOL:
                raise ToralComputationError(f"mass is not real: |Im X| = {worst:.3e}")
            out[start:start + step] = table.volume + values.real
        return float(out[0]) if single else out

    def mass_exact(self, cv: CoefficientVector, x, r: float) -> Union[float, np.ndarray]:
        """X(x) from the spectral identity; x may be one point or an (m, d) array"""
        return self.evaluate_table(self.difference_table(cv, r), x)

    def integrate_ball(
        self, fn: Callable[[np.ndarray], np.ndarray], centre: Sequence[float], r: float, d: int, tol: float
    ) -> float:
        """
        Integral of fn over B_centre(r) by a refined product rule

        d=2 uses Gauss-Legendre in the radius times the trapezoid rule in
        the angle; d=3 adds Gauss-Legendre in cos(polar angle). The order
        doubles until two successive values agree to tol / 4.

        Raises:
            ToralQuadratureError: No agreement before the order limit
        """
        self._validate_dimension(d)
        self._validate_radius(r)
        self._validate_positive(tol, 'tol')
        centre = np.asarray(centre, dtype=np.float64)
        previous: Optional[float] = None
        m = _QUADRATURE_START[d]
        while m <= _QUADRATURE_LIMIT[d]:
            nodes, weights = np.polynomial.legendre.leggauss(m)
            rho = r * (nodes + 1.0) / 2.0
            w_rho = weights * r / 2.0
            phi = TWO_PI * np.arange(2 * m) / (2 * m)
            w_phi = TWO_PI / (2 * m)
            if d == 2:
                R, PHI = np.meshgrid(rho, phi, indexing='ij')
                points = centre + np.stack([R * np.cos(PHI), R * np.sin(PHI)], axis=-1).reshape(-1, 2)
                w = (w_rho * rho)[:, None] * np.full(2 * m, w_phi)[None, :]
            else:
                R, Z, PHI = np.meshgrid(rho, nodes, phi, indexing='ij')
                S = np.sqrt(1.0 - Z * Z)
                points = centre + np.stack([R * S * np.cos(PHI), R * S * np.sin(PHI), R * Z], axis=-1).reshape(-1, 3)
                w = (w_rho * rho * rho)[:, None, None] * weights[None, :, None] * np.full(2 * m, w_phi)[None, None, :]
            w = w.reshape(-1)
            value = 0.0
            for start in range(0, points.shape[0], _QUADRATURE_BLOCK):
                stop = start + _QUADRATURE_BLOCK
                value += float(np.dot(fn(points[start:stop]), w[start:stop]))
            if previous is not None and abs(value - previous) <= tol / 4.0:
                return value
            previous = value
            m *= 2
        raise ToralQuadratureError(f"ball quadrature did not reach tolerance {tol:.1e}")

    def mass_quadrature(self, cv: CoefficientVector, x: Sequence[float], r: float, tol: float = 1e-8) -> float:
        """X(x) by direct numerical integration of f_n^2"""
        lattice_points = cv.lattice.points.T.astype(np.float64)

        def f_squared(points: np.ndarray) -> np.ndarray:
            values = np.exp(2j * np.pi * (points @ lattice_points)) @ cv.coeffs
            return values.real ** 2

        return self.integrate_ball(f_squared, x, r, cv.d, tol)

    def expectation_exact(self, r: float, d: int) -> float:
        """E[X] = vol(B_r)"""
        self._validate_dimension(d)
        if r < 0:
            raise ToralValidationError("r must be non-negative")
        return ball_volume(d, r)

    def variance_spectral(self, cv: CoefficientVector, r: float, include_antipodal_overlap: bool = False) -> float:
        """
        Diagonal variance (2 pi)^d r^{2d} [2 sum_{l != l'} v v' h_d(r|l - l'|) - sum v_l v_{-l} h_d(2T)]

        Exact for d=2; the diagonal approximation for d=3. With
        include_antipodal_overlap the subtracted antipodal term is omitted.
        """
        self._validate_radius(r)
        v = cv.squared_moduli()
        P = cv.lattice.points.astype(np.float64)
        total = 0.0
        step = max(1, _CHUNK_ELEMENTS // max(cv.N, 1))
        for start in range(0, cv.N, step):
            diff = P[start:start + step, None, :] - P[None, :, :]
            h = h_kernel(cv.d, r * np.sqrt((diff * diff).sum(axis=2)))
            rows = np.arange(start, min(cv.N, start + step))
            h[rows - start, rows] = 0.0
            total += float(v[rows] @ h @ v)
        total *= 2.0
        if not include_antipodal_overlap:
            T = r * math.sqrt(cv.lattice.n)
            total -= float(np.dot(v, v[cv.lattice.antipodes])) * h_kernel(cv.d, 2.0 * T)
        return TWO_PI ** cv.d * r ** (2 * cv.d) * total

    def variance_exact_tuple(self, cv: CoefficientVector, r: float) -> float:
        """Exact variance C^2 sum_delta |W_delta|^2"""
        table = self.difference_table(cv, r)
        return table.scale ** 2 * float(np.sum(np.abs(table.weights) ** 2))

    @staticmethod
    def _fold_products(weights: np.ndarray, h: int) -> np.ndarray:
        """Products of weights over ordered h-tuples, in fold_sums order"""
        products = np.ones(1, dtype=np.complex128)
        for _ in range(h):
            products = (products[:, None] * weights[None, :]).reshape(-1)
        return products

    def _fold_weights(self, table: DifferenceTable, h: int, packer: KeyPacker):
        sums = fold_sums(table.deltas, h)
        products = self._fold_products(table.weights, h)
        keys, inverse = np.unique(packer.pack(sums), return_inverse=True)
        summed = np.zeros(keys.shape[0], dtype=np.complex128)
        np.add.at(summed, inverse.reshape(-1), products)
        return keys, summed

    def moment_exact_tuple(self, cv: CoefficientVector, r: float, k: int) -> float:
        """
        Exact k-th centred moment C^k sum_{delta_1 + ... + delta_k = 0} prod W_delta_i

        The zero-sum k-tuples of differences are joined meet-in-the-middle.

        Raises:
            ToralBudgetError: P^floor(k/2) + P^ceil(k/2) above the work budget
        """
        if int(k) != k or k < 2:
            raise ToralValidationError("moment order k must be an integer >= 2")
        table = self.difference_table(cv, r)
        if table.size == 0:
            return 0.0
        h1, h2 = k // 2, k - k // 2
        self._check_budget(table.size ** h1 + table.size ** h2, f"moment join for k={k}")
        try:
            packer = table.packer(h2)
            left_keys, left_weights = self._fold_weights(table, h1, packer)
            rest_sums = fold_sums(table.deltas, h2 - 1)
            rest_weights = self._fold_products(table.weights, h2 - 1)

            def join_row(i: int) -> complex:
                keys = packer.negate(packer.pack(rest_sums + table.deltas[i]))
                pos = np.minimum(np.searchsorted(left_keys, keys), left_keys.shape[0] - 1)
                hit = left_keys[pos] == keys
                return complex(np.sum(left_weights[pos[hit]] * rest_weights[hit]) * table.weights[i])

            total = sum(get_executor(self.config).map(join_row, range(table.size)), 0j)
        except ToralMassError:
            raise
        except (FloatingPointError, ValueError, ArithmeticError) as e:
            raise ToralComputationError(f"moment join failed: {str(e)}")
        value = table.scale ** k * total
        if abs(value.imag) > MOMENT_IMAG_TOL * max(1.0, abs(value.real)):
            raise ToralComputationError(f"moment is not real: Im = {value.imag:.3e}")
        return float(value.real)

    def restricted_moment_exact(self, cv: CoefficientVector, r: float, x0: Sequence[float], rho: float, k: int) -> float:
        """
        Exact moments of X for x uniform in B_x0(rho), d=2

        Averaging e(<x, s>) over the disc gives 2 g_2(rho |s|) e(<x0, s>),
        so E[Y^j] for Y = X - vol is a sum over all j-tuples of differences
        without a zero-sum constraint. k=1 returns the restricted mean;
        k >= 2 returns the k-th moment about the restricted mean.

        Raises:
            ToralBudgetError: the iterated sum tables exceed restricted_pair_bound
        """
        if cv.d != 2:
            raise ToralValidationError("restricted exact moments are implemented for d=2 only")
        if int(k) != k or k < 1:
            raise ToralValidationError("moment order k must be a positive integer")
        self._validate_radius(rho, 'rho')
        x0 = np.asarray(x0, dtype=np.float64)
        if x0.shape != (2,):
            raise ToralValidationError("x0 must have 2 coordinates")
        table = self.difference_table(cv, r)
        bound = self.config.get_restricted_pair_bound()

        def disc_average(sums: np.ndarray) -> np.ndarray:
            lengths = np.sqrt((sums * sums).sum(axis=1).astype(np.float64))
            return 2.0 * g_kernel(2, rho * lengths) * np.exp(2j * np.pi * (sums @ x0))

        raw = [1.0 + 0j]
        sums = np.zeros((1, 2), dtype=np.int64)
        weights = np.ones(1, dtype=np.complex128)
        for j in range(1, k + 1):
            self._check_budget(sums.shape[0] * max(table.size, 1), f'restricted sum table of order {j}', bound)
            sums = (sums[:, None, :] + table.deltas[None, :, :]).reshape(-1, 2)
            weights = (weights[:, None] * table.weights[None, :]).reshape(-1)
            if sums.shape[0] == 0:
                raw.append(0j)
                continue
            keys, first, inverse = np.unique(table.packer(j).pack(sums), return_index=True, return_inverse=True)
            merged = np.zeros(keys.shape[0], dtype=np.complex128)
            np.add.at(merged, inverse.reshape(-1), weights)
            sums, weights = sums[first], merged
            raw.append(table.scale ** j * complex(np.dot(weights, disc_average(sums))))

        shift = raw[1]
        if k == 1:
            return float(table.volume + shift.real)
        central = sum(math.comb(k, j) * raw[j] * (-shift) ** (k - j) for j in range(k + 1))
        return float(central.real)

    def predict_variance_asymptotic(self, d: int, theta: float, r: float, T: float) -> float:
        """(16 / (3 pi cos^2 theta)) r^4 / T for d=2, r^6 / T^2 for d=3"""
        self._validate_dimension(d)
        self._validate_positive(T, 'T')
        if d == 2:
            return 16.0 / (3.0 * math.pi * math.cos(theta) ** 2) * r ** 4 / T
        return r ** 6 / T ** 2

    def predict_variance_bv(self, g_l2_squared: float, r: float, T: float) -> float:
        """(16 / (3 pi)) ||g||_2^2 r^4 / T"""
        self._validate_positive(T, 'T')
        return 16.0 / (3.0 * math.pi) * g_l2_squared * r ** 4 / T

    def variance_bound_ratios(
        self, variance: float, d: int, r: float, T: float, N: int, n: int, epsilon: float, eta: float
    ) -> Dict[str, float]:
        """Variance over the ultraflat lower and upper bound shapes"""
        self._validate_dimension(d)
        self._validate_positive(T, 'T')
        if d == 2:
            if n < 3:
                raise ToralValidationError("the d=2 upper bound needs n >= 3")
            lower = r ** 4 / T * N ** (-2.0 * epsilon)
            upper = r ** 4 * N ** epsilon * (1.0 / T + math.log(n) ** (-0.5 * math.log(math.pi / 2.0) + eta))
        else:
            lower = r ** 6 / T ** 2 * N ** (-2.0 * epsilon)
            upper = r ** 6 * N ** epsilon * (T ** -2 + float(n) ** -eta)
        return {'lower_ratio': variance / lower, 'upper_ratio': variance / upper}

    def diagonal_error_ratio(self, cv: CoefficientVector, r: float) -> Dict[str, Any]:
        """|exact - diagonal| N^{1/4} / (v_inf^2 r^6) for d=3"""
        if cv.d != 3:
            raise ToralValidationError("the diagonal error ratio is defined for d=3")
        exact = self.variance_exact_tuple(cv, r)
        diagonal = self.variance_spectral(cv, r)
        v_inf = cv.N * float(cv.squared_moduli().max())
        difference = abs(exact - diagonal)
        return {
            'exact': exact,
            'diagonal': diagonal,
            'difference': difference,
            'ratio': difference * cv.N ** 0.25 / (v_inf ** 2 * r ** 6),
        }
