"""
Sampling service: Monte Carlo moments of X with jackknife errors and CLT diagnostics

Sample i draws its centre from the counter-based stream at index i, so the
samples (and every statistic over them) do not depend on the batch size or
the number of threads.
"""
import logging
import math
from typing import Dict, Any, List, Optional, Tuple

import numpy as np
import scipy.stats

from .base_service import BaseService
from .eigenfunction_service import EigenfunctionService
from .lattice_service import LatticeService
from .mass_service import MassService, DifferenceTable
from ...config import Config
from ...exceptions import ToralBudgetError, ToralValidationError
from ...executors import get_executor
from ...kernels import uniform_block, Stream
from ...models import (
    CoefficientVector,
    ExperimentConfig,
    McSpec,
    Restriction,
    MomentSummary,
    CltDiagnostics,
    gaussian_moment,
)
from ... import signals

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
MIN_CLT_SAMPLES = 100
CLT_MOMENTS = (3, 4, 5, 6)


class SamplingService(BaseService):
    """Monte Carlo estimation of the moments of X"""

    def __init__(self, config: Optional[Config] = None):
        super().__init__(config)
        self.mass = MassService(self.config)
        self.eigenfunctions = EigenfunctionService(self.config)

    def _centres(self, d: int, seed: int, start: int, stop: int, restriction: Optional[Restriction]) -> np.ndarray:
        if restriction is None:
            return uniform_block(seed, Stream.SAMPLES, start, stop, width=d)
        u = uniform_block(seed, Stream.SAMPLES, start, stop, width=d)
        if d == 2:
            radius = restriction.rho * np.sqrt(u[:, 0])
            angle = TWO_PI * u[:, 1]
            offset = np.stack([radius * np.cos(angle), radius * np.sin(angle)], axis=1)
        else:
            radius = restriction.rho * np.cbrt(u[:, 0])
            z = 1.0 - 2.0 * u[:, 1]
            angle = TWO_PI * u[:, 2]
            s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
            offset = (radius[:, None] * np.stack([s * np.cos(angle), s * np.sin(angle), z], axis=1))
        return np.mod(np.asarray(restriction.x0) + offset, 1.0)

    def sample_masses(
        self,
        cv: CoefficientVector,
        r: float,
        mc: McSpec,
        restriction: Optional[Restriction] = None,
        table: Optional[DifferenceTable] = None
    ) -> Tuple[np.ndarray, np.ndarray]:
        """
        Draw M centres and evaluate X at each

        Returns:
            (centres, masses) with shapes (M, d) and (M,)
        """
        if restriction is not None and len(restriction.x0) != cv.d:
            raise ToralValidationError(f"restriction.x0 must have {cv.d} coordinates")
        table = table or self.mass.difference_table(cv, r)
        batch = mc.batch or self.config.get_batch_size()
        ranges = [(start, min(mc.M, start + batch)) for start in range(0, mc.M, batch)]

        def work(bounds: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
            start, stop = bounds
            centres = self._centres(cv.d, mc.seed, start, stop, restriction)
            masses = self.mass.evaluate_table(table, centres)
            signals.batch_sampled.send(self, start=start, stop=stop, total=mc.M)
            return centres, masses

        results = get_executor(self.config).map(work, ranges)
        centres = np.concatenate([c for c, _ in results])
        masses = np.concatenate([m for _, m in results])
        return centres, masses

    def _estimates(self, raw: np.ndarray, mean: float, restricted: bool, upto: int) -> np.ndarray:
        """[expectation, variance, standardised moments 3..upto] from raw moments of X - mean"""
        a1 = raw[1]
        if restricted:
            central = [sum(math.comb(k, j) * raw[j] * (-a1) ** (k - j) for j in range(k + 1))
                       for k in range(upto + 1)]
        else:
            central = list(raw)
        variance = central[2]
        values = [mean + a1, variance]
        for k in range(3, upto + 1):
            values.append(central[k] / variance ** (k / 2.0) if variance > 0 else math.nan)
        return np.array(values)

    def monte_carlo_moments(
        self,
        cv: CoefficientVector,
        r: float,
        mc: McSpec,
        restriction: Optional[Restriction] = None,
        moments_upto: int = 4,
        masses: Optional[np.ndarray] = None
    ) -> Dict[str, Any]:
        """
        Sample moments of X with block-jackknife standard errors

        Full-torus moments are centred at the exact mean vol(B_r); restricted
        moments are centred at the sample mean.

        Returns:
            {'expectation': (value, stderr), 'variance': (value, stderr),
             'standardized': {k: (value, stderr)}, 'sample_count': M, 'masses': array}
        """
        if moments_upto < 2:
            raise ToralValidationError("moments_upto must be at least 2")
        if masses is None:
            _, masses = self.sample_masses(cv, r, mc, restriction)
        M = masses.shape[0]
        if M < 2:
            raise ToralValidationError("Monte Carlo moments need M >= 2")
        mean = self.mass.expectation_exact(r, cv.d)
        z = masses - mean
        powers = np.vstack([z ** p for p in range(moments_upto + 1)])

        blocks = min(self.config.get_jackknife_blocks(), M)
        edges = np.linspace(0, M, blocks + 1).astype(np.int64)
        block_sums = np.stack([powers[:, lo:hi].sum(axis=1) for lo, hi in zip(edges[:-1], edges[1:])])
        block_sizes = np.diff(edges)
        total = block_sums.sum(axis=0)
        restricted = restriction is not None

        full = self._estimates(total / M, mean, restricted, moments_upto)
        leave_out = np.stack([
            self._estimates((total - block_sums[b]) / (M - block_sizes[b]), mean, restricted, moments_upto)
            for b in range(blocks)
        ])
        spread = leave_out - leave_out.mean(axis=0)
        stderr = np.sqrt((blocks - 1) / blocks * (spread ** 2).sum(axis=0))

        return {
            'expectation': (float(full[0]), float(stderr[0])),
            'variance': (float(full[1]), float(stderr[1])),
            'standardized': {k: (float(full[k - 1]), float(stderr[k - 1])) for k in range(3, moments_upto + 1)},
            'sample_count': M,
            'masses': masses,
        }

    def clt_diagnostics(self, standardized: np.ndarray) -> CltDiagnostics:
        """
        Kolmogorov-Smirnov distance to N(0,1) and the moments k=3..6

        Raises:
            ToralValidationError: fewer than 100 samples
        """
        z = np.asarray(standardized, dtype=np.float64).reshape(-1)
        if z.shape[0] < MIN_CLT_SAMPLES:
            raise ToralValidationError(f"CLT diagnostics need at least {MIN_CLT_SAMPLES} samples")
        statistic = float(scipy.stats.kstest(z, 'norm').statistic)
        table: List[Dict[str, float]] = []
        for k in CLT_MOMENTS:
            power = z ** k
            table.append({
                'k': k,
                'value': float(power.mean()),
                'stderr': float(power.std(ddof=1) / math.sqrt(z.shape[0])),
                'gaussian_target': gaussian_moment(k),
            })
        return CltDiagnostics(ks_statistic=statistic, sample_count=int(z.shape[0]), moment_table=table)

    def _exact_or_none(self, fn, *args) -> Optional[float]:
        try:
            return fn(*args)
        except ToralBudgetError as e:
            logger.info("exact value skipped: %s", e)
            return None

    def summarize(
        self, experiment: ExperimentConfig, cv: Optional[CoefficientVector] = None, with_clt: bool = True
    ) -> Tuple[MomentSummary, np.ndarray, np.ndarray, Optional[np.ndarray]]:
        """
        Exact, predicted and Monte Carlo moments of one experiment

        Returns:
            (summary, centres, masses, standardized masses or None)
        """
        mc = experiment.require_mc()
        if cv is None:
            lattice = LatticeService(self.config).enumerate_lattice_points(experiment.n, experiment.d)
            cv = self.eigenfunctions.from_spec(lattice, experiment.coefficients)
        r, T, d = experiment.r, experiment.T, experiment.d
        restriction = experiment.restriction
        table = self.mass.difference_table(cv, r)
        centres, masses = self.sample_masses(cv, r, mc, restriction, table)
        stats = self.monte_carlo_moments(cv, r, mc, restriction, experiment.moments_upto, masses)

        expectation: Dict[str, Optional[float]] = {
            'exact': self.mass.expectation_exact(r, d),
            'mc': stats['expectation'][0],
            'mc_stderr': stats['expectation'][1],
        }
        variance: Dict[str, Optional[float]] = {
            'mc': stats['variance'][0],
            'mc_stderr': stats['variance'][1],
        }
        moments: Dict[int, Dict[str, Optional[float]]] = {}

        if restriction is None:
            exact_variance = self.mass.variance_exact_tuple(cv, r)
            theta = self.eigenfunctions.flatness_report(cv).theta
            predicted = self.mass.predict_variance_asymptotic(d, theta, r, T)
            variance.update({
                'spectral': self.mass.variance_spectral(cv, r),
                'exact_tuple': exact_variance,
                'predicted_asymptotic': predicted,
                'ratio': exact_variance / predicted if predicted > 0 else None,
            })
            if d == 3:
                variance['diagonal_difference'] = abs(exact_variance - variance['spectral'])
            for k in range(3, experiment.moments_upto + 1):
                exact_k = self._exact_or_none(self.mass.moment_exact_tuple, cv, r, k)
                moments[k] = {
                    'exact_tuple': exact_k / exact_variance ** (k / 2.0)
                    if exact_k is not None and exact_variance > 0 else None,
                    'mc': stats['standardized'][k][0],
                    'mc_stderr': stats['standardized'][k][1],
                    'gaussian_target': gaussian_moment(k),
                }
            centre, scale = expectation['exact'], math.sqrt(exact_variance) if exact_variance > 0 else None
        else:
            exact_variance = None
            if d == 2:
                expectation['restricted_exact'] = self._exact_or_none(
                    self.mass.restricted_moment_exact, cv, r, restriction.x0, restriction.rho, 1)
                exact_variance = self._exact_or_none(
                    self.mass.restricted_moment_exact, cv, r, restriction.x0, restriction.rho, 2)
                variance['exact_tuple'] = exact_variance
            for k in range(3, experiment.moments_upto + 1):
                moments[k] = {
                    'exact_tuple': None,
                    'mc': stats['standardized'][k][0],
                    'mc_stderr': stats['standardized'][k][1],
                    'gaussian_target': gaussian_moment(k),
                }
            centre = expectation.get('restricted_exact') or expectation['mc']
            spread = exact_variance if exact_variance else variance['mc']
            scale = math.sqrt(spread) if spread and spread > 0 else None

        ks = None
        standardized = None
        if scale:
            standardized = (masses - centre) / scale
            if with_clt and masses.shape[0] >= MIN_CLT_SAMPLES:
                diagnostics = self.clt_diagnostics(standardized)
                ks = {'statistic': diagnostics.ks_statistic, 'sample_count': diagnostics.sample_count}

        summary = MomentSummary(
            expectation=expectation,
            variance=variance,
            standardized_moments=moments,
            ks=ks,
            sample_count=stats['sample_count'],
            restricted=restriction is not None,
        )
        return summary, centres, masses, standardized
