"""
Self-test suites run by the selftest command

The specfun suite checks the special-function identities; the equivalence
suite compares the fast exact counters and moment sums with brute force on
lattices small enough to enumerate every tuple.
"""
import logging
import math
from typing import Any, Dict, List, Optional

from ..spectral.base_service import BaseService
from ..spectral.correlation_service import CorrelationService
from ..spectral.eigenfunction_service import EigenfunctionService
from ..spectral.lattice_service import LatticeService
from ..spectral.mass_service import MassService
from ..spectral.specfun_service import SpecfunService
from ..spectral import oracles
from ...config import Config
from ...exceptions import ToralValidationError

logger = logging.getLogger(__name__)

SUITES = ('specfun', 'equivalence')
MOMENT_REL_TOL = 1e-10

# (n, d, largest l): N = 12 and 16 on the circle, N = 12 on the sphere
EQUIVALENCE_CASES = ((25, 2, 6), (65, 2, 4), (2, 3, 6))
MOMENT_CASE = {'n': 25, 'seed': 1, 'r': 0.1}


def _row(name: str, value: Any, target: Any, error: float, tolerance: float) -> Dict[str, Any]:
    return {
        'name': name,
        'value': value,
        'target': target,
        'error': error,
        'tolerance': tolerance,
        'passed': bool(error <= tolerance),
    }


class SelftestService(BaseService):
    """Identity and brute-force equivalence checks"""

    def __init__(self, config: Optional[Config] = None):
        super().__init__(config)
        self.specfun = SpecfunService(self.config)
        self.lattices = LatticeService(self.config)
        self.correlations = CorrelationService(self.config)
        self.eigenfunctions = EigenfunctionService(self.config)
        self.mass = MassService(self.config)

    def specfun_suite(self) -> List[Dict[str, Any]]:
        return [dict(row, suite='specfun') for row in self.specfun.selftest()]

    def equivalence_suite(self) -> List[Dict[str, Any]]:
        rows: List[Dict[str, Any]] = []
        for n, d, largest in EQUIVALENCE_CASES:
            lattice = self.lattices.enumerate_lattice_points(n, d)
            tag = f"n{n}_d{d}"
            for l in range(2, largest + 1):
                report = self.correlations.count_quasi_correlations(lattice, l, math.isqrt(n))
                quasi = report.quasi
                brute_S = oracles.brute_force_zero_sums(lattice, l)
                rows.append(_row(f"S_{tag}_l{l}", report.count_S, brute_S, abs(report.count_S - brute_S), 0))
                brute_quasi = oracles.brute_force_quasi(lattice, l, quasi.norm_squared_bound)
                rows.append(_row(f"quasi_{tag}_l{l}", quasi.count, brute_quasi, abs(quasi.count - brute_quasi), 0))
                if l % 2 == 0:
                    brute_D = oracles.brute_force_diagonal(lattice, l)
                    rows.append(_row(f"D_{tag}_l{l}", report.count_D, brute_D, abs(report.count_D - brute_D), 0))

        lattice = self.lattices.enumerate_lattice_points(MOMENT_CASE['n'], 2)
        cv = self.eigenfunctions.make_bourgain(lattice, MOMENT_CASE['seed'])
        r = MOMENT_CASE['r']
        for k in (2, 3):
            fast = self.mass.moment_exact_tuple(cv, r, k)
            brute = oracles.brute_force_moment(cv, r, k)
            error = abs(fast - brute) / max(abs(brute), 1e-300)
            rows.append(_row(f"moment_k{k}_n{MOMENT_CASE['n']}", fast, brute, error, MOMENT_REL_TOL))
        return [dict(row, suite='equivalence') for row in rows]

    def run(self, suite: str = 'all') -> List[Dict[str, Any]]:
        """
        Run one suite or both

        Args:
            suite: 'specfun', 'equivalence' or 'all'

        Returns:
            Rows with suite, name, value, target, error, tolerance, passed
        """
        if suite not in SUITES + ('all',):
            raise ToralValidationError(f"unknown selftest suite: {suite!r}")
        rows: List[Dict[str, Any]] = []
        if suite in ('specfun', 'all'):
            rows.extend(self.specfun_suite())
        if suite in ('equivalence', 'all'):
            rows.extend(self.equivalence_suite())
        failed = sum(1 for row in rows if not row['passed'])
        logger.info("selftest %s: %d checks, %d failed", suite, len(rows), failed)
        return rows
