"""
Tests for the correlation service
"""
import unittest
from fractions import Fraction

import numpy as np

from toral_mass.exceptions import ToralValidationError, ToralBudgetError
from toral_mass.models import StructureSet
from toral_mass.services.spectral import CorrelationService, LatticeService
from toral_mass.services.spectral import oracles
from toral_mass.tests.test_utils import get_test_config


class CorrelationServiceTest(unittest.TestCase):
    """Test cases for CorrelationService"""

    def setUp(self):
        """Set up test fixtures"""
        config = get_test_config()
        self.service = CorrelationService(config)
        self.lattices = LatticeService(config)
        self.e25 = self.lattices.enumerate_lattice_points(25, 2)

    def test_counts_on_e25(self):
        """Test |S| and |D| for l = 2, 3, 4"""
        expected = {2: (12, 12), 3: (0, 0), 4: (396, 396)}
        for l, (count_S, count_D) in expected.items():
            with self.subTest(l=l):
                report = self.service.count_correlations(self.e25, l)
                self.assertEqual(report.count_S, count_S)
                self.assertEqual(report.count_D, count_D)
                self.assertEqual(report.N, 12)

    def test_counts_match_brute_force(self):
        """Test meet-in-the-middle against direct enumeration"""
        for n, d, largest in ((65, 2, 4), (5, 2, 5), (2, 3, 4), (3, 3, 4)):
            lattice = self.lattices.enumerate_lattice_points(n, d)
            for l in range(2, largest + 1):
                with self.subTest(n=n, d=d, l=l):
                    report = self.service.count_correlations(lattice, l)
                    self.assertEqual(report.count_S, oracles.brute_force_zero_sums(lattice, l))
                    if l % 2 == 0:
                        self.assertEqual(report.count_D, oracles.brute_force_diagonal(lattice, l))

    def test_counts_independent_of_threads(self):
        """Test the count is the same on a thread pool"""
        service = CorrelationService(get_test_config(threads=3))

        self.assertEqual(service.count_correlations(self.e25, 4).count_S, 396)

    def test_diagonal_closed_form(self):
        """Test |D(2)| = N and |D(4)| = 3N(N - 1) for N = 12"""
        self.assertEqual(self.service.count_diagonal(self.e25, 2), 12)
        self.assertEqual(self.service.count_diagonal(self.e25, 4), 396)
        with self.assertRaises(ToralValidationError):
            self.service.count_diagonal(self.e25, 3)

    def test_emit_tuples(self):
        """Test emitted tuples are zero-sum and match the count"""
        report, tuples = self.service.count_correlations(self.e25, 4, emit_tuples=True)

        self.assertEqual(len(tuples), report.count_S)
        self.assertEqual(len(set(tuples)), len(tuples))
        for indices in tuples[:50]:
            self.assertEqual(self.e25.points[list(indices)].sum(axis=0).tolist(), [0, 0])

    def test_iter_pairs(self):
        """Test l=2 tuples are exactly the antipodal pairs"""
        tuples = sorted(self.service.iter_correlation_tuples(self.e25, 2))

        self.assertEqual(tuples, sorted((int(self.e25.antipodes[i]), i) for i in range(12)))
        self.assertEqual(list(self.service.iter_correlation_tuples(self.e25, 3)), [])

    def test_invalid_length(self):
        """Test l must be an integer at least 2"""
        for l in (1, 0, 2.5):
            with self.assertRaises(ToralValidationError):
                self.service.count_correlations(self.e25, l)

    def test_empty_set(self):
        """Test a radius with no lattice points"""
        report = self.service.count_correlations(self.lattices.enumerate_lattice_points(3, 2), 4)

        self.assertEqual((report.count_S, report.count_D, report.N), (0, 0, 0))

    def test_budget(self):
        """Test the work budget is checked before enumerating"""
        service = CorrelationService(get_test_config(work_budget=10))

        with self.assertRaises(ToralBudgetError) as context:
            service.count_correlations(self.e25, 2)
        self.assertEqual(context.exception.required, 24)
        self.assertEqual(context.exception.bound, 10)

    def test_quasi_correlations(self):
        """Test every non-antipodal pair is within K = 10"""
        report = self.service.count_quasi_correlations(self.e25, 2, 10)

        self.assertEqual(report.quasi.count, 132)
        self.assertEqual(report.quasi.norm_squared_bound, 100)
        self.assertEqual(report.count_S, 12)

    def test_quasi_rational_radius(self):
        """Test K is compared through floor(K^2)"""
        report = self.service.count_quasi_correlations(self.e25, 3, '7/2')

        self.assertEqual(report.quasi.norm_squared_bound, 12)
        self.assertEqual(report.quasi.K, '7/2')
        self.assertEqual(report.quasi.count, oracles.brute_force_quasi(self.e25, 3, 12))

    def test_quasi_monotone_in_radius(self):
        """Test quasi-correlation counts never decrease as K grows"""
        e65 = self.lattices.enumerate_lattice_points(65, 2)
        counts = [self.service.count_quasi_correlations(e65, 4, K).quasi.count for K in range(1, 9)]

        self.assertEqual(counts, sorted(counts))
        self.assertLess(counts[0], counts[-1])
        self.assertEqual(counts[-1], oracles.brute_force_quasi(e65, 4, 64))

    def test_quasi_invalid_radius(self):
        """Test K must lie in (0, l sqrt(n)]"""
        for K in (0, -1, 11, 'x'):
            with self.assertRaises(ToralValidationError):
                self.service.count_quasi_correlations(self.e25, 2, K)

    def test_separation_bound(self):
        """Test floor(n^(1 - 2 delta)) in exact arithmetic"""
        self.assertEqual(self.service.separation_bound(25, '0.1'), 13)
        self.assertEqual(self.service.separation_bound(25, Fraction(9, 20)), 1)
        self.assertEqual(self.service.separation_bound(25, '0.6'), 0)
        self.assertEqual(self.service.separation_bound(16, '1/4'), 4)
        with self.assertRaises(ToralValidationError):
            self.service.separation_bound(25, 0)

    def test_hypothesis_A(self):
        """Test separateness fails at delta = 0.1 and holds at 0.45"""
        failed = self.service.check_hypothesis_A(self.e25, 2, '0.1')
        held = self.service.check_hypothesis_A(self.e25, 2, '0.45')

        self.assertFalse(failed.holds)
        self.assertEqual(failed.details['witness_norm_squared'], 2)
        self.assertEqual(np.sum(np.array(failed.witness), axis=0).dot(np.sum(np.array(failed.witness), axis=0)), 2)
        self.assertTrue(held.holds)
        self.assertIsNone(held.witness)
        self.assertEqual(held.details['norm_squared_bound'], 1)

    def test_diagonal_domination(self):
        """Test the margin vanishes when every zero-sum tuple is diagonal"""
        self.assertEqual(self.service.check_diagonal_domination(self.e25, 4, 0.5), 0.0)
        with self.assertRaises(ToralValidationError):
            self.service.check_diagonal_domination(self.e25, 3, 0.5)
        with self.assertRaises(ToralValidationError):
            self.service.check_diagonal_domination(self.e25, 4, 0.0)

    def test_correlation_report(self):
        """Test the combined report with hypotheses"""
        report = self.service.correlation_report(self.e25, 2, delta='0.1', gamma=0.5)
        data = report.to_dict()

        self.assertFalse(data['hypotheses']['A']['holds'])
        self.assertEqual(data['hypotheses']['diagonal_domination']['margin'], 0.0)
        with self.assertRaises(ToralValidationError):
            self.service.correlation_report(self.e25, 2, K=1, delta='0.1')

    def test_is_diagonal(self):
        """Test antipodal balance"""
        self.assertTrue(self.service.is_diagonal([(3, 4), (-3, -4), (5, 0), (-5, 0)]))
        self.assertFalse(self.service.is_diagonal([(3, 4), (-3, -4), (5, 0), (0, 5)]))

    def test_structure_sets(self):
        """Test admissibility and chain lengths"""
        admissible, structure = self.service.structure_set([(3, 4), (4, 3), (-3, -4), (-4, -3)], self.e25)
        self.assertTrue(admissible)
        self.assertEqual(structure.parts, (2,))

        six = [(3, 4), (4, 3), (-4, -3), (0, 5), (0, -5), (-3, -4)]
        admissible, structure = self.service.structure_set(six, self.e25)
        self.assertTrue(admissible)
        self.assertEqual(structure.parts, (3,))

        self.assertEqual(self.service.structure_set([(3, 4), (-3, -4)], self.e25), (False, None))
        self.assertEqual(self.service.structure_set([(3, 4), (4, 3)], self.e25), (False, None))
        with self.assertRaises(ToralValidationError):
            self.service.structure_set([(3, 4), (4, 3), (5, 0)], self.e25)

    def test_enumerate_structure_sets(self):
        """Test the partitions into parts of size at least 2"""
        self.assertEqual(self.service.enumerate_structure_sets(4), [StructureSet((4,)), StructureSet((2, 2))])
        self.assertEqual(len(self.service.enumerate_structure_sets(6)), 4)
        self.assertEqual(self.service.enumerate_structure_sets(2), [StructureSet((2,))])
        with self.assertRaises(ToralValidationError):
            self.service.enumerate_structure_sets(1)


if __name__ == '__main__':
    unittest.main()
