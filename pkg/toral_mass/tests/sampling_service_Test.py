"""
Tests for the sampling service
"""
import math
import unittest

import numpy as np
from scipy import stats

from toral_mass import signals
from toral_mass.exceptions import ToralValidationError
from toral_mass.models import ExperimentConfig, McSpec, Restriction
from toral_mass.services.spectral import SamplingService, MassService, LatticeService, EigenfunctionService
from toral_mass.tests.test_utils import get_test_config, experiment

R = 0.1


class SamplingServiceTest(unittest.TestCase):
    """Test cases for SamplingService"""

    def setUp(self):
        """Set up test fixtures"""
        config = get_test_config()
        self.service = SamplingService(config)
        self.mass = MassService(config)
        lattice = LatticeService(config).enumerate_lattice_points(25, 2)
        self.cv = EigenfunctionService(config).make_bourgain(lattice, 1)
        self.volume = math.pi * R ** 2

    def test_samples_independent_of_batching(self):
        """Test batch size and thread count give bit-identical samples"""
        centres, masses = self.service.sample_masses(self.cv, R, McSpec(M=500, seed=9, batch=7))
        self.assertEqual(centres.shape, (500, 2))
        for threads in (1, 4):
            service = SamplingService(get_test_config(threads=threads))
            for batch in (7, 128):
                with self.subTest(threads=threads, batch=batch):
                    other_centres, other_masses = service.sample_masses(self.cv, R, McSpec(M=500, seed=9, batch=batch))
                    np.testing.assert_array_equal(centres, other_centres)
                    np.testing.assert_array_equal(masses, other_masses)

    def test_moments_independent_of_threads(self):
        """Test the sampled moments are bit-identical across thread counts and batches"""
        serial = self.service.monte_carlo_moments(self.cv, R, McSpec(M=300, seed=5, batch=7))
        threaded = SamplingService(get_test_config(threads=4))
        other = threaded.monte_carlo_moments(self.cv, R, McSpec(M=300, seed=5, batch=128))

        self.assertEqual(serial['expectation'], other['expectation'])
        self.assertEqual(serial['variance'], other['variance'])
        self.assertEqual(serial['standardized'], other['standardized'])

    def test_samples_are_masses(self):
        """Test each sample is X at its centre"""
        centres, masses = self.service.sample_masses(self.cv, R, McSpec(M=20, seed=2))

        np.testing.assert_allclose(masses, self.mass.mass_exact(self.cv, centres, R), rtol=0, atol=1e-15)

    def test_batch_signal(self):
        """Test one batch_sampled signal per batch"""
        seen = []

        def receiver(sender, start, stop, total):
            seen.append((start, stop, total))

        with signals.batch_sampled.connected_to(receiver):
            self.service.sample_masses(self.cv, R, McSpec(M=10, seed=1, batch=4))

        self.assertEqual(sorted(seen), [(0, 4, 10), (4, 8, 10), (8, 10, 10)])

    def test_restricted_centres(self):
        """Test restricted centres lie in the ball around x0 on the torus"""
        restriction = Restriction(x0=(0.98, 0.5), rho=0.05)
        centres, _ = self.service.sample_masses(self.cv, R, McSpec(M=300, seed=4), restriction)
        offset = np.mod(centres - np.array(restriction.x0) + 0.5, 1.0) - 0.5

        self.assertTrue(np.all(np.sqrt((offset ** 2).sum(axis=1)) <= 0.05 + 1e-12))
        self.assertTrue(np.all((centres >= 0) & (centres < 1)))

    def test_restriction_dimension(self):
        """Test x0 must match the dimension"""
        with self.assertRaises(ToralValidationError):
            self.service.sample_masses(self.cv, R, McSpec(M=10, seed=1), Restriction(x0=(0.1, 0.1, 0.1), rho=0.1))

    def test_moments_from_given_masses(self):
        """Test torus moments are centred at the exact mean"""
        z = np.tile([1.0, -1.0, 2.0, -2.0], 25) * 1e-3
        result = self.service.monte_carlo_moments(self.cv, R, McSpec(M=100, seed=0), masses=self.volume + z)

        self.assertAlmostEqual(result['expectation'][0], self.volume, places=15)
        self.assertAlmostEqual(result['variance'][0] / 2.5e-6, 1.0, places=10)
        self.assertAlmostEqual(result['standardized'][3][0], 0.0, places=8)
        self.assertAlmostEqual(result['standardized'][4][0], 8.5 / 6.25, places=8)
        self.assertEqual(result['sample_count'], 100)

    def test_restricted_moments_use_sample_mean(self):
        """Test restricted moments are centred at the sample mean"""
        masses = self.volume + 0.01 + np.tile([1.0, -1.0], 50) * 1e-3
        restriction = Restriction(x0=(0.0, 0.0), rho=0.1)
        result = self.service.monte_carlo_moments(self.cv, R, McSpec(M=100, seed=0), restriction, masses=masses)

        self.assertAlmostEqual(result['expectation'][0], self.volume + 0.01, places=14)
        self.assertAlmostEqual(result['variance'][0] / 1e-6, 1.0, places=8)

    def test_moments_invalid(self):
        """Test order and sample-size checks"""
        with self.assertRaises(ToralValidationError):
            self.service.monte_carlo_moments(self.cv, R, McSpec(M=10, seed=0), moments_upto=1)
        with self.assertRaises(ToralValidationError):
            self.service.monte_carlo_moments(self.cv, R, McSpec(M=10, seed=0), masses=np.array([0.1]))

    def test_mc_variance_near_exact(self):
        """Test the sampled variance agrees with the exact one"""
        result = self.service.monte_carlo_moments(self.cv, R, McSpec(M=4000, seed=12))
        exact = self.mass.variance_exact_tuple(self.cv, R)
        value, stderr = result['variance']

        self.assertGreater(stderr, 0.0)
        self.assertLess(abs(value - exact), 6 * stderr)

    def test_clt_diagnostics(self):
        """Test KS distance and moments of near-normal data"""
        z = stats.norm.ppf((np.arange(2000) + 0.5) / 2000)
        diagnostics = self.service.clt_diagnostics(z)

        self.assertLess(diagnostics.ks_statistic, 0.01)
        self.assertEqual([row['k'] for row in diagnostics.moment_table], [3, 4, 5, 6])
        fourth = diagnostics.moment_table[1]
        self.assertEqual(fourth['gaussian_target'], 3.0)
        self.assertAlmostEqual(fourth['value'], 3.0, delta=0.1)
        with self.assertRaises(ToralValidationError):
            self.service.clt_diagnostics(z[:99])

    def test_mc_variance_near_exact_on_sphere(self):
        """Test the sampled d=3 variance agrees with the exact one"""
        config = get_test_config()
        sphere = LatticeService(config).enumerate_lattice_points(21, 3)
        cv = EigenfunctionService(config).make_bourgain(sphere, 2)
        r = 0.2
        result = self.service.monte_carlo_moments(cv, r, McSpec(M=20000, seed=17, batch=4096))
        exact = self.mass.variance_exact_tuple(cv, r)
        value, stderr = result['variance']

        self.assertEqual(sphere.N, 48)
        self.assertLess(stderr, 0.1 * exact)
        self.assertLessEqual(abs(value - exact), 5 * stderr)

    def test_ks_statistic_calibration(self):
        """Test Gaussian draws give a small KS distance and a point mass a large one"""
        gaussian = self.service.clt_diagnostics(np.random.default_rng(0).standard_normal(2000))
        constant = self.service.clt_diagnostics(np.zeros(500))

        self.assertLess(gaussian.ks_statistic, 0.05)
        self.assertGreater(constant.ks_statistic, 0.4)
        self.assertAlmostEqual(constant.ks_statistic, 0.5, places=12)
        self.assertEqual(constant.sample_count, 500)

    def test_summarize(self):
        """Test the combined summary of the Bourgain experiment"""
        config = ExperimentConfig.from_dict(experiment())
        summary, centres, masses, standardized = self.service.summarize(config)

        self.assertEqual(summary.sample_count, 400)
        self.assertFalse(summary.restricted)
        self.assertAlmostEqual(summary.variance['exact_tuple'], self.mass.variance_exact_tuple(self.cv, R), places=18)
        self.assertIn('predicted_asymptotic', summary.variance)
        self.assertEqual(sorted(summary.standardized_moments), [3, 4])
        self.assertEqual(summary.standardized_moments[4]['gaussian_target'], 3.0)
        self.assertIsNotNone(summary.standardized_moments[4]['exact_tuple'])
        self.assertIsNotNone(summary.ks)
        self.assertEqual(standardized.shape, masses.shape)
        self.assertEqual(centres.shape, (400, 2))

    def test_summarize_without_clt(self):
        """Test the KS statistic can be skipped"""
        summary, _, _, _ = self.service.summarize(ExperimentConfig.from_dict(experiment()), with_clt=False)

        self.assertIsNone(summary.ks)

    def test_summarize_restricted(self):
        """Test the restricted summary reports the exact restricted moments"""
        config = ExperimentConfig.from_dict(experiment(restriction={'x0': [0.2, 0.6], 'rho': '0.05'}))
        summary, _, masses, _ = self.service.summarize(config)

        self.assertTrue(summary.restricted)
        self.assertAlmostEqual(summary.expectation['restricted_exact'],
                               self.mass.restricted_moment_exact(self.cv, R, [0.2, 0.6], 0.05, 1), places=15)
        self.assertIsNone(summary.standardized_moments[3]['exact_tuple'])
        self.assertNotIn('predicted_asymptotic', summary.variance)

    def test_summarize_needs_mc(self):
        """Test sampling needs an mc block"""
        with self.assertRaises(ToralValidationError):
            self.service.summarize(ExperimentConfig.from_dict(experiment(mc=None)))


if __name__ == '__main__':
    unittest.main()
