"""
Tests for RunService command execution and response envelopes
"""
import csv
import json
import os
import tempfile
import unittest
from fractions import Fraction
from unittest.mock import patch

from toral_mass.exceptions import ToralValidationError
from toral_mass.services.reporting import SelftestService, load_experiment, parse_grid
from toral_mass.services.reporting.run_service import ExperimentFileError
from toral_mass.tests.test_utils import get_test_sdk, experiment, write_experiment, cleanup


def read_csv(path):
    with open(path, 'r', encoding='utf-8', newline='') as handle:
        return list(csv.reader(handle))


class RunServiceTest(unittest.TestCase):
    """Test cases for RunService"""

    def setUp(self):
        """Set up test fixtures"""
        self.sdk = get_test_sdk()
        self.runner = self.sdk.compute.runner
        self.tmp = tempfile.TemporaryDirectory()
        self.directory = self.tmp.name

    def tearDown(self):
        """Clean up after each test"""
        self.tmp.cleanup()
        self.sdk.close()
        cleanup()

    def path(self, name):
        return os.path.join(self.directory, name)

    def config_file(self, **changes):
        return write_experiment(self.directory, experiment(**changes))

    def test_lattice(self):
        """Test the lattice report with its arc discrepancy"""
        response = self.runner.execute('lattice', {'n': 25, 'dim': 2, 'discrepancy': True})

        self.assertTrue(response['success'])
        self.assertEqual(response['data']['N'], 12)
        self.assertTrue(response['data']['discrepancy']['exact'])
        self.assertEqual(json.loads(response['body']), response['data'])
        self.assertTrue(response['checksums']['report'].startswith('sha256:'))
        self.assertEqual(response['manifest']['command'], 'lattice')

    def test_lattice_points_csv(self):
        """Test a CSV report holds one row per lattice point"""
        out = self.path('points.csv')
        response = self.runner.execute('lattice', {'n': 25, 'dim': 2}, out=out)

        rows = read_csv(out)
        self.assertTrue(response['success'])
        self.assertEqual(rows[0], ['index', 'x', 'y', 'angle'])
        self.assertEqual(len(rows), 13)
        self.assertEqual(rows[1][:3], ['0', '5', '0'])
        self.assertIn(out, response['checksums'])

    def test_lattice_sphere_ratio(self):
        """Test the d=3 cap discrepancy with the scaled ratio"""
        response = self.runner.execute('lattice', {'n': 2, 'dim': 3, 'discrepancy': True, 'eta': 0.5})

        self.assertTrue(response['success'])
        discrepancy = response['data']['discrepancy']
        self.assertTrue(discrepancy['exact'])
        self.assertAlmostEqual(discrepancy['ratio'], discrepancy['value'] * 2 ** 0.5, places=12)

    def test_lattice_empty(self):
        """Test the discrepancy of an empty set is invalid input"""
        response = self.runner.execute('lattice', {'n': 3, 'dim': 2, 'discrepancy': True})

        self.assertFalse(response['success'])
        self.assertEqual(response['errorCode'], 'INVALID_INPUT')

    def test_correlations_with_tuples(self):
        """Test counts, quasi-correlations and the tuple file"""
        tuples = self.path('tuples.csv')
        response = self.runner.execute('correlations', {'n': 25, 'dim': 2, 'l': 2, 'K': '3', 'tuples': tuples})

        data = response['data']
        rows = read_csv(tuples)
        self.assertTrue(response['success'])
        self.assertEqual(data['count_S'], 12)
        self.assertEqual(data['count_D'], 12)
        self.assertIn('quasi', data)
        self.assertEqual(rows[0], ['i1', 'i2'])
        self.assertEqual(len(rows) - 1, 12)
        self.assertIn(tuples, response['checksums'])

    def test_correlations_budget(self):
        """Test an enumeration above the budget reports both sizes"""
        runner = get_test_sdk(work_budget=10).compute.runner
        response = runner.execute('correlations', {'n': 25, 'dim': 2, 'l': 2})

        self.assertFalse(response['success'])
        self.assertEqual(response['errorCode'], 'BUDGET_EXCEEDED')
        self.assertEqual(response['bound'], 10)
        self.assertEqual(response['required'], 24)

    def test_flatness(self):
        """Test flatness measures with the predicted variance"""
        response = self.runner.execute('flatness', {'config': self.config_file()})

        data = response['data']
        self.assertTrue(response['success'])
        self.assertEqual(data['experiment']['N'], 12)
        self.assertIn('flatness', data)
        self.assertGreater(data['predicted_variance'], 0)

    def test_variance_with_mc(self):
        """Test exact and sampled variance in one report"""
        response = self.runner.execute('variance', {'config': self.config_file()})

        variance = response['data']['summary']['variance']
        self.assertTrue(response['success'])
        self.assertGreater(variance['exact_tuple'], 0)
        self.assertIsNotNone(variance['mc'])
        self.assertEqual(response['manifest']['seed'], 3)

    def test_variance_without_mc(self):
        """Test exact values only when the experiment has no mc block"""
        response = self.runner.execute('variance', {'config': self.config_file(mc=None)})

        variance = response['data']['summary']['variance']
        self.assertTrue(response['success'])
        self.assertNotIn('mc', variance)
        self.assertAlmostEqual(variance['exact_tuple'] / variance['spectral'], 1.0, places=9)
        self.assertIsNone(response['manifest']['seed'])

    def test_variance_bound_ratios(self):
        """Test the bound ratios need both eps and eta"""
        response = self.runner.execute('variance', {'config': self.config_file(mc=None), 'eps': 0.1, 'eta': 0.1})

        self.assertEqual(set(response['data']['bound_ratios']), {'lower_ratio', 'upper_ratio'})

    def test_variance_rejects_restriction(self):
        """Test variance runs on the full torus only"""
        path = self.config_file(restriction={'x0': [0.25, 0.25], 'rho': '0.05'})
        response = self.runner.execute('variance', {'config': path})

        self.assertEqual(response['errorCode'], 'INVALID_INPUT')

    def test_clt_samples(self):
        """Test the normal approximation and the sample file"""
        samples = self.path('samples.csv')
        response = self.runner.execute('clt', {'config': self.config_file(), 'samples_out': samples})

        rows = read_csv(samples)
        self.assertTrue(response['success'])
        self.assertEqual(response['data']['clt']['sample_count'], 400)
        self.assertEqual(rows[0], ['index', 'x1', 'x2', 'X', 'X_standardized'])
        self.assertEqual(len(rows), 401)

    def test_clt_needs_mc(self):
        """Test sampling commands need an mc block"""
        response = self.runner.execute('clt', {'config': self.config_file(mc=None)})

        self.assertFalse(response['success'])
        self.assertEqual(response['errorCode'], 'INVALID_INPUT')

    def test_restricted(self):
        """Test moments with the centre drawn from a small ball"""
        path = self.config_file(restriction={'x0': [0.25, 0.25], 'rho': '0.05'})
        response = self.runner.execute('restricted', {'config': path})

        expectation = response['data']['summary']['expectation']
        self.assertTrue(response['success'])
        self.assertIn('restricted_exact', expectation)

    def test_restricted_needs_restriction(self):
        """Test restricted runs need a restriction"""
        response = self.runner.execute('restricted', {'config': self.config_file()})

        self.assertEqual(response['errorCode'], 'INVALID_INPUT')

    def test_pairdist(self):
        """Test the pair-distance curve with its uniform reference"""
        response = self.runner.execute('pairdist', {'config': self.config_file(), 'grid': '0:2:0.5'})

        data = response['data']
        self.assertTrue(response['success'])
        self.assertEqual(data['variant'], 'F')
        self.assertEqual([row['s'] for row in data['curve']], [0.0, 0.5, 1.0, 1.5, 2.0])
        self.assertAlmostEqual(data['curve'][1]['reference'], 0.5 / 3.141592653589793, places=15)
        values = [row['value'] for row in data['curve']]
        self.assertEqual(values, sorted(values))

    def test_pairdist_csv(self):
        """Test the curve CSV has one row per grid point in column order"""
        out = self.path('curve.csv')
        response = self.runner.execute('pairdist', {'config': self.config_file(), 'grid': '0:2:0.5'}, out=out)

        rows = read_csv(out)
        curve = response['data']['curve']
        self.assertTrue(response['success'])
        self.assertEqual(rows[0], ['s', 'value', 'reference'])
        self.assertEqual(len(rows), 6)
        self.assertEqual(rows[1][0], '0')
        for row, record in zip(rows[1:], curve):
            self.assertEqual([float(cell) for cell in row], [record['s'], record['value'], record['reference']])

    def test_pairdist_lambda0(self):
        """Test F_lambda0 defaults to the first lattice point"""
        response = self.runner.execute('pairdist', {'config': self.config_file(), 'grid': '0:2:1',
                                                    'variant': 'F_lambda0'})

        self.assertTrue(response['success'])
        self.assertEqual(response['data']['lambda0'], [5, 0])
        self.assertAlmostEqual(response['data']['curve'][2]['reference'], 1.0, places=15)

    def test_pairdist_bad_grid(self):
        """Test malformed grids are invalid input"""
        response = self.runner.execute('pairdist', {'config': self.config_file(), 'grid': '0:2'})

        self.assertEqual(response['errorCode'], 'INVALID_INPUT')

    def test_hypotheses(self):
        """Test the D and A checks in one report"""
        response = self.runner.execute('hypotheses', {'n': 25, 'dim': 2, 'eps': 0.1, 'l': 2, 'delta': '0.1',
                                                      'gamma': 0.5})

        data = response['data']
        self.assertTrue(response['success'])
        self.assertEqual(data['D']['name'], 'D')
        self.assertFalse(data['A']['holds'])
        self.assertEqual(data['diagonal_domination']['margin'], 0.0)

    def test_selftest(self):
        """Test the identity suite through the runner"""
        response = self.runner.execute('selftest', {'suite': 'specfun'})

        self.assertTrue(response['success'])
        self.assertEqual(response['data']['failed'], [])
        self.assertEqual(response['data']['checks'], len(response['data']['results']))

    @patch.object(SelftestService, 'run')
    def test_selftest_failed(self, mock_run):
        """Test a failed check gives SELFTEST_FAILED with the results"""
        mock_run.return_value = [{'suite': 'specfun', 'name': 'broken', 'value': 1.0, 'target': 0.0,
                                  'error': 1.0, 'tolerance': 0.0, 'passed': False}]
        response = self.runner.execute('selftest', {'suite': 'specfun'})

        self.assertFalse(response['success'])
        self.assertEqual(response['errorCode'], 'SELFTEST_FAILED')
        self.assertEqual(response['data']['failed'], ['broken'])

    def test_unknown_command(self):
        """Test unknown subcommands are invalid input"""
        response = self.runner.execute('plot', {})

        self.assertEqual(response['errorCode'], 'INVALID_INPUT')

    def test_config_errors(self):
        """Test missing and malformed experiment files"""
        malformed = self.path('bad.json')
        with open(malformed, 'w', encoding='utf-8') as handle:
            handle.write('{"n": 25,')

        for path in (self.path('missing.json'), malformed):
            with self.subTest(path=path):
                response = self.runner.execute('variance', {'config': path})
                self.assertEqual(response['errorCode'], 'CONFIG_ERROR')

    def test_invalid_experiment_field(self):
        """Test a radius outside (0, 1/2) is invalid input"""
        response = self.runner.execute('variance', {'config': self.config_file(r='0.7')})

        self.assertEqual(response['errorCode'], 'INVALID_INPUT')

    def test_manifest_file(self):
        """Test the manifest records the seed, the experiment and the checksums"""
        out = self.path('clt.json')
        manifest_path = self.path('run.json')
        response = self.runner.execute('clt', {'config': self.config_file()}, out=out, manifest_path=manifest_path)

        with open(manifest_path, 'r', encoding='utf-8') as handle:
            manifest = json.load(handle)
        self.assertTrue(response['success'])
        self.assertEqual(manifest['command'], 'clt')
        self.assertEqual(manifest['seed'], 3)
        self.assertEqual(manifest['threads'], 1)
        self.assertEqual(manifest['config']['experiment']['n'], 25)
        self.assertEqual(manifest['checksums'][out], response['checksums'][out])

    def test_deterministic_body(self):
        """Test identical inputs give identical report bytes"""
        path = self.config_file()
        first = self.runner.execute('clt', {'config': path})
        second = self.runner.execute('clt', {'config': path})

        self.assertEqual(first['body'], second['body'])
        self.assertEqual(first['checksums'], second['checksums'])


class ExperimentLoadingTest(unittest.TestCase):
    """Test cases for grid parsing and experiment loading"""

    def test_parse_grid(self):
        """Test inclusive grids of exact rationals"""
        self.assertEqual(parse_grid('0:1:1/4'), [Fraction(i, 4) for i in range(5)])
        self.assertEqual(parse_grid('0.5:0.5:0.1'), [Fraction(1, 2)])

    def test_parse_grid_invalid(self):
        """Test malformed or oversized grids"""
        for text in ('0:1', '1:0:1', '0:1:0', '0:100000:1'):
            with self.subTest(text=text):
                with self.assertRaises(ToralValidationError):
                    parse_grid(text)

    def test_load_experiment_overrides(self):
        """Test CLI overrides replace n, seed and M"""
        with tempfile.TemporaryDirectory() as directory:
            path = write_experiment(directory, experiment())
            loaded = load_experiment(path, n=65, seed=9, M=50)

        self.assertEqual(loaded.n, 65)
        self.assertEqual(loaded.mc.seed, 9)
        self.assertEqual(loaded.mc.M, 50)

    def test_load_experiment_missing(self):
        """Test a missing file raises ExperimentFileError"""
        with self.assertRaises(ExperimentFileError):
            load_experiment('/nonexistent/experiment.json')


if __name__ == '__main__':
    unittest.main()
