"""
Tests for Config validation and settings resolution
"""
import os
import unittest
from unittest.mock import patch

from toral_mass.config import Config, DEFAULT_WORK_BUDGET


class ConfigTest(unittest.TestCase):
    """Test cases for Config"""

    def test_defaults(self):
        """Test default settings"""
        config = Config()

        self.assertEqual(config.get_work_budget(), DEFAULT_WORK_BUDGET)
        self.assertEqual(config.get_exact_cap_bound(), 200)
        self.assertEqual(config.get_jackknife_blocks(), 20)
        self.assertEqual(config.get_batch_size(), 65536)
        self.assertEqual(config.get_restricted_pair_bound(), 4 * 10 ** 6)

    def test_invalid_integer_fields(self):
        """Test rejection of bad integer settings"""
        for settings in ({'threads': 0}, {'threads': 'two'}, {'work_budget': -1},
                         {'batch': True}, {'jackknife_blocks': 1}):
            with self.assertRaises(ValueError):
                Config(settings)

    def test_invalid_quadrature(self):
        """Test rejection of bad quadrature settings"""
        with self.assertRaises(ValueError):
            Config({'quadrature': {'bogus': 1}})
        with self.assertRaises(ValueError):
            Config({'quadrature': {'abs_tol': 0}})
        with self.assertRaises(ValueError):
            Config({'quadrature': 'fast'})

    def test_quadrature_merge(self):
        """Test quadrature overrides merged over defaults"""
        settings = Config({'quadrature': {'abs_tol': 1e-6}}).get_quadrature_settings()

        self.assertEqual(settings['abs_tol'], 1e-6)
        self.assertEqual(settings['rel_tol'], 1e-10)
        self.assertEqual(settings['panel_width'], 1.0)

    @patch.dict(os.environ, {'TORAL_MASS_THREADS': '3'})
    def test_threads_from_environment(self):
        """Test TORAL_MASS_THREADS lookup"""
        self.assertEqual(Config().get_threads(), 3)
        self.assertEqual(Config({'threads': 2}).get_threads(), 2)

    @patch.dict(os.environ, {'TORAL_MASS_THREADS': 'many'})
    def test_invalid_threads_environment(self):
        """Test a malformed TORAL_MASS_THREADS"""
        with self.assertRaises(ValueError):
            Config().get_threads()

    @patch.dict(os.environ, {}, clear=True)
    def test_threads_default_to_cpu_count(self):
        """Test the CPU-count fallback"""
        with patch('toral_mass.config.os.cpu_count', return_value=6):
            self.assertEqual(Config().get_threads(), 6)

    def test_to_dict(self):
        """Test resolved settings echo"""
        resolved = Config({'threads': 1, 'batch': 10}).to_dict()

        self.assertEqual(resolved['threads'], 1)
        self.assertEqual(resolved['batch'], 10)
        self.assertIn('quadrature', resolved)


if __name__ == '__main__':
    unittest.main()
