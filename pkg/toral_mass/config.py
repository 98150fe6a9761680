"""
Runtime configuration for toral-mass
"""
import os
from typing import Dict, Optional, Any


DEFAULT_WORK_BUDGET = 10 ** 9
DEFAULT_EXACT_CAP_BOUND = 200
DEFAULT_RESTRICTED_PAIR_BOUND = 4 * 10 ** 6
DEFAULT_JACKKNIFE_BLOCKS = 20
DEFAULT_BATCH = 65536

_QUADRATURE_DEFAULTS = {
    'rule': 'gauss-kronrod',
    'abs_tol': 1e-10,
    'rel_tol': 1e-10,
    'max_subdivisions': 200,
    'panel_width': 1.0,
}


class Config:
    """Validated runtime settings shared by every service"""

    _INTEGER_KEYS = ('threads', 'work_budget', 'exact_cap_bound', 'restricted_pair_bound',
                     'jackknife_blocks', 'batch')

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        """
        Initialize configuration

        Args:
            config: Settings dictionary; every key is optional
        """
        self.config = dict(config or {})
        self._validate_config()

    def _validate_config(self):
        """Validate known fields"""
        for key in self._INTEGER_KEYS:
            if key not in self.config or self.config[key] is None:
                continue
            value = self.config[key]
            if isinstance(value, bool) or not isinstance(value, int):
                raise ValueError(f"Configuration field '{key}' must be an integer")
            if value < 1:
                raise ValueError(f"Configuration field '{key}' must be positive")

        if self.config.get('jackknife_blocks') is not None and self.config['jackknife_blocks'] < 2:
            raise ValueError("Configuration field 'jackknife_blocks' must be at least 2")

        quadrature = self.config.get('quadrature', {})
        if not isinstance(quadrature, dict):
            raise ValueError("Configuration field 'quadrature' must be a dictionary")
        for field in quadrature:
            if field not in _QUADRATURE_DEFAULTS:
                raise ValueError(f"Unknown quadrature field '{field}'")
        for field in ('abs_tol', 'rel_tol', 'panel_width'):
            if field in quadrature and not float(quadrature[field]) > 0:
                raise ValueError(f"Quadrature field '{field}' must be positive")
        if 'max_subdivisions' in quadrature and int(quadrature['max_subdivisions']) < 1:
            raise ValueError("Quadrature field 'max_subdivisions' must be at least 1")

    def get_threads(self) -> int:
        """
        Get worker thread count

        Resolution order: config 'threads', then the TORAL_MASS_THREADS
        environment variable, then the number of available CPUs.
        """
        if self.config.get('threads'):
            return int(self.config['threads'])
        env_value = os.getenv('TORAL_MASS_THREADS')
        if env_value:
            try:
                threads = int(env_value)
            except ValueError:
                raise ValueError(f"TORAL_MASS_THREADS must be an integer, got '{env_value}'")
            if threads < 1:
                raise ValueError("TORAL_MASS_THREADS must be positive")
            return threads
        return os.cpu_count() or 1

    def get_work_budget(self) -> int:
        """Get the hash-operation budget for exact tuple enumeration"""
        return int(self.config.get('work_budget') or DEFAULT_WORK_BUDGET)

    def get_exact_cap_bound(self) -> int:
        """Get the largest N for which the exact spherical-cap scan is allowed"""
        return int(self.config.get('exact_cap_bound') or DEFAULT_EXACT_CAP_BOUND)

    def get_restricted_pair_bound(self) -> int:
        """Get the pair-sum budget of the exact restricted moments"""
        return int(self.config.get('restricted_pair_bound') or DEFAULT_RESTRICTED_PAIR_BOUND)

    def get_jackknife_blocks(self) -> int:
        """Get the number of jackknife blocks for Monte Carlo standard errors"""
        return int(self.config.get('jackknife_blocks') or DEFAULT_JACKKNIFE_BLOCKS)

    def get_batch_size(self) -> int:
        """Get the default Monte Carlo batch size"""
        return int(self.config.get('batch') or DEFAULT_BATCH)

    def get_quadrature_settings(self) -> Dict[str, Any]:
        """
        Get quadrature settings merged over the defaults

        Returns:
            Dictionary with rule, abs_tol, rel_tol, max_subdivisions and panel_width
        """
        settings = dict(_QUADRATURE_DEFAULTS)
        settings.update(self.config.get('quadrature', {}))
        return settings

    def to_dict(self) -> Dict[str, Any]:
        """Resolved settings, used for the run manifest"""
        return {
            'threads': self.get_threads(),
            'work_budget': self.get_work_budget(),
            'exact_cap_bound': self.get_exact_cap_bound(),
            'restricted_pair_bound': self.get_restricted_pair_bound(),
            'jackknife_blocks': self.get_jackknife_blocks(),
            'batch': self.get_batch_size(),
            'quadrature': self.get_quadrature_settings(),
        }
