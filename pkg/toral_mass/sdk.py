"""
toral-mass SDK main class
"""
from typing import Dict, Any, Optional

from .config import Config
from .executors import reset_executor
from .backends.compute_backend import ComputeBackend
from .exceptions import ToralMassError


class ToralMassSDK:
    """
    Main entry point of the library

    Provides access to the compute backend, whose services cover lattice
    points, eigenfunctions, correlations, masses and reports.
    """

    def __init__(self, config: Config):
        """
        Initialize SDK instance

        Args:
            config: Configuration instance
        """
        self.config = config
        self._compute = None

    @classmethod
    def initialize(cls, config: Optional[Dict[str, Any]] = None) -> 'ToralMassSDK':
        """
        Initialize SDK with configuration

        Args:
            config: Runtime settings dictionary; every key is optional

        Returns:
            Initialized ToralMassSDK instance

        Raises:
            ToralMassError: The settings are invalid

        Example:
            >>> sdk = ToralMassSDK.initialize({'threads': 4, 'work_budget': 10 ** 8})
            >>> lattice = sdk.compute.lattices.enumerate_lattice_points(25, 2)
            >>> lattice.N
            12
        """
        try:
            config_obj = Config(config)
            return cls(config_obj)
        except Exception as e:
            raise ToralMassError(f"Failed to initialize SDK: {str(e)}")

    @property
    def compute(self) -> ComputeBackend:
        """
        Get compute backend instance

        Example:
            >>> sdk = ToralMassSDK.initialize()
            >>> cv = sdk.compute.eigenfunctions.make_bourgain(lattice, 7)
        """
        if self._compute is None:
            self._compute = ComputeBackend(self.config)
        return self._compute

    def close(self):
        """Shut down the worker pool (useful for cleanup)"""
        reset_executor()
        self._compute = None
