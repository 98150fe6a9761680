"""
Compute backend

Builds each service on first use; all of them share one configuration and,
through it, one executor.
"""
from ..config import Config
from ..services.spectral.specfun_service import SpecfunService
from ..services.spectral.lattice_service import LatticeService
from ..services.spectral.eigenfunction_service import EigenfunctionService
from ..services.spectral.correlation_service import CorrelationService
from ..services.spectral.mass_service import MassService
from ..services.spectral.sampling_service import SamplingService
from ..services.spectral.pair_distance_service import PairDistanceService
from ..services.reporting.report_service import ReportService
from ..services.reporting.selftest_service import SelftestService
from ..services.reporting.run_service import RunService


class ComputeBackend:
    """
    In-process backend for the exact and Monte Carlo computations

    Example:
        >>> backend = ComputeBackend(Config({'threads': 4}))
        >>> lattice = backend.lattices.enumerate_lattice_points(25, 2)
    """

    def __init__(self, config: Config):
        """
        Initialize compute backend

        Args:
            config: Configuration instance
        """
        self.config = config
        self._specfun = None
        self._lattices = None
        self._eigenfunctions = None
        self._correlations = None
        self._mass = None
        self._sampling = None
        self._pair_distances = None
        self._reports = None
        self._selftests = None
        self._runner = None

    @property
    def specfun(self) -> SpecfunService:
        """Get SpecfunService instance"""
        if self._specfun is None:
            self._specfun = SpecfunService(self.config)
        return self._specfun

    @property
    def lattices(self) -> LatticeService:
        """Get LatticeService instance"""
        if self._lattices is None:
            self._lattices = LatticeService(self.config)
        return self._lattices

    @property
    def eigenfunctions(self) -> EigenfunctionService:
        """Get EigenfunctionService instance"""
        if self._eigenfunctions is None:
            self._eigenfunctions = EigenfunctionService(self.config)
        return self._eigenfunctions

    @property
    def correlations(self) -> CorrelationService:
        """Get CorrelationService instance"""
        if self._correlations is None:
            self._correlations = CorrelationService(self.config)
        return self._correlations

    @property
    def mass(self) -> MassService:
        """Get MassService instance"""
        if self._mass is None:
            self._mass = MassService(self.config)
        return self._mass

    @property
    def sampling(self) -> SamplingService:
        """Get SamplingService instance"""
        if self._sampling is None:
            self._sampling = SamplingService(self.config)
        return self._sampling

    @property
    def pair_distances(self) -> PairDistanceService:
        """Get PairDistanceService instance"""
        if self._pair_distances is None:
            self._pair_distances = PairDistanceService(self.config)
        return self._pair_distances

    @property
    def reports(self) -> ReportService:
        """Get ReportService instance"""
        if self._reports is None:
            self._reports = ReportService(self.config)
        return self._reports

    @property
    def selftests(self) -> SelftestService:
        """Get SelftestService instance"""
        if self._selftests is None:
            self._selftests = SelftestService(self.config)
        return self._selftests

    @property
    def runner(self) -> RunService:
        """Get RunService instance"""
        if self._runner is None:
            self._runner = RunService(self)
        return self._runner
