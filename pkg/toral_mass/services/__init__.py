"""
Service modules for toral-mass

Services are organized by concern:
- spectral: lattice points, special functions, eigenfunctions, correlations and masses
- reporting: report files, self-tests and the command runner
"""
from .spectral import (
    BaseService,
    SpecfunService,
    LatticeService,
    EigenfunctionService,
    CorrelationService,
    MassService,
    SamplingService,
    PairDistanceService,
)
from .reporting import ReportService, SelftestService, RunService

__all__ = [
    # Spectral services
    'BaseService',
    'SpecfunService',
    'LatticeService',
    'EigenfunctionService',
    'CorrelationService',
    'MassService',
    'SamplingService',
    'PairDistanceService',
    # Reporting services
    'ReportService',
    'SelftestService',
    'RunService',
]
