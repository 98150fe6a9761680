"""
Spectral services

One service per area: lattice points, special functions, eigenfunctions,
correlations, the mass X and its sampling, and pair distances.
"""
from .base_service import BaseService
from .specfun_service import SpecfunService
from .lattice_service import LatticeService
from .eigenfunction_service import EigenfunctionService
from .correlation_service import CorrelationService
from .mass_service import MassService, DifferenceTable
from .sampling_service import SamplingService
from .pair_distance_service import PairDistanceService

__all__ = [
    'BaseService',
    'SpecfunService',
    'LatticeService',
    'EigenfunctionService',
    'CorrelationService',
    'MassService',
    'DifferenceTable',
    'SamplingService',
    'PairDistanceService',
]
