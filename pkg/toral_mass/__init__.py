"""
toral-mass

Exact and Monte Carlo statistics of the L2-mass of toral Laplace
eigenfunctions in balls of wavelength-scale radius, in dimensions 2 and 3.
"""

__version__ = '0.1.0'

from .sdk import ToralMassSDK
from .config import Config
from .exceptions import (
    ToralMassError,
    ToralValidationError,
    ToralBudgetError,
    ToralQuadratureError,
    ToralComputationError,
)
from .models import (
    LatticePointSet,
    DiscrepancyResult,
    HypothesisResult,
    CoefficientVector,
    FlatnessReport,
    StructureSet,
    QuasiCorrelationCount,
    CorrelationReport,
    QuadratureSpec,
    McSpec,
    Restriction,
    ExperimentConfig,
    MomentSummary,
    CltDiagnostics,
    RunManifest,
)

__all__ = [
    'ToralMassSDK',
    'Config',
    'ToralMassError',
    'ToralValidationError',
    'ToralBudgetError',
    'ToralQuadratureError',
    'ToralComputationError',
    'LatticePointSet',
    'DiscrepancyResult',
    'HypothesisResult',
    'CoefficientVector',
    'FlatnessReport',
    'StructureSet',
    'QuasiCorrelationCount',
    'CorrelationReport',
    'QuadratureSpec',
    'McSpec',
    'Restriction',
    'ExperimentConfig',
    'MomentSummary',
    'CltDiagnostics',
    'RunManifest',
]
