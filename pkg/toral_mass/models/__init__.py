"""
toral-mass models

All models are exported from this module for easy importing.
"""
from .base import parse_fraction, parse_real, parse_angle, parse_int, to_jsonable
from .enums import DiscrepancyMode, PairDistanceVariant, CoefficientType, ReportFormat
from .lattice import LatticePointSet, DiscrepancyResult, HypothesisResult
from .coefficients import CoefficientVector, FlatnessReport
from .correlations import StructureSet, QuasiCorrelationCount, CorrelationReport
from .experiment import QuadratureSpec, McSpec, Restriction, ExperimentConfig
from .summary import MomentSummary, CltDiagnostics, RunManifest, gaussian_moment

__all__ = [
    # Parsing helpers
    'parse_fraction',
    'parse_real',
    'parse_angle',
    'parse_int',
    'to_jsonable',
    # Enums
    'DiscrepancyMode',
    'PairDistanceVariant',
    'CoefficientType',
    'ReportFormat',
    # Lattice models
    'LatticePointSet',
    'DiscrepancyResult',
    'HypothesisResult',
    # Coefficient models
    'CoefficientVector',
    'FlatnessReport',
    # Correlation models
    'StructureSet',
    'QuasiCorrelationCount',
    'CorrelationReport',
    # Experiment models
    'QuadratureSpec',
    'McSpec',
    'Restriction',
    'ExperimentConfig',
    # Results
    'MomentSummary',
    'CltDiagnostics',
    'RunManifest',
    'gaussian_moment',
]
