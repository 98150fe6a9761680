"""
Enums for toral-mass
"""
from enum import Enum


class DiscrepancyMode(str, Enum):
    """Spherical-cap discrepancy evaluation mode"""
    EXACT = 'exact'
    SAMPLED = 'sampled'


class PairDistanceVariant(str, Enum):
    """Pair-distance distribution variants"""
    F = 'F'
    F_LAMBDA0 = 'F_lambda0'
    F3 = 'F3'


class CoefficientType(str, Enum):
    """Coefficient families accepted in experiment files"""
    BOURGAIN = 'bourgain'
    ARC = 'arc'
    BV = 'bv'
    EXPLICIT = 'explicit'


class ReportFormat(str, Enum):
    """Report serialisation formats"""
    JSON = 'json'
    CSV = 'csv'
