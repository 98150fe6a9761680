"""
Backend implementations for toral-mass

- compute: in-process exact and Monte Carlo computations
"""
from .compute_backend import ComputeBackend

__all__ = ['ComputeBackend']
