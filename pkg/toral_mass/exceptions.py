"""
Custom exceptions for toral-mass
"""
from typing import Optional


class ToralMassError(Exception):
    """Base exception for all toral-mass errors"""
    pass


class ToralValidationError(ToralMassError):
    """Exception raised when an input violates a precondition or invariant"""
    pass


class ToralBudgetError(ToralMassError):
    """Exception raised when an exact computation would exceed its work budget"""

    def __init__(self, message: str, bound: Optional[int] = None, required: Optional[int] = None):
        super().__init__(message)
        self.bound = bound
        self.required = required


class ToralQuadratureError(ToralMassError):
    """Exception raised when a quadrature cannot meet its tolerance"""
    pass


class ToralComputationError(ToralMassError):
    """Exception raised when a numerical invariant breaks at run time"""
    pass
