"""
Base service class with common validation and response formatting
"""
import logging
from typing import Dict, Any, Optional

from ...config import Config
from ...exceptions import ToralValidationError, ToralBudgetError
from ...models import LatticePointSet

logger = logging.getLogger(__name__)


class BaseService:
    """Base class for all service classes"""

    def __init__(self, config: Optional[Config] = None):
        """
        Initialize base service

        Args:
            config: Configuration instance; defaults apply when omitted
        """
        self.config = config or Config()

    def _success_response(self, data: Optional[Dict[str, Any]] = None, **kwargs) -> Dict[str, Any]:
        """
        Create success response

        Args:
            data: Response data dictionary
            **kwargs: Additional response fields

        Returns:
            Success response dictionary
        """
        response: Dict[str, Any] = {'success': True}
        if data is not None:
            response['data'] = data
        response.update(kwargs)
        return response

    def _error_response(self, error: str, error_code: Optional[str] = None) -> Dict[str, Any]:
        """
        Create error response

        Args:
            error: Human-readable error message
            error_code: Optional error code

        Returns:
            Error response dictionary
        """
        response: Dict[str, Any] = {
            'success': False,
            'error': error
        }
        if error_code:
            response['errorCode'] = error_code
        return response

    def _validate_dimension(self, d: int, allowed=(2, 3)):
        """
        Raises:
            ToralValidationError: d not in allowed
        """
        if d not in allowed:
            raise ToralValidationError(f"dimension must be one of {list(allowed)}, got {d}")

    def _validate_lattice(self, lattice: LatticePointSet, d: Optional[int] = None, min_points: int = 1):
        if not isinstance(lattice, LatticePointSet):
            raise ToralValidationError("expected a LatticePointSet")
        if d is not None and lattice.d != d:
            raise ToralValidationError(f"operation requires d={d}, got d={lattice.d}")
        if lattice.N < min_points:
            raise ToralValidationError(f"operation requires at least {min_points} lattice point(s), E_{lattice.n} has {lattice.N}")

    def _validate_positive(self, value: float, name: str):
        if not value > 0:
            raise ToralValidationError(f"{name} must be positive")

    def _check_budget(self, required: int, what: str, bound: Optional[int] = None):
        """
        Raise before starting work that exceeds the budget

        Args:
            required: Operations the exact computation needs
            what: Description used in the message
            bound: Budget; the configured work budget when omitted

        Raises:
            ToralBudgetError: required > bound
        """
        bound = self.config.get_work_budget() if bound is None else bound
        if required > bound:
            raise ToralBudgetError(
                f"{what} needs {required} operations, above the budget of {bound}",
                bound=bound,
                required=required,
            )
        logger.debug("%s: %d operations (budget %d)", what, required, bound)
