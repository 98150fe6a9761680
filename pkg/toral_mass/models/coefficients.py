"""
Coefficient vector and flatness models
"""
from dataclasses import dataclass, field
from typing import Optional, Dict, Any

import numpy as np

from ..exceptions import ToralValidationError
from .lattice import LatticePointSet

NORMALIZATION_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """
    Hermitian, L2-normalised coefficients c_lambda of f_n

    coeffs[i] belongs to lattice.points[i]; points outside the support carry 0.
    """
    lattice: LatticePointSet
    coeffs: np.ndarray
    kind: str = 'explicit'

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.complex128).reshape(-1).copy()
        if self.lattice.N == 0:
            raise ToralValidationError("coefficient vector needs a non-empty lattice set")
        if coeffs.shape[0] != self.lattice.N:
            raise ToralValidationError("support invariant violated: one coefficient per lattice point")
        if not np.all(np.isfinite(coeffs)):
            raise ToralValidationError("coefficients must be finite")
        if not np.array_equal(coeffs[self.lattice.antipodes], np.conj(coeffs)):
            raise ToralValidationError("hermitian_symmetry violated: c_{-lambda} must equal conj(c_lambda)")
        total = float(np.sum(np.abs(coeffs) ** 2))
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise ToralValidationError(f"l2_normalization violated: sum |c|^2 = {total!r}")
        coeffs.setflags(write=False)
        object.__setattr__(self, 'coeffs', coeffs)

    @property
    def d(self) -> int:
        return self.lattice.d

    @property
    def N(self) -> int:
        return self.lattice.N

    def squared_moduli(self) -> np.ndarray:
        """The vector v of |c_lambda|^2"""
        return np.abs(self.coeffs) ** 2

    def to_dict(self) -> Dict[str, Any]:
        """Explicit-entry form, loadable back through the experiment file"""
        entries = []
        for point, value in zip(self.lattice.points.tolist(), self.coeffs.tolist()):
            if value != 0:
                entries.append({'lambda': point, 're': value.real, 'im': value.imag})
        return {'type': 'explicit', 'family': self.kind, 'entries': entries}


@dataclass
class FlatnessReport:
    """
    Flatness quantities of one coefficient vector

    V and V_tilde need the circular successor and are None for d=3.
    """
    v_inf: float
    A4: float
    theta: float
    V: Optional[float] = None
    V_tilde: Optional[float] = None
    memberships: Dict[str, Optional[bool]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'v_inf': self.v_inf,
            'A4': self.A4,
            'V': self.V,
            'V_tilde': self.V_tilde,
            'theta': self.theta,
            'memberships': dict(self.memberships),
        }
