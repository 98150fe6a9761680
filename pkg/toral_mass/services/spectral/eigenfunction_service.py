"""
Eigenfunction service: coefficient families, pointwise evaluation and flatness
"""
import logging
import math
from typing import Dict, Any, Optional, Sequence, Tuple, Union

import numpy as np

from .base_service import BaseService
from ...exceptions import ToralValidationError, ToralComputationError
from ...kernels import uniform_block, Stream
from ...models import (
    LatticePointSet,
    CoefficientVector,
    FlatnessReport,
    CoefficientType,
    parse_fraction,
    parse_real,
    parse_angle,
    parse_int,
)

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
IMAG_TOL = 1e-10
UNIT_MEAN_TOL = 1e-9
FLAT_TOL = 1e-12
ALL_PLUS = 'all_plus'


class EigenfunctionService(BaseService):
    """Builds coefficient vectors c_lambda and measures their flatness"""

    def make_bourgain(self, lattice: LatticePointSet, sign_seed: Union[int, str] = ALL_PLUS) -> CoefficientVector:
        """
        c_lambda = eps_lambda / sqrt(N) with one sign per orbit {lambda, -lambda}

        The sign of an orbit is drawn from the signs stream at the index of
        its first member in canonical order; 'all_plus' gives every sign +1.
        """
        self._validate_lattice(lattice, min_points=2)
        N = lattice.N
        signs = np.ones(N)
        if sign_seed != ALL_PLUS:
            seed = parse_int(sign_seed, 'coefficients.seed')
            if not 0 <= seed < (1 << 64):
                raise ToralValidationError("coefficients.seed must be a 64-bit unsigned integer")
            draws = uniform_block(seed, Stream.SIGNS, 0, N, width=1)[:, 0]
            representative = np.minimum(np.arange(N), lattice.antipodes)
            signs = np.where(draws[representative] < 0.5, -1.0, 1.0)
        coeffs = signs / math.sqrt(N)
        return CoefficientVector(lattice=lattice, coeffs=coeffs, kind=CoefficientType.BOURGAIN.value)

    def make_arc_supported(self, lattice: LatticePointSet, t) -> CoefficientVector:
        """
        Equal weights on Nt points: Nt/2 clockwise-consecutive points and their antipodes

        The block starts at canonical index 0 and walks clockwise.

        Raises:
            ToralValidationError: t outside (0, 1], Nt not an integer, or Nt odd
        """
        self._validate_lattice(lattice, d=2, min_points=2)
        t = parse_fraction(t, 'coefficients.t')
        if not 0 < t <= 1:
            raise ToralValidationError("arc fraction t must lie in (0, 1]")
        size = t * lattice.N
        if size.denominator != 1:
            raise ToralValidationError(f"N*t must be an integer, got {size}")
        size = int(size)
        if size % 2:
            raise ToralValidationError("N*t must be even for a negation-closed block")
        half = size // 2
        block = (-np.arange(half)) % lattice.N
        support = np.union1d(block, lattice.antipodes[block])
        if support.shape[0] != size:
            raise ToralComputationError("arc block overlaps its antipodes")
        coeffs = np.zeros(lattice.N)
        coeffs[support] = 1.0 / math.sqrt(size)
        return CoefficientVector(lattice=lattice, coeffs=coeffs, kind=CoefficientType.ARC.value)

    def _density_on_angles(
        self, angles: np.ndarray, breakpoints: Sequence[Any], values: Sequence[Any]
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if len(breakpoints) != len(values) or not breakpoints:
            raise ToralValidationError("bv density needs one value per breakpoint")
        edges = np.array([parse_angle(b, 'coefficients.breakpoints') for b in breakpoints])
        heights = np.array([parse_real(v, 'coefficients.values') for v in values])
        if edges[0] != 0.0:
            raise ToralValidationError("bv density breakpoints must start at 0")
        if np.any(np.diff(edges) <= 0) or edges[-1] >= TWO_PI:
            raise ToralValidationError("bv density breakpoints must increase within [0, 2pi)")
        if np.any(heights < 0):
            raise ToralValidationError("bv density must be non-negative")
        widths = np.diff(np.append(edges, TWO_PI))
        mean = float(np.dot(heights, widths)) / TWO_PI
        if abs(mean - 1.0) > UNIT_MEAN_TOL:
            raise ToralValidationError(f"bv density must have unit mean, got {mean!r}")
        pieces = np.searchsorted(edges, angles, side='right') - 1
        return heights[pieces], heights, widths

    def make_bv_density(
        self,
        lattice: LatticePointSet,
        breakpoints: Sequence[Any],
        values: Sequence[Any],
        symmetrize: bool = True
    ) -> CoefficientVector:
        """
        |c_lambda|^2 proportional to a piecewise-constant density g at the lattice angles

        Args:
            lattice: Set with d=2
            breakpoints: Increasing angles starting at 0; piece i is [b_i, b_{i+1})
            values: Non-negative value of g on each piece, unit mean overall
            symmetrize: Average g(phi) with g(phi + pi) at the lattice angles

        Raises:
            ToralValidationError: g vanishes on every lattice angle, or g is
                not antipodally symmetric on the lattice and symmetrize is off
        """
        self._validate_lattice(lattice, d=2, min_points=2)
        weights, _, _ = self._density_on_angles(lattice.angles, breakpoints, values)
        mirrored = weights[lattice.antipodes]
        if symmetrize:
            weights = (weights + mirrored) / 2.0
        elif not np.array_equal(weights, mirrored):
            raise ToralValidationError("hermitian_symmetry violated: g differs at antipodal lattice angles")
        total = float(weights.sum())
        if total <= 0:
            raise ToralValidationError("bv density vanishes on every lattice angle")
        coeffs = np.sqrt(weights / total)
        return CoefficientVector(lattice=lattice, coeffs=coeffs, kind=CoefficientType.BV.value)

    def bv_l2_norm_squared(self, breakpoints: Sequence[Any], values: Sequence[Any]) -> float:
        """||g||_2^2 with respect to normalised arc length"""
        _, heights, widths = self._density_on_angles(np.empty(0), breakpoints, values)
        return float(np.dot(heights * heights, widths)) / TWO_PI

    def from_spec(self, lattice: LatticePointSet, spec: Dict[str, Any]) -> CoefficientVector:
        """
        Build a coefficient vector from the 'coefficients' fragment of an experiment file

        Raises:
            ToralValidationError: Unknown type, bad parameters, or explicit
                entries that break an invariant
        """
        if not isinstance(spec, dict) or 'type' not in spec:
            raise ToralValidationError("coefficients must be an object with a 'type'")
        try:
            kind = CoefficientType(spec['type'])
        except ValueError:
            raise ToralValidationError(f"unknown coefficient type: {spec['type']!r}")

        if kind is CoefficientType.BOURGAIN:
            return self.make_bourgain(lattice, spec.get('seed', ALL_PLUS))
        if kind is CoefficientType.ARC:
            if 't' not in spec:
                raise ToralValidationError("arc coefficients need 't'")
            return self.make_arc_supported(lattice, spec['t'])
        if kind is CoefficientType.BV:
            return self.make_bv_density(
                lattice,
                spec.get('breakpoints', []),
                spec.get('values', []),
                symmetrize=bool(spec.get('symmetrize', True)),
            )

        self._validate_lattice(lattice)
        coeffs = np.zeros(lattice.N, dtype=np.complex128)
        seen = set()
        for entry in spec.get('entries', []):
            index = lattice.index_of(entry.get('lambda', []))
            if index in seen:
                raise ToralValidationError(f"duplicate coefficient for {entry['lambda']}")
            seen.add(index)
            coeffs[index] = complex(parse_real(entry.get('re', 0), 'entries.re'),
                                    parse_real(entry.get('im', 0), 'entries.im'))
        return CoefficientVector(lattice=lattice, coeffs=coeffs, kind=CoefficientType.EXPLICIT.value)

    def evaluate(self, cv: CoefficientVector, x) -> Union[float, np.ndarray]:
        """
        f_n(x) = sum_lambda c_lambda e(<x, lambda>)

        Args:
            cv: Coefficient vector
            x: One point of [0,1)^d or an (m, d) array of points

        Raises:
            ToralComputationError: |Im f| above 1e-10 * N
        """
        points = np.asarray(x, dtype=np.float64)
        single = points.ndim == 1
        points = np.atleast_2d(points)
        if points.shape[1] != cv.d:
            raise ToralValidationError(f"evaluation point must have {cv.d} coordinates")
        phases = np.exp(2j * np.pi * (points @ cv.lattice.points.T.astype(np.float64)))
        values = phases @ cv.coeffs
        worst = float(np.max(np.abs(values.imag))) if values.size else 0.0
        if worst > IMAG_TOL * cv.N:
            raise ToralComputationError(f"field is not real: |Im f| = {worst:.3e}")
        return float(values.real[0]) if single else values.real

    def total_variation(self, cv: CoefficientVector) -> float:
        """V(v) = N * sum |v_{lambda_+} - v_lambda| along the clockwise successor"""
        if cv.d != 2:
            raise ToralValidationError("total variation needs the circular order of d=2")
        v = cv.squared_moduli()
        return float(cv.N * np.abs(np.roll(v, 1) - v).sum())

    def predicted_norm_factor(self, cv: CoefficientVector) -> float:
        """A_4(v) = N * sum |c|^4, equal to cos(theta)^-2"""
        v = cv.squared_moduli()
        return float(cv.N * np.dot(v, v))

    def flatness_report(
        self,
        cv: CoefficientVector,
        epsilon: Optional[float] = None,
        T: Optional[float] = None,
        eta: Optional[float] = None
    ) -> FlatnessReport:
        """
        v_inf, A4, theta and, for d=2, V and V_tilde with class memberships

        A membership whose parameters are missing (or undefined for the
        dimension) is reported as None.
        """
        v = cv.squared_moduli()
        N = cv.N
        v_inf = float(N * v.max())
        A4 = self.predicted_norm_factor(cv)
        theta = math.atan(math.sqrt(max(A4 - 1.0, 0.0)))

        V = V_tilde = None
        if cv.d == 2:
            V = self.total_variation(cv)
            V_tilde = v_inf * V / A4

        memberships: Dict[str, Optional[bool]] = {
            'bourgain': bool(v_inf <= 1.0 + FLAT_TOL),
            'ultraflat': None,
            'F1': None,
            'F2': None,
        }
        if epsilon is not None:
            memberships['ultraflat'] = bool(v_inf <= float(N) ** epsilon)
        if T is not None and eta is not None:
            if T <= 1:
                raise ToralValidationError("T must exceed 1 for the flatness classes")
            memberships['F2'] = bool(v_inf < T ** eta)
            if V_tilde is not None:
                memberships['F1'] = bool(V_tilde < eta * T / math.log(T))

        return FlatnessReport(v_inf=v_inf, A4=A4, theta=theta, V=V, V_tilde=V_tilde, memberships=memberships)
