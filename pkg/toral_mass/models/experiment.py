"""
Experiment description models

An experiment file is one JSON document, for example:

    {
        "n": 325, "d": 2,
        "coefficients": {"type": "bourgain", "seed": 7},
        "T": "5",
        "mc": {"M": 1000000, "seed": 7, "batch": 65536},
        "moments_upto": 6
    }

"r" may be given instead of "T" (r = T / sqrt(n)). A restriction
{"x0": [...], "rho": "0.01"} or {"x0": [...], "delta": "0.4"}
(rho = n^(-1/2 + delta)) switches to ball-restricted sampling.
"""
import copy
import math
from dataclasses import dataclass
from typing import Optional, Dict, Any

from ..exceptions import ToralValidationError
from .base import parse_int, parse_real
from .enums import CoefficientType

_U64 = 1 << 64
T_CONSISTENCY_TOL = 1e-12


@dataclass(frozen=True)
class QuadratureSpec:
    """Adaptive quadrature settings"""
    rule: str = 'gauss-kronrod'
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    panel_width: float = 1.0

    def __post_init__(self):
        if not self.abs_tol > 0 or not self.rel_tol > 0:
            raise ToralValidationError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ToralValidationError("max_subdivisions must be at least 1")
        if not self.panel_width > 0:
            raise ToralValidationError("panel_width must be positive")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'QuadratureSpec':
        return cls(
            rule=str(data.get('rule', 'gauss-kronrod')),
            abs_tol=float(data.get('abs_tol', 1e-10)),
            rel_tol=float(data.get('rel_tol', 1e-10)),
            max_subdivisions=int(data.get('max_subdivisions', 200)),
            panel_width=float(data.get('panel_width', 1.0)),
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'rule': self.rule,
            'abs_tol': self.abs_tol,
            'rel_tol': self.rel_tol,
            'max_subdivisions': self.max_subdivisions,
            'panel_width': self.panel_width,
        }


@dataclass(frozen=True)
class McSpec:
    """Monte Carlo sampling parameters"""
    M: int
    seed: int
    batch: Optional[int] = None

    def __post_init__(self):
        if self.M < 2:
            raise ToralValidationError("mc.M must be at least 2")
        if not 0 <= self.seed < _U64:
            raise ToralValidationError("mc.seed must be a 64-bit unsigned integer")
        if self.batch is not None and self.batch < 1:
            raise ToralValidationError("mc.batch must be positive")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'McSpec':
        if 'M' not in data:
            raise ToralValidationError("mc must include 'M'")
        batch = data.get('batch')
        return cls(
            M=parse_int(data['M'], 'mc.M'),
            seed=parse_int(data.get('seed', 0), 'mc.seed'),
            batch=parse_int(batch, 'mc.batch') if batch is not None else None,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {'M': self.M, 'seed': self.seed, 'batch': self.batch}


@dataclass(frozen=True)
class Restriction:
    """Ball B_{x0}(rho) from which the centre is drawn"""
    x0: tuple
    rho: float

    def __post_init__(self):
        if not 0.0 < self.rho < 0.5:
            raise ToralValidationError("restriction.rho must lie in (0, 1/2)")
        if any(not 0.0 <= c < 1.0 for c in self.x0):
            raise ToralValidationError("restriction.x0 must lie in [0, 1)^d")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], n: int, d: int) -> 'Restriction':
        x0 = data.get('x0', [0.0] * d)
        if not isinstance(x0, (list, tuple)) or len(x0) != d:
            raise ToralValidationError(f"restriction.x0 must have {d} coordinates")
        if 'rho' in data and 'delta' in data:
            raise ToralValidationError("restriction takes either 'rho' or 'delta', not both")
        if 'rho' in data:
            rho = parse_real(data['rho'], 'restriction.rho')
        elif 'delta' in data:
            delta = parse_real(data['delta'], 'restriction.delta')
            rho = float(n) ** (-0.5 + delta)
        else:
            raise ToralValidationError("restriction must include 'rho' or 'delta'")
        return cls(x0=tuple(parse_real(c, 'restriction.x0') for c in x0), rho=rho)

    def to_dict(self) -> Dict[str, Any]:
        return {'x0': list(self.x0), 'rho': self.rho}


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Full declarative description of one run

    The admissible-range symbols of the asymptotic statements (r0, T0, ...)
    only guide the choice of r and T here; they are not modelled.
    """
    n: int
    d: int
    coefficients: Dict[str, Any]
    r: float
    T: float
    mc: Optional[McSpec] = None
    restriction: Optional[Restriction] = None
    moments_upto: int = 4
    raw: Optional[Dict[str, Any]] = None

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> 'ExperimentConfig':
        """
        Validate and build an experiment

        Raises:
            ToralValidationError: Any field violates a module precondition
        """
        if not isinstance(data, dict):
            raise ToralValidationError("experiment must be a JSON object")
        for field in ('n', 'd', 'coefficients'):
            if field not in data:
                raise ToralValidationError(f"experiment must include '{field}'")
        n = parse_int(data['n'], 'n')
        d = parse_int(data['d'], 'd')
        if n < 1:
            raise ToralValidationError("n must be a positive integer")
        if d not in (2, 3):
            raise ToralValidationError("d must be 2 or 3")

        coefficients = data['coefficients']
        if not isinstance(coefficients, dict) or 'type' not in coefficients:
            raise ToralValidationError("coefficients must be an object with a 'type'")
        try:
            CoefficientType(coefficients['type'])
        except ValueError:
            raise ToralValidationError(f"unknown coefficient type: {coefficients['type']!r}")

        sqrt_n = math.sqrt(n)
        if 'r' not in data and 'T' not in data:
            raise ToralValidationError("experiment must include 'r' or 'T'")
        if 'r' in data:
            r = parse_real(data['r'], 'r')
            T = r * sqrt_n
            if 'T' in data:
                given_T = parse_real(data['T'], 'T')
                if abs(given_T - T) > T_CONSISTENCY_TOL * max(1.0, abs(given_T)):
                    raise ToralValidationError("radius invariant violated: T must equal r * sqrt(n)")
                T = given_T
        else:
            T = parse_real(data['T'], 'T')
            r = T / sqrt_n
        if not 0.0 < r < 0.5:
            raise ToralValidationError("radius invariant violated: r must lie in (0, 1/2)")

        mc = McSpec.from_dict(data['mc']) if data.get('mc') is not None else None
        restriction = (Restriction.from_dict(data['restriction'], n, d)
                       if data.get('restriction') is not None else None)
        moments_upto = parse_int(data.get('moments_upto', 4), 'moments_upto')
        if moments_upto < 2:
            raise ToralValidationError("moments_upto must be at least 2")

        return cls(
            n=n,
            d=d,
            coefficients=copy.deepcopy(coefficients),
            r=r,
            T=T,
            mc=mc,
            restriction=restriction,
            moments_upto=moments_upto,
            raw=copy.deepcopy(data),
        )

    def with_overrides(self, n: Optional[int] = None, seed: Optional[int] = None,
                       M: Optional[int] = None) -> 'ExperimentConfig':
        """Re-validate with CLI overrides applied"""
        data = copy.deepcopy(self.raw if self.raw is not None else self.to_dict())
        if n is not None:
            data['n'] = n
            if 'T' in data and 'r' in data:
                del data['r']
        if seed is not None or M is not None:
            mc = dict(data.get('mc') or {})
            if seed is not None:
                mc['seed'] = seed
            if M is not None:
                mc['M'] = M
            data['mc'] = mc
        return ExperimentConfig.from_dict(data)

    def require_mc(self) -> McSpec:
        if self.mc is None:
            raise ToralValidationError("experiment must include 'mc' for sampling commands")
        return self.mc

    def to_dict(self) -> Dict[str, Any]:
        result: Dict[str, Any] = {
            'n': self.n,
            'd': self.d,
            'coefficients': copy.deepcopy(self.coefficients),
            'r': self.r,
            'T': self.T,
            'moments_upto': self.moments_upto,
        }
        if self.mc is not None:
            result['mc'] = self.mc.to_dict()
        if self.restriction is not None:
            result['restriction'] = self.restriction.to_dict()
        return result
