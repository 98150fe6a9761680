"""
Special-function service: Bessel kernels, certified quadrature and the identity suite
"""
import logging
import math
from fractions import Fraction
from typing import Callable, Dict, Any, List, Optional, Tuple

import numpy as np
from scipy import integrate as scipy_integrate

from .base_service import BaseService
from ...exceptions import ToralValidationError, ToralQuadratureError
from ...kernels import bessel
from ...models import QuadratureSpec

logger = logging.getLogger(__name__)

H2_INTEGRAL = 2.0 / (3.0 * math.pi ** 2)
S_H3_INTEGRAL = (2.0 * math.pi) ** -3
IDENTITY_TOL = 1e-8
PAIR_IDENTITY_TOL = 1e-12
DERIVATIVE_TOL = 1e-6
FD_STEP = 1e-6
_TAIL_DOUBLINGS = 64


def j_three_halves_series(x, terms: int = 200) -> float:
    """
    J_{3/2}(x) from its power series, summed in exact rational arithmetic

    J_{3/2}(x) = (x/2)^{3/2} / sqrt(pi) * sum_k (-1)^k (x/2)^{2k} 2^{k+2} / (k! (2k+3)!!)
    """
    half = Fraction(str(x)) / 2
    half_sq = half * half
    total = Fraction(0)
    power = Fraction(1)
    factorial = 1
    double_factorial = 3
    for k in range(terms):
        if k > 0:
            power *= half_sq
            factorial *= k
            double_factorial *= 2 * k + 3
        term = power * (2 ** (k + 2)) / (factorial * double_factorial)
        total += -term if k % 2 else term
    return float(total) * float(half) ** 1.5 / math.sqrt(math.pi)


class SpecfunService(BaseService):
    """Bessel kernels g_d, h_d and the quadrature used to certify their integrals"""

    def quadrature_spec(self, **overrides) -> QuadratureSpec:
        """QuadratureSpec from the configured settings with optional overrides"""
        settings = self.config.get_quadrature_settings()
        settings.update(overrides)
        return QuadratureSpec.from_dict(settings)

    def bessel_j(self, order, x):
        return bessel.bessel_j(order, x)

    def g_d(self, d: int, x):
        self._validate_dimension(d)
        return bessel.g_kernel(d, x)

    def h_d(self, d: int, x):
        self._validate_dimension(d)
        return bessel.h_kernel(d, x)

    def g2_derivative(self, x):
        return bessel.g2_derivative(x)

    def integrate(
        self,
        f: Callable[[float], float],
        a: float,
        b: float,
        spec: Optional[QuadratureSpec] = None,
        tail_bound: Optional[Callable[[float], float]] = None
    ) -> Tuple[float, float]:
        """
        Adaptive Gauss-Kronrod quadrature over unit panels

        An infinite upper limit is truncated at the first doubling point c
        where tail_bound(c) <= abs_tol / 2; the bound is added to err_est.

        Args:
            f: Real integrand, finite on (a, b)
            a: Lower limit
            b: Upper limit, may be math.inf
            spec: Tolerances; the configured defaults when omitted
            tail_bound: c -> upper bound on the integral of |f| over [c, inf)

        Returns:
            (value, err_est)

        Raises:
            ToralValidationError: a >= b, or an infinite limit without a tail bound
            ToralQuadratureError: Tolerance not met within max_subdivisions
        """
        spec = spec or self.quadrature_spec()
        if not a < b:
            raise ToralValidationError("integration requires a < b")
        if math.isinf(a):
            raise ToralValidationError("lower limit must be finite")

        upper = b
        tail = 0.0
        if math.isinf(b):
            if tail_bound is None:
                raise ToralValidationError("an infinite upper limit needs a tail bound")
            c = max(a + spec.panel_width, 1.0)
            for _ in range(_TAIL_DOUBLINGS):
                tail = tail_bound(c)
                if tail <= spec.abs_tol / 2:
                    break
                c *= 2.0
            else:
                raise ToralQuadratureError("tail bound never falls below abs_tol / 2")
            upper = c
            logger.debug("truncated at %g with certified tail %.3e", upper, tail)

        panels = max(1, int(math.ceil((upper - a) / spec.panel_width)))
        edges = [a + spec.panel_width * i for i in range(panels)] + [upper]
        panel_tol = spec.abs_tol / (2.0 * panels)

        value = 0.0
        err_est = tail
        for lo, hi in zip(edges[:-1], edges[1:]):
            if hi <= lo:
                continue
            out = scipy_integrate.quad(
                f, lo, hi,
                epsabs=panel_tol,
                epsrel=spec.rel_tol,
                limit=spec.max_subdivisions,
                full_output=1,
            )
            if len(out) > 3:
                raise ToralQuadratureError(f"quadrature failed on [{lo}, {hi}]: {out[3]}")
            value += out[0]
            err_est += out[1]

        if err_est > max(spec.abs_tol, spec.rel_tol * abs(value)):
            raise ToralQuadratureError(
                f"error estimate {err_est:.3e} above tolerance {spec.abs_tol:.3e}"
            )
        return value, err_est

    def selftest(self) -> List[Dict[str, Any]]:
        """
        Run the special-function identity suite

        Returns:
            One row per check: name, value, target, error, tolerance, passed
        """
        rows: List[Dict[str, Any]] = []

        def record(name: str, value: float, target: float, error: float, tolerance: float):
            rows.append({
                'name': name,
                'value': value,
                'target': target,
                'error': error,
                'tolerance': tolerance,
                'passed': bool(error <= tolerance),
            })

        spec = self.quadrature_spec(abs_tol=1e-9, rel_tol=1e-12)
        value, _ = self.integrate(lambda s: bessel.h_kernel(2, s), 0.0, math.inf, spec, bessel.h2_tail_bound)
        record('integral_h2', value, H2_INTEGRAL, abs(value - H2_INTEGRAL), IDENTITY_TOL)

        value, _ = self.integrate(lambda s: s * bessel.h_kernel(3, s), 0.0, math.inf, spec, bessel.s_h3_tail_bound)
        record('integral_s_h3', value, S_H3_INTEGRAL, abs(value - S_H3_INTEGRAL), IDENTITY_TOL)

        grid = np.logspace(-8, 4, 2001)
        for d in (2, 3):
            g = bessel.g_kernel(d, grid)
            h = bessel.h_kernel(d, grid)
            record(f'h{d}_equals_g{d}_squared', 0.0, 0.0, float(np.max(np.abs(h - g * g))), PAIR_IDENTITY_TOL)

        record('g2_at_zero', bessel.g_kernel(2, 0.0), 0.5, abs(bessel.g_kernel(2, 0.0) - 0.5), PAIR_IDENTITY_TOL)
        g3_zero = (4.0 * math.pi / 3.0) / (2.0 * math.pi) ** 1.5
        record('g3_at_zero', bessel.g_kernel(3, 0.0), g3_zero, abs(bessel.g_kernel(3, 0.0) - g3_zero), PAIR_IDENTITY_TOL)

        xs = np.logspace(-2, 2, 401)
        derivative = bessel.g2_derivative(xs)
        finite_difference = (bessel.g_kernel(2, xs + FD_STEP) - bessel.g_kernel(2, xs - FD_STEP)) / (2 * FD_STEP)
        relative = np.abs(finite_difference - derivative) / np.maximum(np.abs(derivative), 1e-3)
        record('g2_derivative_finite_difference', 0.0, 0.0, float(np.max(relative)), DERIVATIVE_TOL)

        for x in (0.5, 5.0, 50.0):
            closed = bessel.bessel_j(1.5, x)
            series = j_three_halves_series(x)
            record(f'j_three_halves_series_{x:g}', closed, series, abs(closed - series), PAIR_IDENTITY_TOL)

        failed = [row['name'] for row in rows if not row['passed']]
        if failed:
            logger.warning("specfun identities failed: %s", ", ".join(failed))
        return rows
