"""
Bessel-type kernels

g_d(x) = J_{d/2}(2 pi x) / (2 pi x)^{d/2} is the Fourier factor of the unit
ball, h_d = g_d**2. Integer orders come from scipy.special; half-integer
orders use their closed trigonometric forms, with a power series below
SERIES_SWITCH where sin(y)/y - cos(y) cancels.
"""
import math
from fractions import Fraction
from typing import Union

import numpy as np
from scipy import special

from ..exceptions import ToralValidationError

ArrayLike = Union[float, np.ndarray]

SERIES_SWITCH = 0.5
G2_SMALL_SWITCH = 1e-3
TWO_PI = 2.0 * math.pi
_SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
_SERIES_TERMS = 12

SUPPORTED_ORDERS = (Fraction(0), Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3, 2))

# (-1)^{k+1} 2k / (2k+1)!, k = 1.._SERIES_TERMS
_S_COEFFS = np.array(
    [(-1) ** (k + 1) * 2 * k / math.factorial(2 * k + 1) for k in range(1, _SERIES_TERMS + 1)],
    dtype=np.float64,
)


def _as_array(x: ArrayLike) -> np.ndarray:
    return np.atleast_1d(np.asarray(x, dtype=np.float64)).copy()


def _restore(values: np.ndarray, like: ArrayLike) -> ArrayLike:
    if np.ndim(like) == 0:
        return float(values.reshape(-1)[0])
    return values.reshape(np.shape(like))


def _s_over_y2(y: np.ndarray) -> np.ndarray:
    """(sin y / y - cos y) / y**2, finite at y = 0 where it equals 1/3"""
    out = np.empty_like(y)
    small = y < SERIES_SWITCH
    if np.any(small):
        y2 = y[small] ** 2
        acc = np.zeros_like(y2)
        for coeff in _S_COEFFS[::-1]:
            acc = acc * y2 + coeff
        out[small] = acc
    large = ~small
    if np.any(large):
        yl = y[large]
        out[large] = (np.sin(yl) / yl - np.cos(yl)) / (yl * yl)
    return out


def _order(order) -> Fraction:
    try:
        value = Fraction(order).limit_denominator(2)
    except (TypeError, ValueError):
        raise ToralValidationError(f"unsupported Bessel order: {order!r}")
    if value not in SUPPORTED_ORDERS or abs(float(value) - float(order)) > 1e-15:
        raise ToralValidationError(f"unsupported Bessel order: {order!r}")
    return value


def bessel_j(order, x: ArrayLike) -> ArrayLike:
    """
    Bessel function of the first kind for orders 0, 1, 2, 1/2 and 3/2

    Args:
        order: One of 0, 1, 2, 0.5, 1.5 (Fraction accepted)
        x: Non-negative argument, scalar or array

    Raises:
        ToralValidationError: Unsupported order or negative argument
    """
    nu = _order(order)
    xs = _as_array(x)
    if np.any(xs < 0) or np.any(np.isnan(xs)):
        raise ToralValidationError("Bessel argument must be non-negative")
    if nu == 0:
        values = special.j0(xs)
    elif nu == 1:
        values = special.j1(xs)
    elif nu == 2:
        values = special.jv(2, xs)
    else:
        values = np.zeros_like(xs)
        positive = xs > 0
        xp = xs[positive]
        if nu == Fraction(1, 2):
            values[positive] = np.sqrt(2.0 / (math.pi * xp)) * np.sin(xp)
        else:
            # sqrt(2/(pi x)) * (sin x / x - cos x) = sqrt(2/pi) * x**1.5 * S(x)/x**2
            values[positive] = _SQRT_2_OVER_PI * xp ** 1.5 * _s_over_y2(xp)
    return _restore(values, x)


def g_kernel(d: int, x: ArrayLike) -> ArrayLike:
    """
    g_d(x) = J_{d/2}(2 pi x) / (2 pi x)^{d/2}

    g_2(0) = 1/2 and g_3(0) = (4 pi / 3) / (2 pi)^{3/2}.
    """
    xs = _as_array(x)
    if np.any(xs < 0):
        raise ToralValidationError("kernel argument must be non-negative")
    y = TWO_PI * xs
    if d == 2:
        out = np.empty_like(y)
        small = y < G2_SMALL_SWITCH
        ys = y[small] ** 2
        out[small] = 0.5 - ys / 16.0 + ys * ys / 384.0 - ys ** 3 / 18432.0
        yl = y[~small]
        out[~small] = special.j1(yl) / yl
    elif d == 3:
        out = _SQRT_2_OVER_PI * _s_over_y2(y)
    else:
        raise ToralValidationError(f"dimension must be 2 or 3, got {d}")
    return _restore(out, x)


def h_kernel(d: int, x: ArrayLike) -> ArrayLike:
    """
    h_2(x) = J_1(2 pi x)**2 / (2 pi x)**2 and
    h_3(x) = (2/pi) (2 pi x)**-4 (sin(2 pi x)/(2 pi x) - cos(2 pi x))**2
    """
    xs = _as_array(x)
    if np.any(xs < 0):
        raise ToralValidationError("kernel argument must be non-negative")
    if d == 2:
        out = _as_array(g_kernel(2, xs)) ** 2
    elif d == 3:
        out = (2.0 / math.pi) * _s_over_y2(TWO_PI * xs) ** 2
    else:
        raise ToralValidationError(f"dimension must be 2 or 3, got {d}")
    return _restore(out, x)


def g2_derivative(x: ArrayLike) -> ArrayLike:
    """
    g_2'(x) = -J_2(2 pi x) / x for x > 0

    Raises:
        ToralValidationError: x <= 0
    """
    xs = _as_array(x)
    if np.any(xs <= 0):
        raise ToralValidationError("g2_derivative requires x > 0")
    out = -special.jv(2, TWO_PI * xs) / xs
    return _restore(out, x)


def h2_tail_bound(c: float) -> float:
    """
    Upper bound for the integral of h_2 over [c, inf)

    Uses J_1(y)**2 <= 0.64 / y for y >= 10, so h_2(s) <= 0.64 / (2 pi s)**3.
    """
    if TWO_PI * c < 10.0:
        return math.inf
    return 0.64 / (TWO_PI ** 3 * 2.0 * c * c)


def s_h3_tail_bound(c: float) -> float:
    """
    Upper bound for the integral of s * h_3(s) over [c, inf)

    |sin y / y - cos y| <= 1 + 1/y gives
    s h_3(s) <= (2/pi) (1 + 1/(2 pi s))**2 / ((2 pi)**4 s**3).
    """
    if c <= 0:
        return math.inf
    factor = (1.0 + 1.0 / (TWO_PI * c)) ** 2
    return (2.0 / math.pi) * factor / (TWO_PI ** 4 * 2.0 * c * c)
