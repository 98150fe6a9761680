"""
Shared parsing and serialisation helpers for the models

Reals in experiment files may be numbers or decimal strings; rationals may
also be written as "p/q". Angles accept a trailing "pi" factor.
"""
import math
from dataclasses import is_dataclass
from decimal import Decimal, InvalidOperation
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np

from ..exceptions import ToralValidationError


def parse_fraction(value: Any, field: str) -> Fraction:
    """
    Parse an exact rational

    Floats are read through their shortest decimal repr, so 0.1 means 1/10.
    """
    if isinstance(value, bool):
        raise ToralValidationError(f"'{field}' must be a number")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ToralValidationError(f"'{field}' must be finite")
        return Fraction(repr(float(value)))
    if isinstance(value, Decimal):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ToralValidationError(f"'{field}' is not a rational number: {value!r}")
    raise ToralValidationError(f"'{field}' must be a number or a decimal string")


def parse_real(value: Any, field: str) -> float:
    """Parse a real from a number or a decimal string"""
    if isinstance(value, str):
        try:
            result = float(Decimal(value.strip()))
        except InvalidOperation:
            raise ToralValidationError(f"'{field}' is not a decimal number: {value!r}")
    elif isinstance(value, (int, float, Decimal, Fraction, np.floating, np.integer)) and not isinstance(value, bool):
        result = float(value)
    else:
        raise ToralValidationError(f"'{field}' must be a number or a decimal string")
    if not math.isfinite(result):
        raise ToralValidationError(f"'{field}' must be finite")
    return result


def parse_angle(value: Any, field: str) -> float:
    """Parse an angle such as 1.5, "3/2*pi", "pi/2" or "pi" """
    if isinstance(value, str) and 'pi' in value:
        text = value.replace(' ', '')
        if text == 'pi':
            return math.pi
        if text.endswith('*pi'):
            return float(parse_fraction(text[:-3], field)) * math.pi
        if text.startswith('pi/'):
            return math.pi / float(parse_fraction(text[3:], field))
        raise ToralValidationError(f"'{field}' is not a recognised angle: {value!r}")
    return parse_real(value, field)


def parse_int(value: Any, field: str) -> int:
    """Parse an integer, accepting integral strings"""
    if isinstance(value, bool):
        raise ToralValidationError(f"'{field}' must be an integer")
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, str) and value.strip().lstrip('-').isdigit():
        return int(value.strip())
    raise ToralValidationError(f"'{field}' must be an integer")


def to_jsonable(value: Any) -> Any:
    """Convert models, numpy values and fractions into plain JSON types"""
    if hasattr(value, 'to_dict') and (is_dataclass(value) or callable(getattr(value, 'to_dict'))):
        return to_jsonable(value.to_dict())
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(item) for item in value.tolist()]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        result = float(value)
        return result if math.isfinite(result) else None
    if isinstance(value, (Fraction, Decimal)):
        return str(value)
    return value
