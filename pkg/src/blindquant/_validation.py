"""Small argument-checking helpers shared across modules."""

import math

import numpy as np

from .exceptions import DomainError


def check_finite(value, name):
    value = float(value)
    if not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    return value


def check_positive(value, name):
    value = check_finite(value, name)
    if value <= 0:
        raise DomainError(f"{name} must be > 0, got {value!r}")
    return value


def check_count(value, name, minimum=1):
    if isinstance(value, bool) or int(value) != value:
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise DomainError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_interval(lo, hi, lo_name="lo", hi_name="hi"):
    lo = check_finite(lo, lo_name)
    hi = check_finite(hi, hi_name)
    if not hi > lo:
        raise DomainError(f"{hi_name} must exceed {lo_name}, got [{lo}, {hi}]")
    return lo, hi


def as_float_array(x, name="x", allow_empty=True):
    """Return ``x`` as a float ndarray, rejecting NaN."""
    arr = np.asarray(x, dtype=float)
    if not allow_empty and arr.size == 0:
        raise DomainError(f"{name} must be non-empty")
    if np.isnan(arr).any():
        raise DomainError(f"{name} contains NaN")
    return arr


def scalar_or_array(result, like):
    """Collapse 0-d results back to Python floats."""
    if np.ndim(like) == 0:
        return float(result)
    return result
