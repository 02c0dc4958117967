"""Input validation helpers in the spirit of ``sklearn.utils.validation``."""

from __future__ import annotations

import numbers

import numpy as np

from ..exceptions import DegenerateSeriesError, InputError

MIN_SERIES_LENGTH = 16
MIN_ESTIMATION_LENGTH = 64


def check_series(values, min_length: int = MIN_SERIES_LENGTH, name: str = "series") -> np.ndarray:
    """Return ``values`` as a 1-D float64 array after checking length and finiteness."""
    x = np.asarray(values, dtype=np.float64)
    if x.ndim == 2 and 1 in x.shape:
        x = x.ravel()
    if x.ndim != 1:
        raise InputError(f"{name} must be one-dimensional, got shape {x.shape}")
    if x.size < min_length:
        raise InputError(f"{name} has {x.size} values; at least {min_length} required")
    if not np.all(np.isfinite(x)):
        bad = int(np.flatnonzero(~np.isfinite(x))[0])
        raise InputError(f"{name} contains a non-finite value at index {bad}")
    return x


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise InputError(f"{name} must be an integer, got {value!r}")
    if value < minimum:
        raise InputError(f"{name} must be >= {minimum}, got {value}")
    return int(value)


def check_finite_scalar(value, name: str) -> float:
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a real number, got {value!r}") from None
    if not np.isfinite(v):
        raise InputError(f"{name} must be finite, got {value!r}")
    return v


def check_nonconstant(x: np.ndarray, name: str = "series", rtol: float = 1e-10) -> None:
    """Reject series whose spread is at rounding level relative to their magnitude."""
    if x.size == 0:
        raise DegenerateSeriesError(f"{name} is empty")
    spread = float(np.ptp(x))
    if spread <= rtol * float(np.max(np.abs(x))):
        raise DegenerateSeriesError(f"{name} is (numerically) constant; the estimate is undefined")
