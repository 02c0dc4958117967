from .validation import (
    MIN_ESTIMATION_LENGTH,
    MIN_SERIES_LENGTH,
    check_finite_scalar,
    check_nonconstant,
    check_positive_int,
    check_series,
)

__all__ = [
    "MIN_ESTIMATION_LENGTH",
    "MIN_SERIES_LENGTH",
    "check_finite_scalar",
    "check_nonconstant",
    "check_positive_int",
    "check_series",
]
