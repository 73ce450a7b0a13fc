"""Input validation helpers shared across the package.

Conventions follow scikit-learn: invalid arguments raise ValueError with a
message naming the offending quantity; numerical breakdowns inside iterative
solvers raise NumericalError instead so callers can tell the two apart.
"""

from __future__ import annotations

import numpy as np


class NumericalError(RuntimeError):
    """An iterative routine produced NaN/Inf and cannot continue."""


class CsvFormatError(ValueError):
    """A CSV file does not match the expected schema; carries the row number."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


def as_float_array(x, name: str, ndim: int | None = None) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite, found NaN/Inf")
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    return arr


def as_features(x, name: str = "features") -> np.ndarray:
    """Coerce to a finite (n, d) float matrix; 1-D input becomes a column."""
    arr = as_float_array(x, name)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be a 2-d array, got shape {arr.shape}")
    return arr


def as_weights(w, n: int, name: str = "weights", tol: float = 1e-9) -> np.ndarray:
    arr = as_float_array(w, name, ndim=1)
    if arr.shape[0] != n:
        raise ValueError(f"{name} must have length {n}, got {arr.shape[0]}")
    if np.any(arr < 0):
        raise ValueError(f"{name} must be nonnegative")
    if abs(arr.sum() - 1.0) > tol:
        raise ValueError(f"{name} must sum to 1 within {tol}, got {arr.sum()!r}")
    return arr


def as_binary_labels(y, name: str = "labels") -> np.ndarray:
    arr = np.asarray(y)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    out = arr.astype(np.int64)
    if not np.array_equal(out, np.asarray(arr, dtype=np.float64)):
        raise ValueError(f"{name} must be integer-valued")
    bad = ~np.isin(out, (-1, 1))
    if bad.any():
        raise ValueError(f"{name} must be -1 or +1 in binary mode, found {arr[bad][0]!r}")
    return out


def check_same_dim(d0: int, d1: int, what: str = "inputs") -> None:
    if d0 != d1:
        raise ValueError(f"{what} must share the feature dimension, got {d0} and {d1}")


def check_positive(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return value


def check_nonnegative(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value < 0:
        raise ValueError(f"{name} must be a nonnegative finite number, got {value!r}")
    return value


def check_unit_interval(value: float, name: str) -> float:
    value = float(value)
    if not np.isfinite(value) or value < 0.0 or value > 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return value
