"""Input validation helpers shared by the public functions and estimators."""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.utils import check_array

from .exceptions import InputError


def check_delta(delta: float, name: str = "delta") -> float:
    delta = float(delta)
    if not 0.0 < delta < 1.0:
        raise InputError(f"{name} must lie in (0, 1), got {delta!r}")
    return delta


def check_positive_int(value, name: str, minimum: int = 1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise InputError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if value < minimum:
        raise InputError(f"{name} must be >= {minimum}, got {value}")
    return value


def check_positive(value: float, name: str, allow_zero: bool = False) -> float:
    value = float(value)
    if not np.isfinite(value) or value < 0 or (value == 0 and not allow_zero):
        bound = ">= 0" if allow_zero else "> 0"
        raise InputError(f"{name} must be finite and {bound}, got {value!r}")
    return value


def check_regressors(X, y=None):
    """Validate a regressor matrix (and optional targets) as float64 arrays.

    A 1-D ``X`` is read as a single regressor column.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    X = check_array(X, dtype=np.float64, ensure_2d=True, ensure_min_samples=0)
    if y is None:
        return X
    y = check_array(y, dtype=np.float64, ensure_2d=False, ensure_min_samples=0)
    if y.ndim != 1:
        raise InputError(f"y must be one-dimensional, got shape {y.shape}")
    if y.shape[0] != X.shape[0]:
        raise InputError(f"X has {X.shape[0]} rows but y has {y.shape[0]} entries")
    return X, y
