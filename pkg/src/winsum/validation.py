"""Input validation helpers shared by the estimators and the CLI."""

from __future__ import annotations

import numpy as np
from sklearn.utils import check_array

from .core import ConfigurationError


def check_stream(X, name: str = "X") -> np.ndarray:
    """Coerce ``X`` into a 1-D int64 stream.

    Accepts a 1-D sequence or a single-column 2-D array.  Floats are allowed
    only when every value is integral.
    """
    arr = check_array(
        X, ensure_2d=False, dtype=None, ensure_all_finite=True, input_name=name
    )
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"{name} must have a single column, got shape {arr.shape}")
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D or a single column, got ndim={arr.ndim}")
    if arr.dtype.kind == "b":
        return arr.astype(np.int64)
    if arr.dtype.kind == "f":
        if not np.all(np.mod(arr, 1) == 0):
            raise ValueError(f"{name} must hold integers")
    elif arr.dtype.kind not in "iu":
        raise ValueError(f"{name} must be numeric, got dtype {arr.dtype}")
    return arr.astype(np.int64)


def check_bits(X, name: str = "X") -> np.ndarray:
    arr = check_stream(X, name)
    if np.any((arr != 0) & (arr != 1)):
        raise ValueError(f"{name} must contain only 0 and 1")
    return arr


def infer_value_bound(arr: np.ndarray) -> int:
    return max(1, int(np.abs(arr).max())) if arr.size else 1


def check_value_bound(arr: np.ndarray, value_bound: int) -> None:
    if arr.size and int(np.abs(arr).max()) > value_bound:
        raise ConfigurationError(
            f"stream value {int(np.abs(arr).max())} exceeds value_bound {value_bound}"
        )
