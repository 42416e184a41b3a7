"""Precision and tolerance details."""
from typing import Type

import numpy as np

# truth/estimate mixing weights must sum to one within these
PARAMS_WEIGHT_SUM_ATOL = 1e-12
STATE_WEIGHT_SUM_ATOL = 1e-10
# weighted Gram matrices above this condition estimate are treated as singular
SINGULAR_CONDITION_LIMIT = 1e14


def get_real_t(precision: str = "double") -> Type:
    """Return the real data type based on precision.

    Estimation runs in double precision; single is only accepted for
    storage/IO of generated designs.
    """
    if precision == "single":
        return np.float32
    elif precision == "double":
        return np.float64
    else:
        raise ValueError("Precision argument must be single or double")


def check_probability_vector(
    weights: np.ndarray, atol: float = PARAMS_WEIGHT_SUM_ATOL, name: str = "weights"
) -> np.ndarray:
    """Validate a probability vector and return it as a float64 array.

    Raises ValueError naming `name` if entries are negative, non finite or
    do not sum to one within `atol`.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 1 or weights.size == 0:
        raise ValueError(f"{name} must be a non-empty 1D vector")
    if not np.all(np.isfinite(weights)):
        raise ValueError(f"{name} must be finite")
    if np.any(weights < 0.0):
        raise ValueError(f"{name} must be non-negative, got min {weights.min()}")
    if abs(weights.sum() - 1.0) > atol:
        raise ValueError(f"{name} must sum to 1 (within {atol}), got {weights.sum()}")
    return weights


def frozen_array(array, dtype=np.float64) -> np.ndarray:
    """Return a read-only copy of `array`, used by the immutable domain types."""
    frozen = np.array(array, dtype=dtype, copy=True)
    frozen.setflags(write=False)
    return frozen
