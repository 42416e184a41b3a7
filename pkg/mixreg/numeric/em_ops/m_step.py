"""M-step: weighted least squares per component and mixing weight update."""
from typing import Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from mixreg.numeric.data_generation.dataset import Dataset
from mixreg.numeric.em_ops.em_state import EMConfig, EMState
from mixreg.utils.precision import SINGULAR_CONDITION_LIMIT


def solve_weighted_normal_equations(
    design: np.ndarray, response: np.ndarray, sample_weights: np.ndarray, ridge: float
) -> Tuple[Optional[np.ndarray], bool]:
    """Solve (sum_i w_i X_i X_i^T + ridge I) beta = sum_i w_i X_i y_i.

    Returns (beta, ok); ok is False and beta is None when the system is
    numerically singular: no effective mass (sum_i w_i <= 0), condition
    estimate above SINGULAR_CONDITION_LIMIT, or a failed Cholesky.
    """
    if not np.sum(sample_weights) > 0.0:
        return None, False
    dim = design.shape[1]
    gram = (design * sample_weights[:, np.newaxis]).T @ design
    gram[np.diag_indices(dim)] += ridge
    rhs = design.T @ (sample_weights * response)
    if not np.linalg.cond(gram) <= SINGULAR_CONDITION_LIMIT:
        return None, False
    try:
        cholesky = cho_factor(gram, lower=True, check_finite=False)
    except LinAlgError:
        return None, False
    return cho_solve(cholesky, rhs, check_finite=False), True


def update_mixing_weights(
    mean_responsibilities: np.ndarray, min_weight_floor: float
) -> np.ndarray:
    """Clamp at the weight floor, then renormalise onto the simplex."""
    clamped = np.maximum(mean_responsibilities, min_weight_floor)
    return clamped / np.sum(clamped)


def m_step(
    batch: Dataset, responsibilities: np.ndarray, state: EMState, config: EMConfig
) -> EMState:
    """One M-step from the (n, k) responsibilities of `batch`.

    Degenerate components keep their previous beta and are flagged in the
    returned state.
    """
    num_components = state.num_components
    config.check_num_components(num_components)
    responsibilities = np.asarray(responsibilities, dtype=np.float64)
    if responsibilities.shape != (batch.num_samples, num_components):
        raise ValueError(
            f"responsibilities shape {responsibilities.shape} does not match "
            f"({batch.num_samples}, {num_components})"
        )
    if batch.dim != state.dim:
        raise ValueError(
            f"batch dimension {batch.dim} does not match state dimension {state.dim}"
        )
    ridge = config.resolve_ridge(batch.num_samples)

    betas = np.array(state.betas)
    degenerate = np.zeros(num_components, dtype=bool)
    for j in range(num_components):
        beta, ok = solve_weighted_normal_equations(
            batch.design, batch.response, responsibilities[:, j], ridge
        )
        if ok:
            betas[j] = beta
        else:
            degenerate[j] = True

    if config.weight_mode == "estimated":
        weights = update_mixing_weights(
            np.mean(responsibilities, axis=0), config.min_weight_floor
        )
    else:
        weights = state.weights
    return EMState(betas=betas, weights=weights, degenerate=degenerate)
