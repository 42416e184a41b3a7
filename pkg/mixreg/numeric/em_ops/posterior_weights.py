"""E-step kernels: posterior responsibilities of each component."""
from numba import njit, prange

import numba
import numpy as np

from mixreg.numeric.em_ops.em_state import EMState


@njit(cache=True)
def _soft_posterior_row(out_row, x_row, y, betas, log_weights, inv_two_sigma_sq):
    """Log-domain softmax of log pi_j - (y - <x, beta_j>)^2 / (2 sigma^2)."""
    num_components, dim = betas.shape
    max_logit = -np.inf
    for j in range(num_components):
        if log_weights[j] == -np.inf:
            out_row[j] = -np.inf
            continue
        prediction = 0.0
        for m in range(dim):
            prediction += x_row[m] * betas[j, m]
        residual = y - prediction
        logit = log_weights[j] - residual * residual * inv_two_sigma_sq
        out_row[j] = logit
        if logit > max_logit:
            max_logit = logit
    total = 0.0
    for j in range(num_components):
        if out_row[j] == -np.inf:
            out_row[j] = 0.0
        else:
            out_row[j] = np.exp(out_row[j] - max_logit)
        total += out_row[j]
    for j in range(num_components):
        out_row[j] /= total


@njit(cache=True)
def best_fit_component(x_row, y, betas, log_weights):
    """Index of the smallest |y - <x, beta_j>|, lowest index on ties.

    Components with zero weight (log weight -inf) are never selected. Shared
    by the noiseless E-step and the alternating minimization assignment.
    """
    num_components, dim = betas.shape
    best_component = -1
    best_abs_residual = np.inf
    for j in range(num_components):
        if log_weights[j] == -np.inf:
            continue
        prediction = 0.0
        for m in range(dim):
            prediction += x_row[m] * betas[j, m]
        abs_residual = abs(y - prediction)
        if best_component < 0 or abs_residual < best_abs_residual:
            best_component = j
            best_abs_residual = abs_residual
    return best_component


@njit(cache=True)
def _hard_posterior_row(out_row, x_row, y, betas, log_weights):
    out_row[:] = 0.0
    out_row[best_fit_component(x_row, y, betas, log_weights)] = 1.0


@njit(cache=True)
def _posterior_weights_serial_kernel(
    responsibilities, design, response, betas, log_weights, sigma
):
    num_samples = design.shape[0]
    if sigma > 0.0:
        inv_two_sigma_sq = 0.5 / (sigma * sigma)
        for i in range(num_samples):
            _soft_posterior_row(
                responsibilities[i],
                design[i],
                response[i],
                betas,
                log_weights,
                inv_two_sigma_sq,
            )
    else:
        for i in range(num_samples):
            _hard_posterior_row(
                responsibilities[i], design[i], response[i], betas, log_weights
            )


@njit(cache=True, parallel=True)
def _posterior_weights_parallel_kernel(
    responsibilities, design, response, betas, log_weights, sigma
):
    num_samples = design.shape[0]
    if sigma > 0.0:
        inv_two_sigma_sq = 0.5 / (sigma * sigma)
        for i in prange(num_samples):
            _soft_posterior_row(
                responsibilities[i],
                design[i],
                response[i],
                betas,
                log_weights,
                inv_two_sigma_sq,
            )
    else:
        for i in prange(num_samples):
            _hard_posterior_row(
                responsibilities[i], design[i], response[i], betas, log_weights
            )


def gen_posterior_weights_kernel(num_threads=False):
    """Row-wise E-step kernel generator.

    Rows are independent and each row is summed in component order, so the
    parallel kernel matches the serial one up to the vectorised exp.
    """
    if not num_threads:
        return _posterior_weights_serial_kernel

    def posterior_weights_parallel_kernel(
        responsibilities, design, response, betas, log_weights, sigma
    ):
        """Parallel E-step over rows, on num_threads numba threads."""
        numba.set_num_threads(min(int(num_threads), numba.config.NUMBA_NUM_THREADS))
        _posterior_weights_parallel_kernel(
            responsibilities, design, response, betas, log_weights, sigma
        )

    return posterior_weights_parallel_kernel


def log_mixing_weights(weights: np.ndarray) -> np.ndarray:
    """Elementwise log with -inf for zero weights."""
    log_weights = np.full(weights.shape, -np.inf)
    positive = weights > 0.0
    log_weights[positive] = np.log(weights[positive])
    return log_weights


def compute_responsibilities(
    state: EMState, design, response, sigma: float, num_threads=False
) -> np.ndarray:
    """Return the (n, k) responsibility matrix of the E-step."""
    design = np.ascontiguousarray(design, dtype=np.float64)
    response = np.ascontiguousarray(response, dtype=np.float64)
    if design.ndim != 2 or design.shape[1] != state.dim:
        raise ValueError(
            f"design with shape {design.shape} does not match state dimension "
            f"{state.dim}"
        )
    if response.shape != (design.shape[0],):
        raise ValueError("response length does not match design rows")
    if not sigma >= 0.0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    responsibilities = np.empty((design.shape[0], state.num_components))
    posterior_weights_kernel = gen_posterior_weights_kernel(num_threads=num_threads)
    posterior_weights_kernel(
        responsibilities,
        design,
        response,
        np.ascontiguousarray(state.betas),
        log_mixing_weights(state.weights),
        float(sigma),
    )
    return responsibilities


def posterior_weights(state: EMState, x, y: float, sigma: float) -> np.ndarray:
    """Posterior probability of each component for a single sample (x, y)."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (state.dim,):
        raise ValueError(
            f"x with shape {x.shape} does not match state dimension {state.dim}"
        )
    return compute_responsibilities(
        state, x.reshape(1, -1), np.array([y], dtype=np.float64), sigma
    )[0]


def mixture_log_likelihood(state: EMState, design, response, sigma: float) -> float:
    """Sum over samples of log sum_j pi_j N(y_i; <X_i, beta_j>, sigma^2)."""
    if not sigma > 0.0:
        raise ValueError("log-likelihood needs sigma > 0")
    design = np.asarray(design, dtype=np.float64)
    response = np.asarray(response, dtype=np.float64)
    residuals = response[:, np.newaxis] - design @ state.betas.T
    logits = log_mixing_weights(state.weights) - 0.5 * (residuals / sigma) ** 2
    max_logits = np.max(logits, axis=1, keepdims=True)
    log_densities = max_logits[:, 0] + np.log(
        np.sum(np.exp(logits - max_logits), axis=1)
    )
    normaliser = -0.5 * np.log(2.0 * np.pi) - np.log(sigma)
    return float(np.sum(log_densities) + response.shape[0] * normaliser)
