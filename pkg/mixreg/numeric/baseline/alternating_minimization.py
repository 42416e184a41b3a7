"""Alternating minimization: hard assignment followed by per-component OLS."""
from numba import njit, prange

import numba
import numpy as np

from mixreg.numeric.data_generation.dataset import Dataset
from mixreg.numeric.em_ops.em_schedules import run_iteration_schedule
from mixreg.numeric.em_ops.em_state import EMConfig, EMState, RunTrace
from mixreg.numeric.em_ops.m_step import m_step
from mixreg.numeric.em_ops.posterior_weights import (
    best_fit_component,
    log_mixing_weights,
)


@njit(cache=True)
def _hard_assignment_serial_kernel(labels, design, response, betas, log_weights):
    for i in range(design.shape[0]):
        labels[i] = best_fit_component(design[i], response[i], betas, log_weights)


@njit(cache=True, parallel=True)
def _hard_assignment_parallel_kernel(labels, design, response, betas, log_weights):
    for i in prange(design.shape[0]):
        labels[i] = best_fit_component(design[i], response[i], betas, log_weights)


def gen_hard_assignment_kernel(num_threads=False):
    """Kernel generator assigning each sample to its smallest |residual|.

    Ties go to the lowest index and zero-weight components are skipped,
    the same rule as the noiseless E-step.
    """
    if not num_threads:
        return _hard_assignment_serial_kernel

    def hard_assignment_parallel_kernel(labels, design, response, betas, log_weights):
        numba.set_num_threads(min(int(num_threads), numba.config.NUMBA_NUM_THREADS))
        _hard_assignment_parallel_kernel(labels, design, response, betas, log_weights)

    return hard_assignment_parallel_kernel


def assign_components(state: EMState, batch: Dataset, num_threads=False) -> np.ndarray:
    """Index of the best-fitting component of every sample in `batch`."""
    labels = np.empty(batch.num_samples, dtype=np.int64)
    hard_assignment_kernel = gen_hard_assignment_kernel(num_threads=num_threads)
    hard_assignment_kernel(
        labels,
        np.ascontiguousarray(batch.design),
        np.ascontiguousarray(batch.response),
        np.ascontiguousarray(state.betas),
        log_mixing_weights(state.weights),
    )
    return labels


def alternating_minimization_step(
    state: EMState, batch: Dataset, config: EMConfig
) -> EMState:
    """Assign, then refit every component on its own samples.

    Refitting goes through the M-step with 0/1 responsibilities, so the
    ridge, weight floor and degeneracy rules are those of EM.
    """
    if batch.dim != state.dim:
        raise ValueError(
            f"batch dimension {batch.dim} does not match state dimension {state.dim}"
        )
    labels = assign_components(state, batch, num_threads=config.num_threads)
    responsibilities = np.zeros((batch.num_samples, state.num_components))
    responsibilities[np.arange(batch.num_samples), labels] = 1.0
    return m_step(batch, responsibilities, state, config)


def run_alternating_minimization(
    init: EMState, data: Dataset, config: EMConfig
) -> RunTrace:
    """Alternating minimization on the full dataset, up to max_iters or tol."""
    if data.num_samples < 1:
        raise ValueError("data must be non-empty")
    if data.dim != init.dim:
        raise ValueError(
            f"data dimension {data.dim} does not match init dimension {init.dim}"
        )
    batches = (data for _ in range(config.max_iters))
    return run_iteration_schedule(
        init,
        batches,
        config,
        alternating_minimization_step,
        estimator="am",
        full_data=data,
    )
