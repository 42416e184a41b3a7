"""Iteration schedules: sample-splitting EM and pooled EM."""
import logging
import time
from typing import Callable, Iterable

import numpy as np

from mixreg.numeric.data_generation.dataset import Dataset
from mixreg.numeric.data_generation.sample_dataset import split_batches
from mixreg.numeric.em_ops.em_iterate import em_iterate
from mixreg.numeric.em_ops.em_state import EMConfig, EMState, RunTrace
from mixreg.numeric.em_ops.posterior_weights import mixture_log_likelihood

logger = logging.getLogger(__name__)

StepFunction = Callable[[EMState, Dataset, EMConfig], EMState]


def run_iteration_schedule(
    init: EMState,
    batches: Iterable[Dataset],
    config: EMConfig,
    step: StepFunction,
    estimator: str,
    full_data: Dataset,
) -> RunTrace:
    """Apply `step` once per batch, stopping early when the tol rule fires.

    Shared by the EM schedules and alternating minimization so that every
    estimator records the same trace.
    """
    states = [init]
    batch_sizes = []
    movements = []
    wall_times = []
    log_likelihoods = []
    track_likelihood = config.sigma > 0.0
    if track_likelihood:
        log_likelihoods.append(
            mixture_log_likelihood(
                init, full_data.design, full_data.response, config.sigma
            )
        )
    converged = False
    state = init
    for iteration, batch in enumerate(batches):
        start_time = time.perf_counter()
        new_state = step(state, batch, config)
        wall_times.append(time.perf_counter() - start_time)
        movement = float(np.max(np.linalg.norm(new_state.betas - state.betas, axis=1)))
        newly_degenerate = np.flatnonzero(new_state.degenerate & ~state.degenerate)
        if newly_degenerate.size:
            logger.warning(
                f"{estimator}: components {newly_degenerate.tolist()} degenerate at "
                f"iteration {iteration + 1}, keeping previous betas"
            )
        logger.debug(f"{estimator}: iteration {iteration + 1} movement {movement:.3e}")
        states.append(new_state)
        batch_sizes.append(batch.num_samples)
        movements.append(movement)
        if track_likelihood:
            log_likelihoods.append(
                mixture_log_likelihood(
                    new_state, full_data.design, full_data.response, config.sigma
                )
            )
        state = new_state
        if movement <= config.tol:
            converged = True
            break
    return RunTrace(
        states=states,
        batch_sizes=batch_sizes,
        converged=converged,
        estimator=estimator,
        movements=tuple(movements),
        wall_times=tuple(wall_times),
        log_likelihoods=tuple(log_likelihoods),
    )


def _check_compatible(init: EMState, data: Dataset) -> None:
    if data.num_samples < 1:
        raise ValueError("data must be non-empty")
    if data.dim != init.dim:
        raise ValueError(
            f"data dimension {data.dim} does not match init dimension {init.dim}"
        )


def run_sample_splitting_em(
    init: EMState, data: Dataset, T: int, config: EMConfig
) -> RunTrace:
    """Sample-splitting EM: one iteration on each of T fresh disjoint batches.

    T caps the number of iterations, config.max_iters is not used.
    """
    _check_compatible(init, data)
    batches = split_batches(data, T)
    return run_iteration_schedule(
        init, batches, config, em_iterate, estimator="em-split", full_data=data
    )


def run_pooled_em(init: EMState, data: Dataset, config: EMConfig) -> RunTrace:
    """EM on the full dataset every iteration, up to max_iters or tol."""
    _check_compatible(init, data)
    batches = (data for _ in range(config.max_iters))
    return run_iteration_schedule(
        init, batches, config, em_iterate, estimator="em-pooled", full_data=data
    )
