"""Seeded trials of a scenario and their deterministic aggregation."""
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import psutil

from mixreg import __version__
from mixreg.cli.scenario import Scenario
from mixreg.numeric.baseline.alternating_minimization import (
    run_alternating_minimization,
)
from mixreg.numeric.data_generation.dataset import Dataset
from mixreg.numeric.data_generation.sample_dataset import sample_dataset, split_batches
from mixreg.numeric.em_ops.em_schedules import run_pooled_em, run_sample_splitting_em
from mixreg.numeric.em_ops.em_state import EMState, RunTrace
from mixreg.numeric.init_ops.initializers import perturbed_init, random_init
from mixreg.numeric.metrics.contraction_trace import contraction_trace
from mixreg.numeric.metrics.em_operator_terms import em_operator_terms
from mixreg.numeric.metrics.event_diagnostics import (
    default_event_tau,
    event_diagnostics,
)
from mixreg.numeric.metrics.label_oracle import label_oracle_error
from mixreg.numeric.metrics.matched_error import matched_error
from mixreg.numeric.mixture_model.local_conditions import (
    ConditionReport,
    check_local_conditions,
)

logger = logging.getLogger(__name__)

TOOL_NAME = "mixreg"


@dataclass(frozen=True, eq=False)
class TrialResult:
    """Outcome of one seeded replication.

    Attributes
    ----------
    trial: int
        Trial index t (data seed base_seed + t, init seed init.seed + t).
    trace: RunTrace
    max_beta_errs: numpy.ndarray
        D_m per state under the matching of the initial state.
    final_matched_error: float
        D_m of the final state, re-matched.
    final_rel_weight_error: float
    oracle_error: float
        Label-oracle OLS error on one iteration's worth of samples.
    condition_report: ConditionReport or None
        Local conditions evaluated at the initial state, None when a truth
        weight is zero and rho_pi is undefined.
    """

    trial: int
    trace: RunTrace
    max_beta_errs: np.ndarray
    final_matched_error: float
    final_rel_weight_error: float
    oracle_error: float
    condition_report: Optional[ConditionReport]


def initial_state(scenario: Scenario, data: Optional[Dataset], trial: int) -> EMState:
    """Trial init; `data` is only read by the random kind."""
    init = scenario.init.with_seed(scenario.init_seed(trial))
    if init.kind == "perturbed-oracle":
        return perturbed_init(scenario.truth, init)
    return random_init(
        data.without_labels(),
        scenario.truth.num_components,
        scenario.em_config.sigma,
        init.seed,
    )


def run_estimator(scenario: Scenario, init: EMState, data: Dataset) -> RunTrace:
    """Dispatch to the scenario's estimator; labels never reach it."""
    unlabelled = data.without_labels()
    if scenario.estimator == "em-split":
        return run_sample_splitting_em(
            init, unlabelled, scenario.T, scenario.em_config
        )
    elif scenario.estimator == "em-pooled":
        return run_pooled_em(init, unlabelled, scenario.em_config)
    elif scenario.estimator == "am":
        return run_alternating_minimization(init, unlabelled, scenario.em_config)
    else:
        raise ValueError(f"Unsupported estimator '{scenario.estimator}'")


def run_trial(scenario: Scenario, trial: int) -> TrialResult:
    data = sample_dataset(scenario.truth, scenario.n, scenario.dataset_seed(trial))
    init = initial_state(scenario, data, trial)
    trace = run_estimator(scenario, init, data)

    truth = scenario.truth
    final = matched_error(trace.final_state, truth)
    if scenario.estimator == "em-split":
        oracle_data = split_batches(data, scenario.T)[0]
    else:
        oracle_data = data
    if np.all(truth.weights > 0.0):
        condition_report = check_local_conditions(truth, init, scenario.conditions)
    else:
        condition_report = None
    result = TrialResult(
        trial=trial,
        trace=trace,
        max_beta_errs=np.array(contraction_trace(trace, truth).max_beta_errs),
        final_matched_error=final.max_beta_err,
        final_rel_weight_error=final.max_rel_weight_err,
        oracle_error=label_oracle_error(oracle_data, truth),
        condition_report=condition_report,
    )
    logger.info(
        f"{scenario.name}: trial {trial} done, {trace.iterations_used} iterations, "
        f"final matched error {final.max_beta_err:.3e}"
    )
    return result


def _run_trial_star(args) -> TrialResult:
    return run_trial(*args)


def resolve_jobs(jobs: int) -> int:
    """0 means one worker per physical core."""
    if jobs < 0:
        raise ValueError(f"--jobs must be >= 0, got {jobs}")
    if jobs == 0:
        return psutil.cpu_count(logical=False) or 1
    return jobs


def run_trials(scenario: Scenario, jobs: int = 1) -> List[TrialResult]:
    """Run every trial, in worker processes when jobs > 1.

    Results are ordered by trial index whatever the completion order.
    """
    jobs = resolve_jobs(jobs)
    tasks = [(scenario, trial) for trial in range(scenario.trials)]
    if jobs == 1 or scenario.trials == 1:
        results = [run_trial(*task) for task in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, scenario.trials)) as executor:
            results = list(executor.map(_run_trial_star, tasks))
    return sorted(results, key=lambda result: result.trial)


def _per_iteration_quantiles(results: List[TrialResult]) -> dict:
    """Median and quartiles of D_m per iteration.

    Shorter traces carry their last value forward.
    """
    length = max(result.max_beta_errs.size for result in results)
    padded = np.empty((len(results), length))
    for idx, result in enumerate(results):
        errors = result.max_beta_errs
        padded[idx, : errors.size] = errors
        padded[idx, errors.size :] = errors[-1]
    return {
        "median": np.median(padded, axis=0).tolist(),
        "q25": np.quantile(padded, 0.25, axis=0).tolist(),
        "q75": np.quantile(padded, 0.75, axis=0).tolist(),
    }


def _condition_summary(results: List[TrialResult]) -> dict:
    reports = [result.condition_report for result in results]
    undefined = sum(report is None for report in reports)
    satisfied = sum(report is not None and report.satisfied for report in reports)
    violated = len(results) - satisfied - undefined
    if undefined == len(results):
        verdict = "undefined"
    elif violated == 0 and undefined == 0:
        verdict = "satisfied"
    elif satisfied == 0:
        verdict = "violated"
    else:
        verdict = "mixed"
    return {
        "satisfied": int(satisfied),
        "violated": int(violated),
        "undefined": int(undefined),
        "verdict": verdict,
        "first_trial": None if reports[0] is None else reports[0].to_json_dict(),
    }


def diagnostics_summary(scenario: Scenario) -> Optional[dict]:
    """Event diagnostics and operator terms at the trial-0 initial state."""
    spec = scenario.diagnostics
    truth = scenario.truth
    if spec.n_mc == 0:
        return None
    if (
        truth.noise_sigma == 0.0
        or truth.num_components < 2
        or np.any(truth.weights == 0.0)
    ):
        logger.warning(
            f"{scenario.name}: diagnostics need sigma > 0, k >= 2 and positive "
            f"weights, skipped"
        )
        return None
    data = None
    if scenario.init.kind == "random":
        data = sample_dataset(truth, scenario.n, scenario.dataset_seed(0))
    init = initial_state(scenario, data, 0)
    tau = default_event_tau(truth, spec.component, spec.tau_constant)
    events = event_diagnostics(
        truth, init, tau, spec.n_mc, spec.seed, component=spec.component
    )
    terms = em_operator_terms(
        truth, init, spec.n_mc, spec.seed, component=spec.component
    )
    return {
        "events": events.to_json_dict(),
        "em_operator_terms": terms.to_json_dict(),
    }


def summarise_trials(scenario: Scenario, results: List[TrialResult]) -> dict:
    """Summary document; contains no timings so reruns are byte-identical."""
    final_errors = [result.final_matched_error for result in results]
    iterations = [result.trace.iterations_used for result in results]
    oracle_errors = [result.oracle_error for result in results]
    degenerate_counts = [result.trace.degenerate_count for result in results]
    summary = {
        "tool": TOOL_NAME,
        "version": __version__,
        "scenario_id": scenario.name,
        "estimator": scenario.estimator,
        "scenario": scenario.document,
        "trials": len(results),
        "per_iteration": _per_iteration_quantiles(results),
        "final_matched_error": final_errors,
        "final_rel_weight_error": [
            result.final_rel_weight_error for result in results
        ],
        "median_final_matched_error": float(np.median(final_errors)),
        "iterations": iterations,
        "median_iterations": float(np.median(iterations)),
        "converged": int(sum(result.trace.converged for result in results)),
        "degenerate_counts": degenerate_counts,
        "degenerate_count": int(sum(degenerate_counts)),
        "oracle_floor": {
            "per_trial": oracle_errors,
            "median": float(np.median(oracle_errors)),
        },
        "condition_report": _condition_summary(results),
    }
    if summary["condition_report"]["undefined"]:
        logger.warning(
            f"{scenario.name}: a truth weight is zero, local conditions undefined"
        )
    diagnostics = diagnostics_summary(scenario)
    if diagnostics is not None:
        summary["diagnostics"] = diagnostics
    return summary
