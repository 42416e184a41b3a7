"""Per-iteration error contraction of a run."""
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from mixreg.numeric.em_ops.em_state import RunTrace
from mixreg.numeric.metrics.matched_error import cross_distances, matched_error
from mixreg.numeric.mixture_model.mixture_params import MixtureParams
from mixreg.utils.precision import frozen_array


@dataclass(frozen=True, eq=False)
class ContractionTrace:
    """D_m of every state and the ratios between consecutive states.

    Attributes
    ----------
    permutation: numpy.ndarray
        Matching found for the initial state, frozen for the whole run.
    max_beta_errs: numpy.ndarray
        1D (iterations + 1,) D_m per state.
    ratios: numpy.ndarray
        1D (iterations,) D_m(t + 1) / D_m(t).
    """

    permutation: np.ndarray
    max_beta_errs: np.ndarray
    ratios: np.ndarray

    def __post_init__(self):
        object.__setattr__(
            self, "permutation", frozen_array(self.permutation, dtype=np.int64)
        )
        object.__setattr__(self, "max_beta_errs", frozen_array(self.max_beta_errs))
        object.__setattr__(self, "ratios", frozen_array(self.ratios))

    @property
    def steps(self) -> List[Tuple[int, float, float]]:
        """(iter, D_m(iter), ratio into iter) for every iteration after the first."""
        return [
            (iteration + 1, float(self.max_beta_errs[iteration + 1]), float(ratio))
            for iteration, ratio in enumerate(self.ratios)
        ]


def contraction_ratio(previous_err: float, current_err: float) -> float:
    """D_m(t+1) / D_m(t), with 1.0 for 0/0 and +inf for x/0."""
    if previous_err == 0.0:
        return 1.0 if current_err == 0.0 else np.inf
    return current_err / previous_err


def contraction_trace(trace: RunTrace, truth: MixtureParams) -> ContractionTrace:
    """Track D_m along `trace` under the matching of its initial state.

    Freezing the permutation makes a label swap during the run show up as a
    failure to contract.
    """
    permutation = matched_error(trace.states[0], truth).permutation
    k = truth.num_components
    max_beta_errs = np.empty(len(trace.states))
    for idx, state in enumerate(trace.states):
        distances = cross_distances(state.betas, truth.betas)
        max_beta_errs[idx] = distances[np.arange(k), permutation].max()
    ratios = np.array(
        [
            contraction_ratio(max_beta_errs[idx], max_beta_errs[idx + 1])
            for idx in range(max_beta_errs.size - 1)
        ],
        dtype=np.float64,
    )
    return ContractionTrace(
        permutation=permutation, max_beta_errs=max_beta_errs, ratios=ratios
    )
