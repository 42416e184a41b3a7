"""Permutation-matched estimation error (D_m)."""
from dataclasses import dataclass
from itertools import permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

from mixreg.numeric.em_ops.em_state import EMState
from mixreg.numeric.mixture_model.mixture_params import MixtureParams
from mixreg.utils.precision import frozen_array

# exhaustive permutation search up to this many components (8! = 40320)
EXHAUSTIVE_MATCHING_MAX_K = 8


@dataclass(frozen=True, eq=False)
class MatchedError:
    """Error of an estimate after the best component matching.

    Attributes
    ----------
    permutation: numpy.ndarray
        permutation[j] is the estimate component matched to true component j.
    max_beta_err: float
        D_m, max_j ||beta_{permutation[j]} - beta_j*||.
    per_component_beta_err: numpy.ndarray
        1D (k,) matched distances.
    max_rel_weight_err: float
        max_j |pi_{permutation[j]} - pi_j*| / pi_j*.
    """

    permutation: np.ndarray
    max_beta_err: float
    per_component_beta_err: np.ndarray
    max_rel_weight_err: float

    def __post_init__(self):
        object.__setattr__(
            self, "permutation", frozen_array(self.permutation, dtype=np.int64)
        )
        object.__setattr__(
            self, "per_component_beta_err", frozen_array(self.per_component_beta_err)
        )

    def to_json_dict(self) -> dict:
        return {
            "permutation": self.permutation.tolist(),
            "max_beta_err": self.max_beta_err,
            "per_component_beta_err": self.per_component_beta_err.tolist(),
            "max_rel_weight_err": self.max_rel_weight_err,
        }


def cross_distances(estimate_betas: np.ndarray, true_betas: np.ndarray) -> np.ndarray:
    """distances[j, l] = ||estimate_l - truth_j||."""
    diff = true_betas[:, np.newaxis, :] - estimate_betas[np.newaxis, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def exhaustive_bottleneck_permutation(distances: np.ndarray) -> np.ndarray:
    """Minimise the max, then the sum, then lexicographic order over all k!."""
    k = distances.shape[0]
    candidates = np.array(list(permutations(range(k))), dtype=np.int64)
    matched = distances[np.arange(k), candidates]
    # lexsort sorts by its last key first; candidates are already in
    # lexicographic order and the sort is stable
    best = np.lexsort((matched.sum(axis=1), matched.max(axis=1)))[0]
    return candidates[best]


def assignment_bottleneck_permutation(distances: np.ndarray) -> np.ndarray:
    """Bottleneck assignment by threshold bisection, then min-sum among feasible.

    Used for k above EXHAUSTIVE_MATCHING_MAX_K; ties beyond the sum are
    broken by the assignment solver.
    """
    k = distances.shape[0]
    thresholds = np.unique(distances)
    forbidden_cost = 1.0 + k * (float(thresholds[-1]) + 1.0)

    def _solve(threshold):
        costs = np.where(distances <= threshold, distances, forbidden_cost)
        _, columns = linear_sum_assignment(costs)
        feasible = bool(np.all(distances[np.arange(k), columns] <= threshold))
        return columns, feasible

    low, high = 0, thresholds.size - 1
    while low < high:
        middle = (low + high) // 2
        if _solve(thresholds[middle])[1]:
            high = middle
        else:
            low = middle + 1
    columns, feasible = _solve(thresholds[low])
    assert feasible, "largest threshold must admit a perfect matching"
    return columns.astype(np.int64)


def matched_error(estimate: EMState, truth: MixtureParams) -> MatchedError:
    """Permutation-invariant estimation error of `estimate` against `truth`."""
    if (estimate.num_components, estimate.dim) != (truth.num_components, truth.dim):
        raise ValueError(
            f"estimate with (k, d) = {(estimate.num_components, estimate.dim)} does "
            f"not match truth with (k, d) = {(truth.num_components, truth.dim)}"
        )
    distances = cross_distances(estimate.betas, truth.betas)
    if truth.num_components <= EXHAUSTIVE_MATCHING_MAX_K:
        permutation = exhaustive_bottleneck_permutation(distances)
    else:
        permutation = assignment_bottleneck_permutation(distances)
    k = truth.num_components
    per_component = distances[np.arange(k), permutation]
    weight_err = np.abs(estimate.weights[permutation] - truth.weights)
    # zero-weight truth components only count when the estimate disagrees
    rel_weight_err = np.divide(
        weight_err,
        truth.weights,
        out=np.where(weight_err > 0.0, np.inf, 0.0),
        where=truth.weights > 0.0,
    )
    return MatchedError(
        permutation=permutation,
        max_beta_err=float(per_component.max()),
        per_component_beta_err=per_component,
        max_rel_weight_err=float(rel_weight_err.max()),
    )
