"""Separation statistics (R_min, R_max, rho_pi, pi_min) of a mixture."""
from dataclasses import dataclass

import numpy as np

from mixreg.numeric.mixture_model.mixture_params import MixtureParams
from mixreg.utils.precision import frozen_array


@dataclass(frozen=True, eq=False)
class SeparationStats:
    """Pairwise geometry and weight balance of the true regression vectors.

    For a single component the distances are vacuous and r_min = r_max = inf.
    """

    r_min: float
    r_max: float
    rho_pi: float
    pi_min: float
    pairwise: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "pairwise", frozen_array(self.pairwise))


def pairwise_distances(betas: np.ndarray) -> np.ndarray:
    """Exact Euclidean distance matrix between rows of betas."""
    diff = betas[:, np.newaxis, :] - betas[np.newaxis, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


def separation_stats(params: MixtureParams) -> SeparationStats:
    """Compute R_min, R_max, rho_pi and pi_min of the mixture."""
    weights = params.weights
    if np.any(weights == 0.0):
        raise ValueError("weights contain a zero entry, rho_pi is undefined")
    pairwise = pairwise_distances(params.betas)
    k = params.num_components
    if k == 1:
        r_min = r_max = np.inf
    else:
        off_diagonal = pairwise[~np.eye(k, dtype=bool)]
        r_min = float(off_diagonal.min())
        r_max = float(off_diagonal.max())
    return SeparationStats(
        r_min=r_min,
        r_max=r_max,
        rho_pi=float(weights.max() / weights.min()),
        pi_min=float(weights.min()),
        pairwise=pairwise,
    )
