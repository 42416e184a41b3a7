"""Local convergence conditions for EM started near the truth."""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from mixreg.numeric.em_ops.em_state import EMState
from mixreg.numeric.metrics.matched_error import matched_error
from mixreg.numeric.mixture_model.mixture_params import MixtureParams
from mixreg.numeric.mixture_model.separation_stats import separation_stats

DEFAULT_CONDITION_CONSTANTS = (1.0, 0.5)


@dataclass(frozen=True)
class ConditionReport:
    """Verdict on the SNR, beta-radius and weight clauses.

    Attributes
    ----------
    snr: float
        R_min / sigma, +inf for noiseless truth.
    snr_threshold: float
        C k rho_pi log^2(k rho_pi).
    init_beta_radius: float
        max_j ||beta_j^0 - beta_j*|| / sigma under the matched permutation.
    init_beta_bound: float
        c (R_min / sigma) / (k rho_pi log k), +inf for a single component.
    init_weight_ok: bool
        |pi_j^0 - pi_j*| <= pi_j* / 2 for every j.
    satisfied: bool
        All three clauses hold.
    constants_used: tuple
        The (C, c) pair used.
    """

    snr: float
    snr_threshold: float
    init_beta_radius: float
    init_beta_bound: float
    init_weight_ok: bool
    satisfied: bool
    constants_used: Tuple[float, float]

    def to_json_dict(self) -> dict:
        return {
            "snr": self.snr,
            "snr_threshold": self.snr_threshold,
            "init_beta_radius": self.init_beta_radius,
            "init_beta_bound": self.init_beta_bound,
            "init_weight_ok": self.init_weight_ok,
            "satisfied": self.satisfied,
            "constants_used": list(self.constants_used),
        }


def _in_sigma_units(distance: float, sigma: float) -> float:
    if sigma > 0.0:
        return float(distance / sigma)
    return 0.0 if distance == 0.0 else float("inf")


def check_local_conditions(
    truth: MixtureParams,
    init: EMState,
    constants: Tuple[float, float] = DEFAULT_CONDITION_CONSTANTS,
) -> ConditionReport:
    """Evaluate the local convergence clauses for `init` against `truth`.

    All distances are reported in units of sigma. For noiseless truth a
    nonzero distance reads +inf, so the radius clause compares the distances
    before rescaling.
    """
    big_c, small_c = (float(constant) for constant in constants)
    if big_c <= 0.0 or small_c <= 0.0:
        raise ValueError(f"constants (C, c) must be positive, got {constants}")
    stats = separation_stats(truth)
    k = truth.num_components
    k_rho = k * stats.rho_pi

    if truth.noise_sigma == 0.0:
        snr = np.inf
    else:
        snr = stats.r_min / truth.noise_sigma
    snr_threshold = big_c * k_rho * np.log(k_rho) ** 2
    if k == 1:
        init_beta_bound = np.inf
    else:
        init_beta_bound = small_c * stats.r_min / (k_rho * np.log(k))

    # raises on a (k, d) mismatch
    matching = matched_error(init, truth)
    init_weight_ok = bool(
        np.all(
            np.abs(init.weights[matching.permutation] - truth.weights)
            <= 0.5 * truth.weights
        )
    )
    radius_ok = matching.max_beta_err <= init_beta_bound
    satisfied = bool(snr >= snr_threshold and radius_ok and init_weight_ok)
    return ConditionReport(
        snr=float(snr),
        snr_threshold=float(snr_threshold),
        init_beta_radius=_in_sigma_units(matching.max_beta_err, truth.noise_sigma),
        init_beta_bound=_in_sigma_units(init_beta_bound, truth.noise_sigma),
        init_weight_ok=init_weight_ok,
        satisfied=satisfied,
        constants_used=(big_c, small_c),
    )
