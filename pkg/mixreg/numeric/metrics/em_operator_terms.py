"""Monte Carlo estimate of the terms of the population EM update of one component.

In the unit-variance frame the update of component r satisfies
beta_r^+ - beta_r* = A^{-1} B with

    A = E[w_r X X^T],    B = E[(w_r - w_r*) X (Y - <X, beta_r*>)],

where w_r is the responsibility at the current state and w_r* the one at
the truth. The one-step bound ||A^{-1}|| ||B|| is reported in units of sigma.
"""
from dataclasses import dataclass

import numpy as np

from mixreg.numeric.data_generation.sample_dataset import sample_dataset
from mixreg.numeric.em_ops.em_state import EMState
from mixreg.numeric.em_ops.posterior_weights import compute_responsibilities
from mixreg.numeric.metrics.matched_error import matched_error
from mixreg.numeric.mixture_model.mixture_params import MixtureParams


@dataclass(frozen=True)
class EMOperatorTerms:
    component: int
    a_min_eigenvalue: float
    b_norm: float
    one_step_bound: float
    n_mc: int

    def to_json_dict(self) -> dict:
        return {
            "component": self.component,
            "a_min_eigenvalue": self.a_min_eigenvalue,
            "b_norm": self.b_norm,
            "one_step_bound": self.one_step_bound,
            "n_mc": self.n_mc,
        }


def em_operator_terms(
    truth: MixtureParams,
    state: EMState,
    n_mc: int,
    seed: int,
    component: int = 0,
    num_threads=False,
) -> EMOperatorTerms:
    if truth.noise_sigma == 0.0:
        raise ValueError("EM operator terms need sigma > 0")
    if not 0 <= component < truth.num_components:
        raise ValueError(
            f"component must lie in [0, {truth.num_components}), got {component}"
        )
    sigma = truth.noise_sigma
    matched_state = state.permuted(matched_error(state, truth).permutation)
    unit_truth = MixtureParams(
        betas=truth.betas / sigma, weights=truth.weights, noise_sigma=1.0
    )
    unit_state = EMState(
        betas=matched_state.betas / sigma, weights=matched_state.weights
    )
    samples = sample_dataset(unit_truth, n_mc, seed)
    design, response = samples.design, samples.response

    w_state = compute_responsibilities(
        unit_state, design, response, 1.0, num_threads=num_threads
    )[:, component]
    w_truth = compute_responsibilities(
        EMState.from_params(unit_truth), design, response, 1.0, num_threads=num_threads
    )[:, component]
    a_matrix = (design * w_state[:, np.newaxis]).T @ design / n_mc
    residual = response - design @ unit_truth.betas[component]
    b_vector = design.T @ ((w_state - w_truth) * residual) / n_mc

    a_min_eigenvalue = float(np.linalg.eigvalsh(a_matrix)[0])
    b_norm = float(np.linalg.norm(b_vector))
    if a_min_eigenvalue > 0.0:
        one_step_bound = b_norm / a_min_eigenvalue
    else:
        one_step_bound = np.inf
    return EMOperatorTerms(
        component=int(component),
        a_min_eigenvalue=a_min_eigenvalue,
        b_norm=b_norm,
        one_step_bound=float(one_step_bound),
        n_mc=int(n_mc),
    )
