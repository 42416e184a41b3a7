"""Monte Carlo diagnostics of the good events behind the local analysis.

For a reference component r and every other origin component j, samples
(X, y = <X, beta_j*> + e) drawn from component j are classified by

    E1: |e| <= tau_j
    E2: 4 max(|<X, Delta_r>|, |<X, Delta_j>|) <= |<X, beta_j* - beta_r*>|
    E3: |<X, beta_j* - beta_r*>| >= 4 sqrt(2) tau_j

with Delta_l = beta_l - beta_l* the error of the matched state. On the
intersection (the good event) the change of the reference responsibility
Delta_w = w_r(state) - w_r(truth) is bounded by 3 (pi_r*/pi_j*) exp(-tau_j^2).
Everything is evaluated in the unit-variance frame, i.e. after dividing all
regression vectors by sigma.
"""
from dataclasses import dataclass

import numpy as np

from mixreg.numeric.data_generation.sample_dataset import draw_gaussian_block
from mixreg.numeric.em_ops.em_state import EMState
from mixreg.numeric.em_ops.posterior_weights import compute_responsibilities
from mixreg.numeric.metrics.matched_error import matched_error
from mixreg.numeric.mixture_model.mixture_params import MixtureParams
from mixreg.utils.precision import frozen_array

# samples per seeded Monte Carlo chunk; fixed so results never depend on threads
MONTE_CARLO_CHUNK_SIZE = 16384


@dataclass(frozen=True, eq=False)
class EventStats:
    """Empirical event probabilities, one entry per origin component.

    Attributes
    ----------
    reference: int
        Reference component r whose responsibility is tracked.
    origins: numpy.ndarray
        Origin components j != r, the index of every other array.
    tau: numpy.ndarray
        Noise thresholds tau_j.
    p_e1, p_e2, p_e3, p_good: numpy.ndarray
        Conditional probabilities of E1, E2, E3 and their intersection
        given the sample came from component j.
    max_dw_good: numpy.ndarray
        Largest |Delta_w| seen on good-event samples (0 if there were none).
    bound_dw: numpy.ndarray
        3 (pi_r*/pi_j*) exp(-tau_j^2).
    noise_tail_bound: numpy.ndarray
        Gaussian tail bound 2 exp(-tau_j^2 / 2) on P(not E1).
    n_mc: int
        Samples drawn per origin.
    """

    reference: int
    origins: np.ndarray
    tau: np.ndarray
    p_e1: np.ndarray
    p_e2: np.ndarray
    p_e3: np.ndarray
    p_good: np.ndarray
    max_dw_good: np.ndarray
    bound_dw: np.ndarray
    noise_tail_bound: np.ndarray
    n_mc: int

    def __post_init__(self):
        object.__setattr__(self, "origins", frozen_array(self.origins, dtype=np.int64))
        for name in (
            "tau",
            "p_e1",
            "p_e2",
            "p_e3",
            "p_good",
            "max_dw_good",
            "bound_dw",
            "noise_tail_bound",
        ):
            object.__setattr__(self, name, frozen_array(getattr(self, name)))

    @property
    def bound_holds(self) -> bool:
        return bool(np.all(self.max_dw_good <= self.bound_dw))

    def to_json_dict(self) -> dict:
        json_dict = {"reference": self.reference, "n_mc": self.n_mc}
        for name in (
            "origins",
            "tau",
            "p_e1",
            "p_e2",
            "p_e3",
            "p_good",
            "max_dw_good",
            "bound_dw",
            "noise_tail_bound",
        ):
            json_dict[name] = getattr(self, name).tolist()
        json_dict["bound_holds"] = self.bound_holds
        return json_dict


def default_event_tau(
    truth: MixtureParams, component: int = 0, tau_constant: float = 1.0
) -> np.ndarray:
    """tau_j = tau_constant * sqrt(log(R_jr k rho_pi)), R_jr in units of sigma.

    The logarithm is clipped at zero; the reference entry is unused.
    """
    if truth.noise_sigma == 0.0:
        raise ValueError("default tau needs sigma > 0")
    if np.any(truth.weights == 0.0):
        raise ValueError("weights contain a zero entry, rho_pi is undefined")
    rho_pi = truth.weights.max() / truth.weights.min()
    distances = np.linalg.norm(truth.betas - truth.betas[component], axis=1)
    scaled = distances / truth.noise_sigma * truth.num_components * rho_pi
    with np.errstate(divide="ignore"):
        log_terms = np.maximum(np.log(scaled), 0.0)
    return tau_constant * np.sqrt(log_terms)


def _validate(truth: MixtureParams, state: EMState, tau, n_mc: int, component: int):
    if truth.noise_sigma == 0.0:
        raise ValueError(
            "event diagnostics need sigma > 0, the events are noise-indexed"
        )
    k = truth.num_components
    if k < 2:
        raise ValueError("event diagnostics need at least two components")
    if not 0 <= component < k:
        raise ValueError(f"component must lie in [0, {k}), got {component}")
    if np.any(truth.weights == 0.0):
        raise ValueError("truth weights must be positive")
    if n_mc < 1:
        raise ValueError(f"n_mc must be a positive integer, got {n_mc}")
    tau = np.asarray(tau, dtype=np.float64)
    if tau.shape != (k,):
        raise ValueError(
            f"tau must have one entry per component ({k}), got {tau.shape}"
        )
    if np.any(np.isnan(tau)) or np.any(tau < 0.0):
        raise ValueError("tau entries must be >= 0")
    return tau


def event_diagnostics(
    truth: MixtureParams,
    state: EMState,
    tau,
    n_mc: int,
    seed: int,
    component: int = 0,
    num_threads=False,
) -> EventStats:
    """Estimate the good-event probabilities and the Delta_w bound for `state`.

    Samples of origin j come in chunks of MONTE_CARLO_CHUNK_SIZE, chunk c
    seeded by SeedSequence([seed, j, c]).
    """
    tau = _validate(truth, state, tau, n_mc, component)
    sigma = truth.noise_sigma
    k, dim = truth.num_components, truth.dim
    matched_state = state.permuted(matched_error(state, truth).permutation)

    true_betas = truth.betas / sigma
    state_betas = matched_state.betas / sigma
    errors = state_betas - true_betas
    unit_truth = EMState(betas=true_betas, weights=truth.weights)
    unit_state = EMState(betas=state_betas, weights=matched_state.weights)

    origins = np.array([j for j in range(k) if j != component], dtype=np.int64)
    counts = np.zeros((origins.size, 4), dtype=np.int64)
    max_dw_good = np.zeros(origins.size)
    for idx, origin in enumerate(origins):
        separation = true_betas[origin] - true_betas[component]
        tau_j = tau[origin]
        for chunk, start in enumerate(range(0, n_mc, MONTE_CARLO_CHUNK_SIZE)):
            chunk_size = min(MONTE_CARLO_CHUNK_SIZE, n_mc - start)
            rng = np.random.Generator(
                np.random.Philox(np.random.SeedSequence([seed, int(origin), chunk]))
            )
            gaussians = draw_gaussian_block(rng, (chunk_size, dim + 1))
            design = gaussians[:, :dim]
            noise = gaussians[:, dim]
            response = design @ true_betas[origin] + noise

            projected_gap = np.abs(design @ separation)
            event_1 = np.abs(noise) <= tau_j
            event_2 = 4.0 * np.maximum(
                np.abs(design @ errors[component]), np.abs(design @ errors[origin])
            ) <= projected_gap
            event_3 = projected_gap >= 4.0 * np.sqrt(2.0) * tau_j
            good = event_1 & event_2 & event_3
            counts[idx] += [
                np.count_nonzero(event_1),
                np.count_nonzero(event_2),
                np.count_nonzero(event_3),
                np.count_nonzero(good),
            ]
            if np.any(good):
                w_state = compute_responsibilities(
                    unit_state,
                    design[good],
                    response[good],
                    1.0,
                    num_threads=num_threads,
                )[:, component]
                w_truth = compute_responsibilities(
                    unit_truth,
                    design[good],
                    response[good],
                    1.0,
                    num_threads=num_threads,
                )[:, component]
                max_dw_good[idx] = max(
                    max_dw_good[idx], float(np.max(np.abs(w_state - w_truth)))
                )

    probabilities = counts / float(n_mc)
    tau_origins = tau[origins]
    weight_ratios = truth.weights[component] / truth.weights[origins]
    return EventStats(
        reference=int(component),
        origins=origins,
        tau=tau_origins,
        p_e1=probabilities[:, 0],
        p_e2=probabilities[:, 1],
        p_e3=probabilities[:, 2],
        p_good=probabilities[:, 3],
        max_dw_good=max_dw_good,
        bound_dw=3.0 * weight_ratios * np.exp(-(tau_origins**2)),
        noise_tail_bound=np.minimum(2.0 * np.exp(-0.5 * tau_origins**2), 1.0),
        n_mc=int(n_mc),
    )
