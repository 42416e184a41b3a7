"""Initial EM states: oracle perturbation and random-partition least squares."""
import numpy as np

from mixreg.numeric.data_generation.dataset import Dataset
from mixreg.numeric.data_generation.sample_dataset import gen_counter_based_rng
from mixreg.numeric.em_ops.em_state import EMState
from mixreg.numeric.em_ops.m_step import solve_weighted_normal_equations
from mixreg.numeric.init_ops.init_spec import InitSpec
from mixreg.numeric.mixture_model.mixture_params import MixtureParams

RANDOM_INIT_RIDGE = 1e-8


def perturbed_init(truth: MixtureParams, spec: InitSpec) -> EMState:
    """Truth moved by exactly spec.beta_radius per component.

    Draw order: k * d standard normals (one direction per component, row
    major), then k uniforms for the relative weight perturbations.
    """
    if spec.kind != "perturbed-oracle":
        raise ValueError(
            f"perturbed_init needs kind 'perturbed-oracle', got '{spec.kind}'"
        )
    rng = gen_counter_based_rng(spec.seed)
    directions = rng.standard_normal((truth.num_components, truth.dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    betas = truth.betas + spec.beta_radius * directions

    weight_noise = rng.uniform(
        -spec.weight_rel_radius, spec.weight_rel_radius, truth.num_components
    )
    if spec.weight_rel_radius == 0.0:
        weights = truth.weights
    else:
        weights = truth.weights * (1.0 + weight_noise)
        weights = weights / np.sum(weights)
    return EMState(betas=betas, weights=weights)


def random_init(data: Dataset, k: int, sigma: float, seed: int) -> EMState:
    """Least squares on k random groups of the samples, uniform weights.

    sigma is validated but does not enter the fit.
    """
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if not sigma >= 0.0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    n, dim = data.num_samples, data.dim
    if n < k * dim:
        raise ValueError(f"random init needs n >= k * d = {k * dim}, got n = {n}")
    rng = gen_counter_based_rng(seed)
    groups = np.array_split(rng.permutation(n), k)
    betas = np.empty((k, dim))
    for j, group in enumerate(groups):
        group = np.sort(group)
        design = data.design[group]
        response = data.response[group]
        beta, ok = solve_weighted_normal_equations(
            design, response, np.ones(group.size), RANDOM_INIT_RIDGE
        )
        if not ok:
            beta = np.linalg.lstsq(design, response, rcond=None)[0]
        betas[j] = beta
    return EMState(betas=betas, weights=np.full(k, 1.0 / k))
