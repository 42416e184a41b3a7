"""Seeded sampling from the mixture model and batch splitting."""
from typing import List

import numpy as np
from scipy.special import ndtri

from mixreg.numeric.data_generation.dataset import Dataset
from mixreg.numeric.mixture_model.mixture_params import MixtureParams

# keeps inverse-CDF draws finite, Philox uniforms may be exactly 0
_UNIFORM_EPS = np.finfo(np.float64).eps / 4


def gen_counter_based_rng(seed: int) -> np.random.Generator:
    """Counter-based Philox stream; output is identical on every platform."""
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.Philox(seed))


def draw_gaussian_block(rng: np.random.Generator, shape) -> np.ndarray:
    """Standard normals via inverse CDF of row-major Philox uniforms."""
    uniforms = rng.random(shape)
    np.clip(uniforms, _UNIFORM_EPS, 1.0 - _UNIFORM_EPS, out=uniforms)
    return ndtri(uniforms)


def sample_dataset(params: MixtureParams, n: int, seed: int) -> Dataset:
    """Draw n labelled samples of the mixture.

    Draw order per row i consumes d + 2 consecutive Philox uniforms: the
    label uniform, then d uniforms mapped to X_i ~ N(0, I_d), then one
    mapped to the noise e_i ~ N(0, 1). Rows are consumed in order, so
    identical (params, n, seed) yield bit-identical data.
    """
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    dim = params.dim
    rng = gen_counter_based_rng(seed)
    uniforms = rng.random((n, dim + 2))

    cumulative_weights = np.cumsum(params.weights)
    labels = np.searchsorted(cumulative_weights, uniforms[:, 0], side="right")
    # guards cumsum rounding below 1 and zero-weight tail components
    labels = np.minimum(labels, np.flatnonzero(params.weights > 0.0)[-1])

    gaussians = ndtri(np.clip(uniforms[:, 1:], _UNIFORM_EPS, 1.0 - _UNIFORM_EPS))
    design = gaussians[:, :dim]
    noise = gaussians[:, dim]
    response = np.einsum("ij,ij->i", design, params.betas[labels])
    if params.noise_sigma > 0.0:
        response = response + params.noise_sigma * noise
    return Dataset(design=design, response=response, labels=labels, seed=seed)


def split_batches(data: Dataset, num_batches: int) -> List[Dataset]:
    """Split data into num_batches contiguous disjoint batches.

    The first n mod T batches receive one extra sample.
    """
    n = data.num_samples
    if num_batches < 1:
        raise ValueError(f"T must be a positive integer, got {num_batches}")
    if num_batches > n:
        raise ValueError(f"T = {num_batches} exceeds the number of samples n = {n}")
    base_size, remainder = divmod(n, num_batches)
    batches = []
    start = 0
    for batch_idx in range(num_batches):
        stop = start + base_size + (1 if batch_idx < remainder else 0)
        batches.append(data.slice(start, stop))
        start = stop
    return batches
