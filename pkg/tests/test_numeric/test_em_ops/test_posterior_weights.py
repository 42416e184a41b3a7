import numpy as np

import psutil

import pytest

from mixreg.numeric.em_ops import (
    EMState,
    compute_responsibilities,
    gen_posterior_weights_kernel,
    mixture_log_likelihood,
    posterior_weights,
)


def _two_component_line_state(weights=(0.5, 0.5)):
    return EMState(betas=[[1.0], [-1.0]], weights=list(weights))


@pytest.mark.parametrize("sigma", [0.0, 0.1, 1.0, 1e3])
def test_posterior_weights_single_component(sigma):
    state = EMState(betas=[[0.5, -2.0]], weights=[1.0])
    np.testing.assert_array_equal(
        posterior_weights(state, [3.0, 1.0], 123.0, sigma), [1.0]
    )


def test_posterior_weights_symmetric_residuals():
    weights = posterior_weights(_two_component_line_state(), [1.0], 0.0, 1.0)
    np.testing.assert_array_equal(weights, [0.5, 0.5])


def test_posterior_weights_hand_evaluated():
    weights = posterior_weights(_two_component_line_state(), [1.0], 1.0, 1.0)
    np.testing.assert_allclose(weights[0], 1.0 / (1.0 + np.exp(-2.0)), rtol=1e-14)
    np.testing.assert_allclose(weights, [0.880797, 0.119203], atol=1e-6)
    np.testing.assert_allclose(weights.sum(), 1.0, atol=1e-15)


def test_posterior_weights_sigma_rescales_residuals():
    # sigma = 2 with residuals doubled gives the unit-variance answer
    state = EMState(betas=[[2.0], [-2.0]], weights=[0.5, 0.5])
    weights = posterior_weights(state, [1.0], 2.0, 2.0)
    np.testing.assert_allclose(weights[0], 1.0 / (1.0 + np.exp(-2.0)), rtol=1e-14)


def test_posterior_weights_noiseless_tie_goes_to_lowest_index():
    state = EMState(betas=[[0.0], [0.6]], weights=[0.5, 0.5])
    np.testing.assert_array_equal(posterior_weights(state, [1.0], 0.3, 0.0), [1, 0])
    np.testing.assert_array_equal(posterior_weights(state, [1.0], 0.4, 0.0), [0, 1])


@pytest.mark.parametrize("sigma", [0.0, 1.0])
def test_posterior_weights_zero_weight_component(sigma):
    state = EMState(betas=[[1.0], [-1.0], [5.0]], weights=[0.0, 0.5, 0.5])
    weights = posterior_weights(state, [1.0], 1.0, sigma)
    assert weights[0] == 0.0
    np.testing.assert_allclose(weights.sum(), 1.0, atol=1e-15)


def test_posterior_weights_dimension_mismatch():
    with pytest.raises(ValueError, match="does not match state dimension"):
        posterior_weights(_two_component_line_state(), [1.0, 2.0], 1.0, 1.0)


@pytest.mark.parametrize("seed", range(10))
def test_responsibilities_adversarial_residual_gaps(seed):
    rng = np.random.default_rng(seed)
    num_rows, num_components, dim = 1000, 4, 3
    betas = rng.uniform(-1e6, 1e6, (num_components, dim)) * rng.choice(
        [1e-6, 1.0], (num_components, 1)
    )
    weights = rng.dirichlet(np.ones(num_components))
    weights /= weights.sum()
    state = EMState(betas=betas, weights=weights)
    design = rng.standard_normal((num_rows, dim))
    response = rng.uniform(-1e6, 1e6, num_rows)
    for sigma in (1e-3, 1.0):
        responsibilities = compute_responsibilities(state, design, response, sigma)
        assert np.all(np.isfinite(responsibilities))
        assert np.all(responsibilities >= 0.0)
        assert np.all(responsibilities <= 1.0)
        np.testing.assert_allclose(responsibilities.sum(axis=1), 1.0, atol=1e-12)


@pytest.mark.parametrize("sigma", [0.0, 0.5])
def test_responsibilities_parallel_matches_serial(sigma):
    rng = np.random.default_rng(3)
    state = EMState(betas=rng.standard_normal((3, 4)), weights=[0.2, 0.3, 0.5])
    design = rng.standard_normal((2000, 4))
    response = rng.standard_normal(2000)
    serial = compute_responsibilities(state, design, response, sigma)
    parallel = compute_responsibilities(
        state, design, response, sigma, num_threads=psutil.cpu_count(logical=False)
    )
    np.testing.assert_allclose(parallel, serial, rtol=1e-12, atol=1e-15)


def test_gen_posterior_weights_kernel_serial_is_njit_kernel():
    serial_kernel = gen_posterior_weights_kernel(num_threads=False)
    parallel_kernel = gen_posterior_weights_kernel(num_threads=2)
    assert serial_kernel is not parallel_kernel
    assert parallel_kernel.__name__ == "posterior_weights_parallel_kernel"


def test_mixture_log_likelihood_single_component():
    state = EMState(betas=[[1.0, 0.0]], weights=[1.0])
    design = np.array([[1.0, 2.0], [0.0, 1.0]])
    response = np.array([1.5, -1.0])
    residuals = response - design @ state.betas[0]
    sigma = 0.5
    expected = np.sum(
        -0.5 * (residuals / sigma) ** 2 - 0.5 * np.log(2.0 * np.pi) - np.log(sigma)
    )
    np.testing.assert_allclose(
        mixture_log_likelihood(state, design, response, sigma), expected, rtol=1e-14
    )


def test_mixture_log_likelihood_needs_positive_sigma():
    state = EMState(betas=[[1.0]], weights=[1.0])
    with pytest.raises(ValueError, match="sigma > 0"):
        mixture_log_likelihood(state, [[1.0]], [1.0], 0.0)
