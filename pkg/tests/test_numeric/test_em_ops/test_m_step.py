import numpy as np

import pytest

from mixreg.numeric.data_generation import Dataset
from mixreg.numeric.em_ops import (
    EMConfig,
    EMState,
    m_step,
    solve_weighted_normal_equations,
    update_mixing_weights,
)


def weighted_normal_equations_reference(design, response, sample_weights, ridge):
    gram = np.zeros((design.shape[1], design.shape[1]))
    rhs = np.zeros(design.shape[1])
    for x_row, y, weight in zip(design, response, sample_weights):
        gram += weight * np.outer(x_row, x_row)
        rhs += weight * y * x_row
    gram += ridge * np.eye(design.shape[1])
    return np.linalg.solve(gram, rhs)


class MStepInstance:
    def __init__(self, seed):
        rng = np.random.default_rng(seed)
        self.num_components = int(rng.integers(1, 5))
        dim = int(rng.integers(1, 6))
        num_samples = int(rng.integers(max(4 * dim * self.num_components, 20), 101))
        self.batch = Dataset(
            design=rng.standard_normal((num_samples, dim)),
            response=rng.standard_normal(num_samples),
        )
        self.responsibilities = rng.dirichlet(
            np.ones(self.num_components), size=num_samples
        )
        weights = np.full(self.num_components, 1.0 / self.num_components)
        self.state = EMState(
            betas=rng.standard_normal((self.num_components, dim)), weights=weights
        )

    def check_equals(self, new_state):
        for j in range(self.num_components):
            reference = weighted_normal_equations_reference(
                self.batch.design,
                self.batch.response,
                self.responsibilities[:, j],
                ridge=0.0,
            )
            np.testing.assert_allclose(
                new_state.betas[j], reference, rtol=1e-10, atol=1e-12
            )


@pytest.mark.parametrize("seed", range(100))
def test_m_step_matches_weighted_normal_equations(seed):
    instance = MStepInstance(seed)
    config = EMConfig(sigma=1.0, ridge=0.0)
    new_state = m_step(
        instance.batch, instance.responsibilities, instance.state, config
    )
    instance.check_equals(new_state)
    assert not np.any(new_state.degenerate)
    np.testing.assert_array_equal(new_state.weights, instance.state.weights)


@pytest.mark.parametrize("seed", range(10))
def test_m_step_estimated_weights(seed):
    instance = MStepInstance(seed)
    config = EMConfig(sigma=1.0, ridge=0.0, weight_mode="estimated")
    new_state = m_step(
        instance.batch, instance.responsibilities, instance.state, config
    )
    np.testing.assert_allclose(
        new_state.weights, instance.responsibilities.mean(axis=0), rtol=1e-6
    )
    np.testing.assert_allclose(new_state.weights.sum(), 1.0, atol=1e-10)


def test_m_step_single_component_is_ordinary_least_squares():
    rng = np.random.default_rng(0)
    design = rng.standard_normal((40, 3))
    response = design @ np.array([1.0, -2.0, 0.5]) + 0.1 * rng.standard_normal(40)
    batch = Dataset(design=design, response=response)
    state = EMState(betas=[[9.0, 9.0, 9.0]], weights=[1.0])
    new_state = m_step(batch, np.ones((40, 1)), state, EMConfig(ridge=0.0))
    ols = np.linalg.lstsq(design, response, rcond=None)[0]
    np.testing.assert_allclose(new_state.betas[0], ols, rtol=1e-10)


def test_m_step_zero_mass_component_is_degenerate():
    rng = np.random.default_rng(1)
    batch = Dataset(
        design=rng.standard_normal((30, 2)), response=rng.standard_normal(30)
    )
    state = EMState(betas=[[1.0, 1.0], [-3.0, 4.0]], weights=[0.5, 0.5])
    responsibilities = np.zeros((30, 2))
    responsibilities[:, 0] = 1.0
    floor = 1e-8
    config = EMConfig(ridge=0.0, weight_mode="estimated", min_weight_floor=floor)
    new_state = m_step(batch, responsibilities, state, config)
    np.testing.assert_array_equal(new_state.betas[1], [-3.0, 4.0])
    np.testing.assert_array_equal(new_state.degenerate, [False, True])
    np.testing.assert_allclose(new_state.weights[1], floor / (1.0 + floor), rtol=1e-12)


def test_m_step_rank_deficient_component_is_degenerate():
    design = np.zeros((10, 2))
    design[:, 0] = np.arange(1.0, 11.0)
    batch = Dataset(design=design, response=np.arange(10.0))
    state = EMState(betas=[[0.5, 0.5]], weights=[1.0])
    new_state = m_step(batch, np.ones((10, 1)), state, EMConfig(ridge=0.0))
    assert new_state.degenerate[0]
    np.testing.assert_array_equal(new_state.betas[0], [0.5, 0.5])
    # the default ridge regularises the same system
    regularised = m_step(batch, np.ones((10, 1)), state, EMConfig())
    assert not regularised.degenerate[0]


def test_m_step_shape_checks():
    batch = Dataset(design=np.ones((5, 2)), response=np.ones(5))
    state = EMState(betas=np.zeros((2, 2)), weights=[0.5, 0.5])
    with pytest.raises(ValueError, match="responsibilities shape"):
        m_step(batch, np.ones((5, 3)) / 3.0, state, EMConfig())
    with pytest.raises(ValueError, match="min_weight_floor must be < 1/k"):
        m_step(batch, np.ones((5, 2)) / 2.0, state, EMConfig(min_weight_floor=0.6))


def test_solve_weighted_normal_equations_zero_mass():
    beta, ok = solve_weighted_normal_equations(
        np.eye(2), np.ones(2), np.zeros(2), ridge=1.0
    )
    assert beta is None
    assert not ok


def test_solve_weighted_normal_equations_mass_below_one_sample():
    beta, ok = solve_weighted_normal_equations(
        np.eye(2), np.ones(2), np.array([0.4, 0.5]), ridge=0.0
    )
    assert ok
    np.testing.assert_allclose(beta, [1.0, 1.0], rtol=1e-12)


def test_m_step_low_mass_component_is_solved():
    rng = np.random.default_rng(8)
    batch = Dataset(
        design=rng.standard_normal((50, 2)), response=rng.standard_normal(50)
    )
    responsibilities = np.empty((50, 2))
    responsibilities[:, 0] = 0.99
    responsibilities[:, 1] = 0.01
    state = EMState(betas=np.zeros((2, 2)), weights=[0.5, 0.5])
    new_state = m_step(batch, responsibilities, state, EMConfig(ridge=0.0))
    # total mass 0.5 on the second component, well conditioned
    assert not np.any(new_state.degenerate)
    np.testing.assert_allclose(
        new_state.betas[1],
        weighted_normal_equations_reference(
            batch.design, batch.response, responsibilities[:, 1], ridge=0.0
        ),
        atol=1e-10,
    )



def test_update_mixing_weights_floor():
    weights = update_mixing_weights(np.array([0.7, 0.3, 0.0]), 0.01)
    np.testing.assert_allclose(weights, np.array([0.7, 0.3, 0.01]) / 1.01)
