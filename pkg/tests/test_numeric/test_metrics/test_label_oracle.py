import numpy as np

import pytest

from mixreg.numeric.data_generation import sample_dataset
from mixreg.numeric.metrics import label_oracle_betas, label_oracle_error
from mixreg.numeric.mixture_model import MixtureParams, orthogonal_scaled_params


def test_label_oracle_noiseless_is_exact():
    truth = orthogonal_scaled_params(k=3, d=4, r=2.0)
    data = sample_dataset(truth, n=300, seed=1)
    np.testing.assert_allclose(
        label_oracle_betas(data, truth), truth.betas, rtol=0.0, atol=1e-12
    )
    assert label_oracle_error(data, truth) <= 1e-12


def test_label_oracle_matches_per_component_least_squares():
    truth = orthogonal_scaled_params(k=2, d=3, r=1.0, noise_sigma=0.5)
    data = sample_dataset(truth, n=500, seed=2)
    betas = label_oracle_betas(data, truth)
    for j in range(2):
        rows = data.labels == j
        ols = np.linalg.lstsq(data.design[rows], data.response[rows], rcond=None)[0]
        np.testing.assert_allclose(betas[j], ols, rtol=1e-10)


def test_label_oracle_error_shrinks_with_samples():
    truth = orthogonal_scaled_params(k=2, d=3, r=1.0, noise_sigma=0.1)
    small = label_oracle_error(sample_dataset(truth, n=400, seed=3), truth)
    large = label_oracle_error(sample_dataset(truth, n=40000, seed=3), truth)
    assert large < small
    assert large < 0.01


def test_label_oracle_keeps_truth_for_empty_component():
    truth = MixtureParams(
        betas=[[1.0, 0.0], [0.0, 1.0]], weights=[1.0, 0.0], noise_sigma=0.1
    )
    data = sample_dataset(truth, n=50, seed=4)
    betas = label_oracle_betas(data, truth)
    np.testing.assert_array_equal(betas[1], truth.betas[1])


def test_label_oracle_needs_labels():
    truth = orthogonal_scaled_params(k=2, d=2, r=1.0)
    data = sample_dataset(truth, n=10, seed=0).without_labels()
    with pytest.raises(ValueError, match="needs a dataset with labels"):
        label_oracle_error(data, truth)
