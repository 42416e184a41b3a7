import numpy as np

import pytest

from mixreg.numeric.mixture_model import (
    MixtureParams,
    pairwise_distances,
    separation_stats,
)


class SeparationStatsSolution:
    def __init__(self, betas, weights, pairwise, r_min, r_max, rho_pi):
        self.params = MixtureParams(betas=betas, weights=weights)
        self.ref_pairwise = np.asarray(pairwise, dtype=np.float64)
        self.ref_r_min = r_min
        self.ref_r_max = r_max
        self.ref_rho_pi = rho_pi

    def check_equals(self, stats):
        np.testing.assert_allclose(stats.pairwise, self.ref_pairwise, atol=1e-15)
        np.testing.assert_allclose(stats.r_min, self.ref_r_min, rtol=1e-15)
        np.testing.assert_allclose(stats.r_max, self.ref_r_max, rtol=1e-15)
        np.testing.assert_allclose(stats.rho_pi, self.ref_rho_pi, rtol=1e-15)


def test_separation_stats_orthonormal():
    solution = SeparationStatsSolution(
        betas=[[1.0, 0.0], [0.0, 1.0]],
        weights=[0.5, 0.5],
        pairwise=[[0.0, np.sqrt(2.0)], [np.sqrt(2.0), 0.0]],
        r_min=np.sqrt(2.0),
        r_max=np.sqrt(2.0),
        rho_pi=1.0,
    )
    solution.check_equals(separation_stats(solution.params))


def test_separation_stats_hand_computed():
    solution = SeparationStatsSolution(
        betas=[[3.0, 0.0], [0.0, 4.0], [0.0, 0.0]],
        weights=[0.5, 0.3, 0.2],
        pairwise=[[0.0, 5.0, 3.0], [5.0, 0.0, 4.0], [3.0, 4.0, 0.0]],
        r_min=3.0,
        r_max=5.0,
        rho_pi=2.5,
    )
    stats = separation_stats(solution.params)
    solution.check_equals(stats)
    assert stats.pi_min == 0.2


def test_separation_stats_identical_betas():
    params = MixtureParams(betas=[[1.0, -1.0], [1.0, -1.0]], weights=[0.5, 0.5])
    assert separation_stats(params).r_min == 0.0


def test_separation_stats_single_component():
    stats = separation_stats(MixtureParams(betas=[[1.0, 2.0]], weights=[1.0]))
    assert stats.r_min == np.inf
    assert stats.r_max == np.inf
    assert stats.rho_pi == 1.0
    assert stats.pi_min == 1.0


def test_separation_stats_rejects_zero_weight():
    params = MixtureParams(betas=[[1.0], [2.0]], weights=[1.0, 0.0])
    with pytest.raises(ValueError, match="rho_pi is undefined"):
        separation_stats(params)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_separation_stats_permutation_and_scaling(seed):
    rng = np.random.default_rng(seed)
    betas = rng.standard_normal((4, 3))
    weights = rng.dirichlet(np.ones(4))
    weights /= weights.sum()
    params = MixtureParams(betas=betas, weights=weights)
    stats = separation_stats(params)

    pairwise = stats.pairwise
    np.testing.assert_array_equal(pairwise, pairwise.T)
    np.testing.assert_array_equal(np.diag(pairwise), 0.0)
    assert stats.rho_pi >= 1.0

    permutation = rng.permutation(4)
    permuted = separation_stats(params.permuted(permutation))
    assert permuted.r_min == stats.r_min
    assert permuted.r_max == stats.r_max
    assert permuted.rho_pi == stats.rho_pi
    np.testing.assert_array_equal(
        permuted.pairwise, pairwise[np.ix_(permutation, permutation)]
    )

    # powers of two scale distances exactly
    scaled = separation_stats(params.scaled(4.0))
    assert scaled.r_min == 4.0 * stats.r_min
    assert scaled.r_max == 4.0 * stats.r_max
    assert scaled.rho_pi == stats.rho_pi


def test_pairwise_distances_matches_norms():
    betas = np.array([[1.0, 2.0, 2.0], [0.0, 0.0, 0.0]])
    np.testing.assert_allclose(pairwise_distances(betas), [[0.0, 3.0], [3.0, 0.0]])
