"""Ground truth (or estimated) parameters of a mixture of linear regressions."""
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from mixreg.utils.precision import (
    PARAMS_WEIGHT_SUM_ATOL,
    check_probability_vector,
    frozen_array,
)


@dataclass(frozen=True, eq=False)
class MixtureParams:
    """Mixture of k linear models y = <X, beta_j> + sigma * e.

    Attributes
    ----------
    betas: numpy.ndarray
        2D (k, d) array of regression vectors, one row per component.
    weights: numpy.ndarray
        1D (k,) mixing weights, non-negative and summing to one.
    noise_sigma: float
        Standard deviation of the additive Gaussian noise, exactly 0.0 for
        the noiseless model.
    """

    betas: np.ndarray
    weights: np.ndarray
    noise_sigma: float = 0.0

    def __post_init__(self):
        betas = np.asarray(self.betas, dtype=np.float64)
        if betas.ndim != 2 or betas.shape[0] < 1 or betas.shape[1] < 1:
            raise ValueError(
                f"betas must be a (k, d) array with k, d >= 1, got shape {betas.shape}"
            )
        if not np.all(np.isfinite(betas)):
            raise ValueError("betas must be finite")
        weights = check_probability_vector(
            self.weights, atol=PARAMS_WEIGHT_SUM_ATOL, name="weights"
        )
        if weights.shape[0] != betas.shape[0]:
            raise ValueError(
                f"weights has {weights.shape[0]} entries for {betas.shape[0]} betas"
            )
        noise_sigma = float(self.noise_sigma)
        if not np.isfinite(noise_sigma) or noise_sigma < 0.0:
            raise ValueError(f"sigma must be finite and >= 0, got {noise_sigma}")
        object.__setattr__(self, "betas", frozen_array(betas))
        object.__setattr__(self, "weights", frozen_array(weights))
        object.__setattr__(self, "noise_sigma", noise_sigma)

    @property
    def num_components(self) -> int:
        return self.betas.shape[0]

    @property
    def dim(self) -> int:
        return self.betas.shape[1]

    def scaled(self, beta_scale: float) -> "MixtureParams":
        """Return params with every regression vector scaled by beta_scale."""
        return MixtureParams(
            betas=beta_scale * self.betas,
            weights=self.weights,
            noise_sigma=self.noise_sigma,
        )

    def with_sigma(self, noise_sigma: float) -> "MixtureParams":
        return MixtureParams(
            betas=self.betas, weights=self.weights, noise_sigma=noise_sigma
        )

    def permuted(self, permutation: Sequence[int]) -> "MixtureParams":
        """Return params with components reordered as `permutation`."""
        permutation = np.asarray(permutation, dtype=int)
        return MixtureParams(
            betas=self.betas[permutation],
            weights=self.weights[permutation],
            noise_sigma=self.noise_sigma,
        )

    def to_json_dict(self) -> dict:
        """Serialise to the shared {"betas", "weights", "sigma"} JSON object."""
        return {
            "betas": self.betas.tolist(),
            "weights": self.weights.tolist(),
            "sigma": self.noise_sigma,
        }

    @classmethod
    def from_json_dict(cls, json_dict: dict) -> "MixtureParams":
        for key in ("betas", "weights", "sigma"):
            if key not in json_dict:
                raise ValueError(f"mixture params JSON is missing key '{key}'")
        return cls(
            betas=np.asarray(json_dict["betas"], dtype=np.float64),
            weights=np.asarray(json_dict["weights"], dtype=np.float64),
            noise_sigma=json_dict["sigma"],
        )


def _resolve_weights(k: int, weights: Optional[Sequence[float]]) -> np.ndarray:
    if weights is None:
        return np.full(k, 1.0 / k)
    return np.asarray(weights, dtype=np.float64)


def orthogonal_scaled_params(
    k: int,
    d: int,
    r: float,
    weights: Optional[Sequence[float]] = None,
    noise_sigma: float = 0.0,
) -> MixtureParams:
    """Place beta_j = r * e_j on the first k canonical directions.

    Gives R_min = R_max = r * sqrt(2) for k >= 2; requires d >= k.
    """
    if d < k:
        raise ValueError(f"orthogonal-scaled truth needs d >= k, got d={d}, k={k}")
    if r <= 0.0:
        raise ValueError(f"r must be positive, got {r}")
    betas = np.zeros((k, d))
    betas[np.arange(k), np.arange(k)] = r
    return MixtureParams(
        betas=betas, weights=_resolve_weights(k, weights), noise_sigma=noise_sigma
    )


def random_sphere_params(
    k: int,
    d: int,
    r: float,
    seed: int,
    weights: Optional[Sequence[float]] = None,
    noise_sigma: float = 0.0,
) -> MixtureParams:
    """Draw each beta_j from N(0, I_d) and normalise it to norm r."""
    if r <= 0.0:
        raise ValueError(f"r must be positive, got {r}")
    rng = np.random.Generator(np.random.Philox(seed))
    betas = rng.standard_normal((k, d))
    betas *= r / np.linalg.norm(betas, axis=1, keepdims=True)
    return MixtureParams(
        betas=betas, weights=_resolve_weights(k, weights), noise_sigma=noise_sigma
    )
