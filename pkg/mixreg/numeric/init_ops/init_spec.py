"""Initialisation specification."""
from dataclasses import dataclass

import numpy as np

INIT_KINDS = ("perturbed-oracle", "random")


@dataclass(frozen=True)
class InitSpec:
    """How the initial EM state is produced.

    Attributes
    ----------
    kind: str
        'perturbed-oracle' (truth plus a controlled perturbation) or
        'random' (least squares on a random partition of the samples).
    beta_radius: float
        Exact distance of every beta_j^0 from beta_j* (perturbed-oracle).
    weight_rel_radius: float
        Relative perturbation of the mixing weights, in [0, 0.5]
        (perturbed-oracle).
    seed: int
        64-bit seed of the initialiser stream.
    """

    kind: str = "perturbed-oracle"
    beta_radius: float = 0.0
    weight_rel_radius: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in INIT_KINDS:
            raise ValueError(
                f"init kind must be one of {INIT_KINDS}, got '{self.kind}'"
            )
        if not np.isfinite(self.beta_radius) or self.beta_radius < 0.0:
            raise ValueError(f"beta_radius must be >= 0, got {self.beta_radius}")
        if not 0.0 <= self.weight_rel_radius <= 0.5:
            raise ValueError(
                f"weight_rel_radius must lie in [0, 0.5], got {self.weight_rel_radius}"
            )
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def with_seed(self, seed: int) -> "InitSpec":
        return InitSpec(
            kind=self.kind,
            beta_radius=self.beta_radius,
            weight_rel_radius=self.weight_rel_radius,
            seed=seed,
        )

    def with_beta_radius(self, beta_radius: float) -> "InitSpec":
        return InitSpec(
            kind=self.kind,
            beta_radius=beta_radius,
            weight_rel_radius=self.weight_rel_radius,
            seed=self.seed,
        )

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "beta_radius": self.beta_radius,
            "weight_rel_radius": self.weight_rel_radius,
            "seed": self.seed,
        }
