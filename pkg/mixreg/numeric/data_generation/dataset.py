"""Dataset of design rows, responses and (quarantined) latent labels."""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from mixreg.utils.precision import frozen_array


@dataclass(frozen=True, eq=False)
class Dataset:
    """Samples (X_i, y_i) of a mixture of linear regressions.

    Attributes
    ----------
    design: numpy.ndarray
        2D (n, d) array, one design row X_i per sample.
    response: numpy.ndarray
        1D (n,) array of responses y_i.
    labels: numpy.ndarray or None
        1D (n,) integer array of generating components z_i. Kept for
        diagnostics only, estimators never receive it.
    seed: int
        Seed the dataset was generated from (0 for external data).
    """

    design: np.ndarray
    response: np.ndarray
    labels: Optional[np.ndarray] = None
    seed: int = 0

    def __post_init__(self):
        design = np.asarray(self.design, dtype=np.float64)
        response = np.asarray(self.response, dtype=np.float64)
        if design.ndim != 2 or design.shape[1] < 1:
            raise ValueError(f"design must be a (n, d) array, got {design.shape}")
        if response.shape != (design.shape[0],):
            raise ValueError(
                f"response shape {response.shape} does not match "
                f"{design.shape[0]} design rows"
            )
        object.__setattr__(self, "design", frozen_array(design))
        object.__setattr__(self, "response", frozen_array(response))
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != response.shape:
                raise ValueError(
                    f"labels shape {labels.shape} does not match response "
                    f"shape {response.shape}"
                )
            object.__setattr__(self, "labels", frozen_array(labels, dtype=np.int64))
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def num_samples(self) -> int:
        return self.design.shape[0]

    @property
    def dim(self) -> int:
        return self.design.shape[1]

    def __len__(self) -> int:
        return self.num_samples

    def slice(self, start: int, stop: int) -> "Dataset":
        """Contiguous sub-dataset [start, stop), labels sliced alongside."""
        return Dataset(
            design=self.design[start:stop],
            response=self.response[start:stop],
            labels=None if self.labels is None else self.labels[start:stop],
            seed=self.seed,
        )

    def without_labels(self) -> "Dataset":
        return Dataset(design=self.design, response=self.response, seed=self.seed)
