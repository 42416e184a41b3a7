"""Label-oracle fit: per-component least squares using the true labels."""
import numpy as np

from mixreg.numeric.data_generation.dataset import Dataset
from mixreg.numeric.em_ops.m_step import solve_weighted_normal_equations
from mixreg.numeric.mixture_model.mixture_params import MixtureParams


def label_oracle_betas(data: Dataset, truth: MixtureParams) -> np.ndarray:
    """OLS of every component on the samples it generated.

    Components with too few samples for a solve keep their true beta.
    """
    if data.labels is None:
        raise ValueError("label oracle needs a dataset with labels")
    if data.dim != truth.dim:
        raise ValueError(
            f"data dimension {data.dim} does not match truth dimension {truth.dim}"
        )
    betas = np.array(truth.betas)
    for j in range(truth.num_components):
        beta, ok = solve_weighted_normal_equations(
            data.design,
            data.response,
            (data.labels == j).astype(np.float64),
            ridge=0.0,
        )
        if ok:
            betas[j] = beta
    return betas


def label_oracle_error(data: Dataset, truth: MixtureParams) -> float:
    """max_j ||beta_j^oracle - beta_j*||, the statistical floor of any estimator."""
    betas = label_oracle_betas(data, truth)
    return float(np.max(np.linalg.norm(betas - truth.betas, axis=1)))
