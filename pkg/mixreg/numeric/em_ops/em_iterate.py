"""A single EM alternation."""
from mixreg.numeric.data_generation.dataset import Dataset
from mixreg.numeric.em_ops.em_state import EMConfig, EMState
from mixreg.numeric.em_ops.m_step import m_step
from mixreg.numeric.em_ops.posterior_weights import compute_responsibilities


def em_iterate(state: EMState, batch: Dataset, config: EMConfig) -> EMState:
    """E-step on `batch` followed by the M-step, a pure function of its inputs."""
    if batch.num_samples < 1:
        raise ValueError("batch must be non-empty")
    responsibilities = compute_responsibilities(
        state,
        batch.design,
        batch.response,
        config.sigma,
        num_threads=config.num_threads,
    )
    return m_step(batch, responsibilities, state, config)
