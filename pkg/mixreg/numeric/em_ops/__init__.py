"""EM operations: E-step, M-step and iteration schedules."""
from .em_state import EMConfig, EMState, RunTrace, WEIGHT_MODES
from .posterior_weights import (
    compute_responsibilities,
    gen_posterior_weights_kernel,
    mixture_log_likelihood,
    posterior_weights,
)
from .m_step import m_step, solve_weighted_normal_equations, update_mixing_weights
from .em_iterate import em_iterate
from .em_schedules import run_iteration_schedule, run_pooled_em, run_sample_splitting_em
