"""Comparison estimators."""
from .alternating_minimization import (
    alternating_minimization_step,
    assign_components,
    gen_hard_assignment_kernel,
    run_alternating_minimization,
)
