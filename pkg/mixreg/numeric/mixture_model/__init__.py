"""Mixture parameters, separation statistics and local conditions."""
from .mixture_params import (
    MixtureParams,
    orthogonal_scaled_params,
    random_sphere_params,
)
from .separation_stats import SeparationStats, pairwise_distances, separation_stats
from .local_conditions import (
    ConditionReport,
    DEFAULT_CONDITION_CONSTANTS,
    check_local_conditions,
)
