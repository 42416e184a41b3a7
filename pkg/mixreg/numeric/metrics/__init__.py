"""Matched errors, contraction and Monte Carlo diagnostics."""
from .matched_error import (
    EXHAUSTIVE_MATCHING_MAX_K,
    MatchedError,
    assignment_bottleneck_permutation,
    cross_distances,
    exhaustive_bottleneck_permutation,
    matched_error,
)
from .contraction_trace import ContractionTrace, contraction_ratio, contraction_trace
from .event_diagnostics import (
    EventStats,
    MONTE_CARLO_CHUNK_SIZE,
    default_event_tau,
    event_diagnostics,
)
from .em_operator_terms import EMOperatorTerms, em_operator_terms
from .label_oracle import label_oracle_betas, label_oracle_error
