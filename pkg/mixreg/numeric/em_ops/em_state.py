"""EM iterate, configuration and run trace value types."""
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from mixreg.numeric.mixture_model.mixture_params import MixtureParams
from mixreg.utils.precision import (
    STATE_WEIGHT_SUM_ATOL,
    check_probability_vector,
    frozen_array,
)

WEIGHT_MODES = ("fixed", "estimated")


@dataclass(frozen=True, eq=False)
class EMState:
    """Current iterate (beta_j, pi_j) of EM or alternating minimization.

    Attributes
    ----------
    betas: numpy.ndarray
        2D (k, d) array of current regression vectors.
    weights: numpy.ndarray
        1D (k,) current mixing weights.
    degenerate: numpy.ndarray
        1D (k,) bool flags, set for components whose last M-step solve was
        singular (their beta was kept from the previous state).
    """

    betas: np.ndarray
    weights: np.ndarray
    degenerate: Optional[np.ndarray] = None

    def __post_init__(self):
        betas = np.asarray(self.betas, dtype=np.float64)
        if betas.ndim != 2 or betas.shape[0] < 1 or betas.shape[1] < 1:
            raise ValueError(
                f"betas must be a (k, d) array with k, d >= 1, got shape {betas.shape}"
            )
        weights = check_probability_vector(
            self.weights, atol=STATE_WEIGHT_SUM_ATOL, name="weights"
        )
        if weights.shape[0] != betas.shape[0]:
            raise ValueError(
                f"weights has {weights.shape[0]} entries for {betas.shape[0]} betas"
            )
        if self.degenerate is None:
            degenerate = np.zeros(betas.shape[0], dtype=bool)
        else:
            degenerate = np.asarray(self.degenerate, dtype=bool)
            assert degenerate.shape == weights.shape, "degenerate flags shape mismatch"
        object.__setattr__(self, "betas", frozen_array(betas))
        object.__setattr__(self, "weights", frozen_array(weights))
        object.__setattr__(self, "degenerate", frozen_array(degenerate, dtype=bool))

    @property
    def num_components(self) -> int:
        return self.betas.shape[0]

    @property
    def dim(self) -> int:
        return self.betas.shape[1]

    @classmethod
    def from_params(cls, params: MixtureParams) -> "EMState":
        return cls(betas=params.betas, weights=params.weights)

    def permuted(self, permutation: Sequence[int]) -> "EMState":
        """Return the state with components reordered as `permutation`."""
        permutation = np.asarray(permutation, dtype=int)
        return EMState(
            betas=self.betas[permutation],
            weights=self.weights[permutation],
            degenerate=self.degenerate[permutation],
        )


@dataclass(frozen=True)
class EMConfig:
    """Knobs shared by the EM schedules and alternating minimization.

    Attributes
    ----------
    sigma: float
        Known noise level, exactly 0.0 selects the hard-assignment E-step.
    weight_mode: str
        'fixed' keeps the mixing weights of the input state, 'estimated'
        updates them to the mean responsibilities.
    ridge: float or None
        Tikhonov term added to each weighted Gram matrix, None resolves to
        1e-10 * batch size.
    max_iters: int
        Iteration cap of the pooled schedules (sample splitting uses T).
    tol: float
        Stop when max_j ||beta_j^+ - beta_j|| <= tol.
    min_weight_floor: float
        Lower clamp on estimated weights, renormalised afterwards.
    num_threads: bool or int
        False runs the serial row kernels, an int the numba parallel ones.
    """

    sigma: float = 1.0
    weight_mode: str = "fixed"
    ridge: Optional[float] = None
    max_iters: int = 100
    tol: float = 0.0
    min_weight_floor: float = 1e-8
    num_threads: Union[bool, int] = False

    def __post_init__(self):
        if not np.isfinite(self.sigma) or self.sigma < 0.0:
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma}")
        if self.weight_mode not in WEIGHT_MODES:
            raise ValueError(
                f"weight_mode must be one of {WEIGHT_MODES}, got '{self.weight_mode}'"
            )
        if self.ridge is not None and not self.ridge >= 0.0:
            raise ValueError(f"ridge must be >= 0, got {self.ridge}")
        if self.max_iters < 0:
            raise ValueError(f"max_iters must be >= 0, got {self.max_iters}")
        if not self.tol >= 0.0:
            raise ValueError(f"tol must be >= 0, got {self.tol}")
        if not 0.0 <= self.min_weight_floor < 1.0:
            raise ValueError(
                f"min_weight_floor must lie in [0, 1), got {self.min_weight_floor}"
            )

    def resolve_ridge(self, batch_size: int) -> float:
        return 1e-10 * batch_size if self.ridge is None else float(self.ridge)

    def check_num_components(self, num_components: int) -> None:
        """Validate the weight floor against the number of components."""
        if not self.min_weight_floor < 1.0 / num_components:
            raise ValueError(
                f"min_weight_floor must be < 1/k = {1.0 / num_components}, "
                f"got {self.min_weight_floor}"
            )


@dataclass(frozen=True, eq=False)
class RunTrace:
    """Per-iteration history of an estimator run.

    `states` holds the initial state followed by one state per iteration,
    hence len(states) == iterations_used + 1.
    """

    states: Tuple[EMState, ...]
    batch_sizes: Tuple[int, ...]
    converged: bool
    estimator: str = "em-pooled"
    movements: Tuple[float, ...] = ()
    wall_times: Tuple[float, ...] = ()
    log_likelihoods: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "batch_sizes", tuple(self.batch_sizes))
        assert len(self.states) >= 1, "trace needs at least the initial state"
        assert (
            len(self.batch_sizes) == len(self.states) - 1
        ), "one batch size per iteration"

    @property
    def iterations_used(self) -> int:
        return len(self.states) - 1

    @property
    def final_state(self) -> EMState:
        return self.states[-1]

    @property
    def degenerate_count(self) -> int:
        """Number of (iteration, component) pairs flagged degenerate."""
        return int(sum(np.count_nonzero(state.degenerate) for state in self.states))
