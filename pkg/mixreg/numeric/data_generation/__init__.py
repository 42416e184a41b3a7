"""Synthetic data generation from the mixture model."""
from .dataset import Dataset
from .sample_dataset import (
    draw_gaussian_block,
    gen_counter_based_rng,
    sample_dataset,
    split_batches,
)
