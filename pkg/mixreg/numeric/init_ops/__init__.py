"""Initialisation strategies."""
from .init_spec import INIT_KINDS, InitSpec
from .initializers import RANDOM_INIT_RIDGE, perturbed_init, random_init
