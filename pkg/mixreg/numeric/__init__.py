"""MixReg numeric kernels."""
from .mixture_model import *
from .data_generation import *
from .em_ops import *
from .init_ops import *
from .metrics import *
from .baseline import *
