from .layers import (
    BiLstm,
    Embedding,
    FeedForward,
    Linear,
    LstmCell,
    Parameter,
    concat,
    concat_backward,
    debug_checks,
    mean_pool,
    mean_pool_backward,
    relu,
    relu_backward,
    set_debug,
    softmax_cross_entropy,
)
from .optim import Adam, clip_global_norm
from .gradcheck import grad_check, params_as_dtype
from .checkpoint import load_tensors, save_tensors

__all__ = [
    "Adam", "BiLstm", "Embedding", "FeedForward", "Linear", "LstmCell",
    "Parameter", "clip_global_norm", "concat", "concat_backward",
    "debug_checks", "grad_check",
    "load_tensors", "mean_pool", "mean_pool_backward", "params_as_dtype",
    "relu", "relu_backward", "save_tensors", "set_debug",
    "softmax_cross_entropy",
]
