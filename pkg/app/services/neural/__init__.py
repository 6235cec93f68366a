"""
Differentiable core: autodiff tensors, the LSTM policy and Adam.
"""
from app.services.neural.tensor import Tensor, no_grad, parameter
from app.services.neural.adam import AdamOptimizer, ParameterLayout, adam_step
from app.services.neural.lstm import (
    PolicyNetwork,
    init_weights,
    load_checkpoint,
    lstm_step,
    policy_forward,
    save_checkpoint,
)

__all__ = [
    "Tensor",
    "no_grad",
    "parameter",
    "AdamOptimizer",
    "ParameterLayout",
    "adam_step",
    "PolicyNetwork",
    "init_weights",
    "load_checkpoint",
    "lstm_step",
    "policy_forward",
    "save_checkpoint",
]
