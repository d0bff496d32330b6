from .adam import AdamHyper, AdamState, adam_step
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .net import (
    NetOutput,
    backward,
    entropy,
    forward,
    gradient_penalty,
    greedy_actions,
    init_params,
    log_prob,
    logit_input_gradient,
    sample_actions,
    softmax,
)
from .spec import Conv, Dense, Flatten, Head, NetSpec, Relu, default_trunk

__all__ = [
    "AdamHyper",
    "AdamState",
    "CheckpointError",
    "Conv",
    "Dense",
    "Flatten",
    "Head",
    "NetOutput",
    "NetSpec",
    "Relu",
    "adam_step",
    "backward",
    "default_trunk",
    "entropy",
    "forward",
    "gradient_penalty",
    "greedy_actions",
    "init_params",
    "load_checkpoint",
    "log_prob",
    "logit_input_gradient",
    "sample_actions",
    "save_checkpoint",
    "softmax",
]
