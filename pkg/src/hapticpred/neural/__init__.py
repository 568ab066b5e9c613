"""Minimal differentiable-layer engine (numpy, manual backprop)."""
from .checkpoint import load_checkpoint, save_checkpoint
from .convlstm import ConvLSTM, convlstm_step, convlstm_step_backward
from .core import (Adam, adam_step, count_params, grad_dict, iter_params, load_params,
                   mse_loss, param_dict, rmse_loss, zero_grads)
from .gradcheck import GradCheckReport, grad_check
from .layers import (Conv1D, Dense, Flatten, GlobalAveragePool, LastStep, Layer, MaxPool,
                     ReLU, Sequential, Upsample, sigmoid)

__all__ = [
    "Adam", "Conv1D", "ConvLSTM", "Dense", "Flatten", "GlobalAveragePool", "GradCheckReport",
    "LastStep", "Layer", "MaxPool", "ReLU", "Sequential", "Upsample", "adam_step",
    "convlstm_step", "convlstm_step_backward", "count_params", "grad_check", "grad_dict",
    "iter_params", "load_checkpoint", "load_params", "mse_loss", "param_dict", "rmse_loss",
    "save_checkpoint", "sigmoid", "zero_grads",
]
