"""Losses, the Adam optimizer and parameter bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ShapeError, TrainingAbort
from .layers import Layer, Sequential

RMSE_EPS = 1e-12


def iter_params(module, prefix=""):
    """Yield ``(name, layer, key)`` for every parameter below ``module``.

    Containers expose children through ``named_layers()``; names are the
    dotted path of child names and the parameter key.
    """
    if isinstance(module, Layer):
        for key in module.params:
            yield (f"{prefix}{key}", module, key)
    children = module.named_layers() if hasattr(module, "named_layers") else []
    for name, child in children:
        yield from iter_params(child, f"{prefix}{name}.")


def param_dict(module) -> dict:
    return {name: layer.params[key] for name, layer, key in iter_params(module)}


def grad_dict(module) -> dict:
    return {name: layer.grads[key] for name, layer, key in iter_params(module)}


def zero_grads(module) -> None:
    for _, layer, key in iter_params(module):
        layer.grads[key] = np.zeros_like(layer.params[key])


def load_params(module, values: dict) -> None:
    """Copy ``values`` into the module's parameters (names must match exactly)."""
    entries = list(iter_params(module))
    names = {n for n, _, _ in entries}
    if names != set(values):
        missing = sorted(names - set(values))[:3]
        extra = sorted(set(values) - names)[:3]
        raise ShapeError(f"parameter names differ; missing {missing}, unexpected {extra}")
    for name, layer, key in entries:
        v = np.asarray(values[name])
        if v.shape != layer.params[key].shape:
            raise ShapeError(f"{name}: shape {v.shape} != {layer.params[key].shape}")
        layer.params[key][...] = v


def count_params(module) -> int:
    return sum(layer.params[key].size for _, layer, key in iter_params(module))


def rmse_loss(pred, target):
    """Root mean squared error over all entries and its gradient."""
    pred = np.asarray(pred)
    target = np.asarray(target)
    if pred.shape != target.shape:
        raise ShapeError(f"prediction {pred.shape} and target {target.shape} differ")
    diff = pred - target
    loss = float(np.sqrt(np.mean(diff * diff)))
    grad = diff / (diff.size * max(loss, RMSE_EPS))
    return loss, grad.astype(pred.dtype, copy=False)


def mse_loss(pred, target):
    pred = np.asarray(pred)
    target = np.asarray(target)
    if pred.shape != target.shape:
        raise ShapeError(f"prediction {pred.shape} and target {target.shape} differ")
    diff = pred - target
    return float(np.mean(diff * diff)), (2.0 * diff / diff.size).astype(pred.dtype, copy=False)


@dataclass
class Adam:
    """Bias-corrected Adam over a name -> array parameter mapping."""

    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)

    def step(self, params: dict, grads: dict) -> None:
        for name, g in grads.items():
            if not np.all(np.isfinite(g)):
                raise TrainingAbort(f"non-finite gradient for {name}")
        self.t += 1
        c1 = 1.0 - self.beta1 ** self.t
        c2 = 1.0 - self.beta2 ** self.t
        for name, p in params.items():
            g = grads[name]
            m = self.m.get(name)
            if m is None:
                m = self.m[name] = np.zeros_like(p)
                self.v[name] = np.zeros_like(p)
            v = self.v[name]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= (self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)).astype(p.dtype, copy=False)


def adam_step(params: dict, grads: dict, state: Adam, lr: float | None = None) -> Adam:
    if lr is not None:
        state.lr = lr
    state.step(params, grads)
    return state


__all__ = ["Adam", "adam_step", "rmse_loss", "mse_loss", "iter_params", "param_dict",
           "grad_dict", "zero_grads", "load_params", "count_params", "Sequential"]
