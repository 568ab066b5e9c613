"""Miniature networks for gradient checks (double precision)."""
import numpy as np

from hapticpred.neural import ConvLSTM, Conv1D, Dense, Flatten, LastStep, MaxPool, ReLU, Sequential


def dense_net(seed=0):
    rng = np.random.default_rng(seed)
    net = Sequential([Dense(6, 8, rng), ReLU(), Dense(8, 5, rng), ReLU(), Dense(5, 3, rng)])
    for _, layer in net.named_layers():
        if "b" in layer.params:
            layer.params["b"][:] = rng.normal(0, 0.1, layer.params["b"].shape)
    return net, rng.normal(size=(4, 6))


def conv_pool_net(seed=0):
    rng = np.random.default_rng(seed)
    net = Sequential([Conv1D(2, 4, 4, rng), ReLU(), MaxPool(), Conv1D(4, 3, 3, rng), MaxPool(),
                      Flatten(), Dense(9, 2, rng)])
    # continuous random inputs keep pooling pairs away from ties
    return net, rng.normal(size=(3, 11, 2))


def convlstm_net(seed=0):
    rng = np.random.default_rng(seed)
    cell = ConvLSTM(2, 3, k=3, rng=rng)
    for name in ("wci", "wcf", "wco"):
        cell.params[name][:] = rng.normal(0, 0.5, 3)
    net = Sequential([cell, LastStep(), Flatten(), Dense(15, 2, rng)])
    return net, rng.normal(size=(2, 3, 5, 2))
