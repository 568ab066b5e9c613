"""Layers with hand-written backward passes.

Activations are laid out ``(batch, length, channels)``; recurrent layers take
``(batch, time, length, channels)``. Pooling and upsampling act on axis 1,
so the same classes serve the length axis of a feature map and the time
axis of a sequence.

Every layer keeps the cache of its last ``forward`` call; ``backward``
consumes it, accumulates parameter gradients into ``self.grads`` and returns
the gradient with respect to the input.
"""
from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import ShapeError


def glorot_uniform(rng, fan_in, fan_out, shape, dtype):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape).astype(dtype)


def sigmoid(x):
    # tanh form cannot overflow and is much cheaper than a sign-split exp
    return 0.5 * (np.tanh(0.5 * x) + 1.0)


class Layer:
    """Base class. Stateless layers keep empty ``params``/``grads``."""

    def __init__(self):
        self.params: dict = {}
        self.grads: dict = {}

    def zero_grad(self):
        for k, v in self.params.items():
            self.grads[k] = np.zeros_like(v)

    def forward(self, x):
        raise NotImplementedError

    def backward(self, dy):
        raise NotImplementedError


def same_padding(k: int) -> tuple:
    """Left-heavy split for even kernels: k=4 pads 1 left, 2 right."""
    left = (k - 1) // 2
    return left, k - 1 - left


def im2col(x, k):
    """``(B, L, C)`` -> ``(B * L, k * C)`` windows under same padding."""
    b, length, c = x.shape
    left, right = same_padding(k)
    xp = np.pad(x, ((0, 0), (left, right), (0, 0)))
    # sliding_window_view appends the window axis last: (B, L, C, k)
    win = sliding_window_view(xp, k, axis=1)
    return win.transpose(0, 1, 3, 2).reshape(b * length, k * c)


def col2im(dcols, shape, k):
    """Adjoint of :func:`im2col`."""
    b, length, c = shape
    left, _ = same_padding(k)
    d = dcols.reshape(b, length, k, c)
    dxp = np.zeros((b, length + k - 1, c), dtype=dcols.dtype)
    for j in range(k):
        dxp[:, j:j + length] += d[:, :, j]
    return dxp[:, left:left + length]


class Conv1D(Layer):
    """Same-padded 1-D cross-correlation with per-filter bias.

    The kernel is stored as a ``(k * c_in, filters)`` matrix whose row
    ``j * c_in + c`` multiplies input channel ``c`` at window offset ``j``.
    """

    def __init__(self, c_in, filters, k, rng=None, dtype=np.float64):
        super().__init__()
        self.c_in, self.filters, self.k = c_in, filters, k
        rng = np.random.default_rng(0) if rng is None else rng
        self.params["W"] = glorot_uniform(rng, k * c_in, k * filters, (k * c_in, filters), dtype)
        self.params["b"] = np.zeros(filters, dtype=dtype)
        self.zero_grad()

    def forward(self, x):
        if x.ndim != 3 or x.shape[2] != self.c_in:
            raise ShapeError(f"conv1d expects (B, L, {self.c_in}), got {x.shape}")
        self._shape = x.shape
        self._cols = im2col(x, self.k)
        y = self._cols @ self.params["W"] + self.params["b"]
        return y.reshape(x.shape[0], x.shape[1], self.filters)

    def backward(self, dy):
        d2 = dy.reshape(-1, self.filters)
        self.grads["W"] += self._cols.T @ d2
        self.grads["b"] += d2.sum(axis=0)
        return col2im(d2 @ self.params["W"].T, self._shape, self.k)


class Dense(Layer):
    """``y = x W^T + b`` with ``W`` of shape ``(d_out, d_in)``."""

    def __init__(self, d_in, d_out, rng=None, dtype=np.float64):
        super().__init__()
        self.d_in, self.d_out = d_in, d_out
        rng = np.random.default_rng(0) if rng is None else rng
        self.params["W"] = glorot_uniform(rng, d_in, d_out, (d_out, d_in), dtype)
        self.params["b"] = np.zeros(d_out, dtype=dtype)
        self.zero_grad()

    def forward(self, x):
        if x.shape[-1] != self.d_in:
            raise ShapeError(f"dense expects last dim {self.d_in}, got {x.shape}")
        self._x = x
        return x @ self.params["W"].T + self.params["b"]

    def backward(self, dy):
        x2 = self._x.reshape(-1, self.d_in)
        d2 = dy.reshape(-1, self.d_out)
        self.grads["W"] += d2.T @ x2
        self.grads["b"] += d2.sum(axis=0)
        return dy @ self.params["W"]


class ReLU(Layer):
    def forward(self, x):
        self._mask = x > 0
        return np.where(self._mask, x, 0).astype(x.dtype, copy=False)

    def backward(self, dy):
        return np.where(self._mask, dy, 0).astype(dy.dtype, copy=False)


class MaxPool(Layer):
    """Window-2 max pooling along axis 1; an odd tail element passes through.

    Ties route the gradient to the first (lowest-index) maximum.
    """

    def forward(self, x):
        self._shape = x.shape
        n = x.shape[1]
        m = n // 2
        pairs = x[:, :2 * m].reshape((x.shape[0], m, 2) + x.shape[2:])
        self._second = pairs[:, :, 1] > pairs[:, :, 0]
        y = np.where(self._second, pairs[:, :, 1], pairs[:, :, 0])
        if n % 2:
            y = np.concatenate([y, x[:, -1:]], axis=1)
        return y

    def backward(self, dy):
        n = self._shape[1]
        m = n // 2
        dx = np.zeros(self._shape, dtype=dy.dtype)
        head = dy[:, :m]
        pairs = dx[:, :2 * m].reshape((self._shape[0], m, 2) + self._shape[2:])
        pairs[:, :, 0] = np.where(self._second, 0, head)
        pairs[:, :, 1] = np.where(self._second, head, 0)
        dx[:, :2 * m] = pairs.reshape(dx[:, :2 * m].shape)
        if n % 2:
            dx[:, -1] = dy[:, -1]
        return dx


class Upsample(Layer):
    """Nearest-neighbour repetition along axis 1."""

    def __init__(self, factor=2):
        super().__init__()
        self.factor = factor

    def forward(self, x):
        return np.repeat(x, self.factor, axis=1)

    def backward(self, dy):
        s = dy.shape
        return dy.reshape((s[0], s[1] // self.factor, self.factor) + s[2:]).sum(axis=2)


class Flatten(Layer):
    def forward(self, x):
        self._shape = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dy):
        return dy.reshape(self._shape)


class GlobalAveragePool(Layer):
    """Mean over the length axis: ``(B, L, C) -> (B, C)``."""

    def forward(self, x):
        self._shape = x.shape
        return x.mean(axis=1)

    def backward(self, dy):
        return np.broadcast_to(dy[:, None, :] / self._shape[1], self._shape).copy()


class LastStep(Layer):
    """Final time step of a sequence: ``(B, T, ...) -> (B, ...)``."""

    def forward(self, x):
        self._shape = x.shape
        return x[:, -1]

    def backward(self, dy):
        dx = np.zeros(self._shape, dtype=dy.dtype)
        dx[:, -1] = dy
        return dx


class Sequential(Layer):
    """Chain of layers; parameter names are prefixed with the layer index."""

    def __init__(self, layers):
        super().__init__()
        self.layers = list(layers)

    def named_layers(self):
        return [(str(i), layer) for i, layer in enumerate(self.layers)]

    def forward(self, x):
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, dy):
        for layer in reversed(self.layers):
            dy = layer.backward(dy)
        return dy
