"""1-D convolutional LSTM with peephole connections.

Gates (``*`` same-padded convolution, ``o`` elementwise product)::

    i = sigmoid(Wxi * x + Whi * h + wci o c_prev + bi)
    f = sigmoid(Wxf * x + Whf * h + wcf o c_prev + bf)
    c = f o c_prev + i o tanh(Wxc * x + Whc * h + bc)
    o = sigmoid(Wxo * x + Who * h + wco o c + bo)
    h = o o tanh(c)

The input and hidden convolutions share one kernel matrix acting on the
channel concatenation ``[x, h]``; gate blocks are ordered i, f, c, o. The
peephole weights are one value per hidden channel, broadcast along length.
"""
from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from .layers import Layer, col2im, glorot_uniform, im2col, sigmoid


def convlstm_step(params, x, h_prev, c_prev, k, peephole=True):
    """One cell update; returns ``(h, c, cache)``.

    ``params`` holds ``W`` of shape ``(k * (c_in + c_h), 4 * c_h)``, ``b`` of
    shape ``(4 * c_h,)`` and peephole vectors ``wci``, ``wcf``, ``wco``.
    """
    ch = h_prev.shape[-1]
    if x.shape[:2] != h_prev.shape[:2] or h_prev.shape != c_prev.shape:
        raise ShapeError(f"inconsistent shapes x={x.shape} h={h_prev.shape} c={c_prev.shape}")
    if params["W"].shape[0] != k * (x.shape[-1] + ch) or params["W"].shape[1] != 4 * ch:
        raise ShapeError(f"kernel {params['W'].shape} does not match input {x.shape}, "
                         f"hidden {h_prev.shape}, k={k}")
    z = np.concatenate([x, h_prev], axis=-1)
    cols = im2col(z, k)
    g = (cols @ params["W"] + params["b"]).reshape(x.shape[0], x.shape[1], 4 * ch)
    gi, gf, gc, go = (g[..., j * ch:(j + 1) * ch] for j in range(4))
    if peephole:
        gi = gi + params["wci"] * c_prev
        gf = gf + params["wcf"] * c_prev
    i = sigmoid(gi)
    f = sigmoid(gf)
    ct = np.tanh(gc)
    c = f * c_prev + i * ct
    if peephole:
        go = go + params["wco"] * c
    o = sigmoid(go)
    tc = np.tanh(c)
    h = o * tc
    return h, c, (z.shape, cols, c_prev, i, f, ct, c, o, tc)


def convlstm_step_backward(params, grads, cache, dh, dc_next, k, peephole=True):
    """Backward of :func:`convlstm_step`; returns ``(dx, dh_prev, dc_prev)``.

    ``dc_next`` is the gradient arriving at this step's cell state from later
    steps. Parameter gradients are accumulated into ``grads``.
    """
    zshape, cols, c_prev, i, f, ct, c, o, tc = cache
    ch = c.shape[-1]
    do = dh * tc
    dgo = do * o * (1.0 - o)
    dc = dc_next + dh * o * (1.0 - tc * tc)
    if peephole:
        dc = dc + dgo * params["wco"]
        grads["wco"] += np.sum(dgo * c, axis=(0, 1))
    dgi = dc * ct * i * (1.0 - i)
    dgf = dc * c_prev * f * (1.0 - f)
    dgc = dc * i * (1.0 - ct * ct)
    dc_prev = dc * f
    if peephole:
        dc_prev = dc_prev + dgi * params["wci"] + dgf * params["wcf"]
        grads["wci"] += np.sum(dgi * c_prev, axis=(0, 1))
        grads["wcf"] += np.sum(dgf * c_prev, axis=(0, 1))
    dg = np.concatenate([dgi, dgf, dgc, dgo], axis=-1).reshape(-1, 4 * ch)
    grads["W"] += cols.T @ dg
    grads["b"] += dg.sum(axis=0)
    dz = col2im(dg @ params["W"].T, zshape, k)
    c_in = zshape[-1] - ch
    return dz[..., :c_in], dz[..., c_in:], dc_prev


class ConvLSTM(Layer):
    """Recurrent layer over ``(B, T, L, c_in)`` returning every hidden state ``(B, T, L, c_h)``.

    States start at zero. The forget-gate bias starts at +1.
    """

    def __init__(self, c_in, c_h, k=3, rng=None, dtype=np.float64, peephole=True):
        super().__init__()
        self.c_in, self.c_h, self.k, self.peephole = c_in, c_h, k, peephole
        rng = np.random.default_rng(0) if rng is None else rng
        fan_in = k * (c_in + c_h)
        self.params["W"] = glorot_uniform(rng, fan_in, k * c_h, (fan_in, 4 * c_h), dtype)
        b = np.zeros(4 * c_h, dtype=dtype)
        b[c_h:2 * c_h] = 1.0
        self.params["b"] = b
        if peephole:
            for name in ("wci", "wcf", "wco"):
                self.params[name] = np.zeros(c_h, dtype=dtype)
        self.zero_grad()

    def forward(self, x):
        if x.ndim != 4 or x.shape[3] != self.c_in:
            raise ShapeError(f"convlstm expects (B, T, L, {self.c_in}), got {x.shape}")
        b, t_len, length, _ = x.shape
        h = np.zeros((b, length, self.c_h), dtype=x.dtype)
        c = np.zeros_like(h)
        out = np.empty((b, t_len, length, self.c_h), dtype=x.dtype)
        self._caches = []
        for t in range(t_len):
            h, c, cache = convlstm_step(self.params, x[:, t], h, c, self.k, self.peephole)
            self._caches.append(cache)
            out[:, t] = h
        return out

    def backward(self, dy):
        b, t_len, length, _ = dy.shape
        dx = np.empty((b, t_len, length, self.c_in), dtype=dy.dtype)
        dh_next = np.zeros((b, length, self.c_h), dtype=dy.dtype)
        dc_next = np.zeros_like(dh_next)
        for t in reversed(range(t_len)):
            dx[:, t], dh_next, dc_next = convlstm_step_backward(
                self.params, self.grads, self._caches[t], dy[:, t] + dh_next, dc_next,
                self.k, self.peephole)
        return dx
