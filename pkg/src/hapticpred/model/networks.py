"""The visual stream (HV-Net), tactile stream (HT-Net), fusion head and ANN baseline."""
from __future__ import annotations

import numpy as np

from ..errors import ShapeError
from ..neural import (Conv1D, ConvLSTM, Dense, Flatten, GlobalAveragePool, LastStep, MaxPool,
                      ReLU, Sequential, Upsample, count_params, mse_loss, rmse_loss, zero_grads)
from .config import AnnConfig, FusionConfig, HtNetConfig, HvNetConfig, ModelConfig


class HvNet:
    """1-D convolutional autoencoder over the image feature vector plus a dense head.

    The encoder alternates conv + ReLU + pool(2); the decoder mirrors it with
    upsample(2) + conv + ReLU and ends in a single-filter linear conv that
    reconstructs the input. The 128-d feature is taken from the flattened
    bottleneck or from the globally averaged decoder output (``tap_point``).
    """

    def __init__(self, cfg: HvNetConfig, rng, dtype=np.float64):
        cfg.validate()
        self.cfg = cfg
        enc, c = [], 1
        for f, k in zip(cfg.encoder_filters, cfg.encoder_kernels):
            enc += [Conv1D(c, f, k, rng, dtype), ReLU(), MaxPool()]
            c = f
        self.encoder = Sequential(enc)
        self.bottleneck_shape = (cfg.input_dim // 2 ** len(cfg.encoder_filters), c)
        dec = []
        for f, k in zip(cfg.decoder_filters, cfg.decoder_kernels):
            dec += [Upsample(2), Conv1D(c, f, k, rng, dtype), ReLU()]
            c = f
        self.decoder = Sequential(dec)
        self.recon = Conv1D(c, 1, cfg.recon_kernel, rng, dtype)
        if cfg.tap_point == "bottleneck":
            tap, d = Flatten(), self.bottleneck_shape[0] * self.bottleneck_shape[1]
        else:
            tap, d = GlobalAveragePool(), c
        head = [tap]
        for units in cfg.head_units:
            head += [Dense(d, units, rng, dtype), ReLU()]
            d = units
        self.head = Sequential(head)

    def named_layers(self):
        return [("encoder", self.encoder), ("decoder", self.decoder), ("recon", self.recon),
                ("head", self.head)]

    def forward(self, x, need_recon=True):
        """``(B, input_dim)`` -> ``(feature (B, 128), reconstruction (B, input_dim) or None)``."""
        if x.ndim != 2 or x.shape[1] != self.cfg.input_dim:
            raise ShapeError(f"HV-Net expects (B, {self.cfg.input_dim}), got {x.shape}")
        z = self.encoder.forward(x[:, :, None])
        self._ran_decoder = need_recon or self.cfg.tap_point == "decoder_output"
        recon = None
        if self._ran_decoder:
            d = self.decoder.forward(z)
            recon = self.recon.forward(d)[:, :, 0]
        feat = self.head.forward(z if self.cfg.tap_point == "bottleneck" else d)
        return feat, recon

    def backward(self, d_feat, d_recon=None):
        d_tap = self.head.backward(d_feat)
        if self.cfg.tap_point == "bottleneck":
            dz = d_tap
            if d_recon is not None:
                dd = self.recon.backward(d_recon[:, :, None])
                dz = dz + self.decoder.backward(dd)
        else:
            dd = d_tap
            if d_recon is not None:
                dd = dd + self.recon.backward(d_recon[:, :, None])
            dz = self.decoder.backward(dd)
        return self.encoder.backward(dz)[:, :, 0]

    def encoder_trace(self, x):
        """Sequence lengths after each pooling stage of the encoder."""
        h = x[:, :, None]
        lengths = []
        for layer in self.encoder.layers:
            h = layer.forward(h)
            if isinstance(layer, MaxPool):
                lengths.append(h.shape[1])
        return lengths


class HtNet:
    """Stacked 1-D ConvLSTMs over ``(B, S, 526)`` with temporal max pooling.

    The final layer's last hidden state is averaged along the feature axis
    to give one value per filter.
    """

    def __init__(self, cfg: HtNetConfig, rng, dtype=np.float64):
        cfg.validate()
        self.cfg = cfg
        layers, c = [], 1
        for idx, f in enumerate(cfg.filters, start=1):
            layers.append(ConvLSTM(c, f, cfg.kernel, rng, dtype, peephole=cfg.peephole))
            if idx in cfg.pool_after:
                layers.append(MaxPool())
            c = f
        layers += [LastStep(), GlobalAveragePool()]
        self.stack = Sequential(layers)

    def named_layers(self):
        return [("stack", self.stack)]

    def forward(self, seq):
        if seq.ndim != 3 or seq.shape[1] != self.cfg.seq_len or seq.shape[2] != self.cfg.input_dim:
            raise ShapeError(f"HT-Net expects (B, {self.cfg.seq_len}, {self.cfg.input_dim}), "
                             f"got {seq.shape}")
        return self.stack.forward(seq[..., None])

    def backward(self, d_out):
        return self.stack.backward(d_out)[..., 0]

    def time_trace(self, seq):
        """Time-axis length entering each ConvLSTM layer, then the final length."""
        h = seq[..., None]
        trace = []
        for layer in self.stack.layers:
            if isinstance(layer, ConvLSTM):
                trace.append(h.shape[1])
            if isinstance(layer, LastStep):
                trace.append(h.shape[1])
                break
            h = layer.forward(h)
        return trace


def _dense_stack(d_in, units, rng, dtype, final_linear=None):
    layers = []
    for u in units:
        layers += [Dense(d_in, u, rng, dtype), ReLU()]
        d_in = u
    if final_linear:
        layers.append(Dense(d_in, final_linear, rng, dtype))
        d_in = final_linear
    return Sequential(layers), d_in


class FusionHead:
    """concat -> dense 128 -> dense 128 -> maxpool(2) -> dense 32 -> dense 4 (linear)."""

    def __init__(self, cfg: FusionConfig, visual_dim, tactile_dim, rng, dtype=np.float64):
        self.cfg = cfg
        self.visual_dim, self.tactile_dim = visual_dim, tactile_dim
        pre, d = _dense_stack(visual_dim + tactile_dim, cfg.hidden_units, rng, dtype)
        d = -(-d // cfg.pool)
        post, _ = _dense_stack(d, cfg.post_pool_units, rng, dtype, final_linear=cfg.n_outputs)
        self.net = Sequential(pre.layers + [MaxPool()] + post.layers)

    def named_layers(self):
        return [("net", self.net)]

    def forward(self, visual, tactile):
        if visual.shape[-1] != self.visual_dim or tactile.shape[-1] != self.tactile_dim:
            raise ShapeError(f"fusion expects ({self.visual_dim}, {self.tactile_dim}) inputs, "
                             f"got {visual.shape}, {tactile.shape}")
        return self.net.forward(np.concatenate([visual, tactile], axis=-1)) * self.cfg.output_scale

    def backward(self, d_pred):
        d = self.net.backward(d_pred * self.cfg.output_scale)
        return d[:, :self.visual_dim], d[:, self.visual_dim:]


class VisuoTactileNet:
    """Dual-stream regressor: HV-Net and HT-Net features fused into 4 attribute scores."""

    def __init__(self, cfg: ModelConfig, seed=0):
        cfg.validate()
        self.cfg = cfg
        self.dtype = np.dtype(cfg.train.dtype)
        rng = np.random.default_rng(seed)
        self.hv = HvNet(cfg.hv, rng, self.dtype)
        self.ht = HtNet(cfg.ht, rng, self.dtype)
        self.fusion = FusionHead(cfg.fusion, cfg.hv.feature_dim, cfg.ht.feature_dim, rng,
                                 self.dtype)

    @property
    def seq_len(self):
        return self.cfg.ht.seq_len

    def named_layers(self):
        return [("hv", self.hv), ("ht", self.ht), ("fusion", self.fusion)]

    def predict(self, tactile, visual):
        tactile = np.asarray(tactile, dtype=self.dtype)
        visual = np.asarray(visual, dtype=self.dtype)
        vf, _ = self.hv.forward(visual, need_recon=False)
        return self.fusion.forward(vf, self.ht.forward(tactile))

    def loss_and_grad(self, tactile, visual, target):
        """Total loss ``RMSE(pred, target) + lambda * MSE(recon, visual)``; fills gradients."""
        tactile = np.asarray(tactile, dtype=self.dtype)
        visual = np.asarray(visual, dtype=self.dtype)
        target = np.asarray(target, dtype=self.dtype)
        lam = self.cfg.hv.recon_weight
        zero_grads(self)
        vf, recon = self.hv.forward(visual, need_recon=lam > 0)
        tf = self.ht.forward(tactile)
        pred = self.fusion.forward(vf, tf)
        loss, d_pred = rmse_loss(pred, target)
        d_recon = None
        if lam > 0:
            rec_loss, d_recon = mse_loss(recon, visual)
            loss += lam * rec_loss
            d_recon = lam * d_recon
        d_vf, d_tf = self.fusion.backward(d_pred)
        self.hv.backward(d_vf, d_recon)
        self.ht.backward(d_tf)
        return loss

    def n_params(self):
        return count_params(self)


class AnnBaseline:
    """Two dense branches (128, 256, 256, 128), concatenation, two 64-unit layers, 4 outputs."""

    seq_len = 1

    def __init__(self, cfg: ModelConfig, seed=0):
        self.cfg = cfg
        a: AnnConfig = cfg.ann
        self.dtype = np.dtype(cfg.train.dtype)
        rng = np.random.default_rng(seed)
        self.tactile_branch, dt = _dense_stack(a.tactile_dim, a.branch_units, rng, self.dtype)
        self.visual_branch, dv = _dense_stack(a.visual_dim, a.branch_units, rng, self.dtype)
        self.regressor, _ = _dense_stack(dt + dv, a.regression_units, rng, self.dtype,
                                         final_linear=a.n_outputs)
        self._split = dt

    def named_layers(self):
        return [("tactile", self.tactile_branch), ("visual", self.visual_branch),
                ("regressor", self.regressor)]

    def _tactile_vec(self, tactile):
        tactile = np.asarray(tactile, dtype=self.dtype)
        # sequence-shaped instances (B, 1, 526) are accepted for pipeline uniformity
        if tactile.ndim == 3:
            tactile = tactile[:, -1]
        if tactile.shape[-1] != self.cfg.ann.tactile_dim:
            raise ShapeError(f"ANN expects tactile dim {self.cfg.ann.tactile_dim}, got {tactile.shape}")
        return tactile

    def _forward(self, tactile, visual):
        visual = np.asarray(visual, dtype=self.dtype)
        if visual.shape[-1] != self.cfg.ann.visual_dim:
            raise ShapeError(f"ANN expects visual dim {self.cfg.ann.visual_dim}, got {visual.shape}")
        t = self.tactile_branch.forward(self._tactile_vec(tactile))
        v = self.visual_branch.forward(visual)
        return self.regressor.forward(np.concatenate([t, v], axis=-1)) * self.cfg.ann.output_scale

    def predict(self, tactile, visual):
        return self._forward(tactile, visual)

    def loss_and_grad(self, tactile, visual, target):
        zero_grads(self)
        pred = self._forward(tactile, visual)
        loss, d_pred = rmse_loss(pred, np.asarray(target, dtype=self.dtype))
        d = self.regressor.backward(d_pred * self.cfg.ann.output_scale)
        self.tactile_branch.backward(d[:, :self._split])
        self.visual_branch.backward(d[:, self._split:])
        return loss

    def n_params(self):
        return count_params(self)


def build_model(cfg: ModelConfig, seed=0):
    cfg.validate()
    if cfg.kind == "ann":
        return AnnBaseline(cfg, seed)
    return VisuoTactileNet(cfg, seed)
