"""Training loop with early stopping, input standardisation and texture-level prediction."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import ArgError, ConfigError, TrainingAbort
from ..neural import Adam, grad_dict, load_checkpoint, load_params, param_dict, save_checkpoint
from .config import ModelConfig, TrainConfig
from .networks import build_model

log = logging.getLogger(__name__)


@dataclass
class TextureData:
    """Everything the model sees for one texture.

    ``tactile`` holds instances of shape ``(n, S, 526)``; ``visual`` holds the
    image feature vectors (one per captured or augmented view).
    """

    texture_id: str
    class_label: str
    tactile: np.ndarray
    visual: np.ndarray
    target: np.ndarray


@dataclass
class Standardizer:
    tactile_mean: np.ndarray
    tactile_std: np.ndarray
    visual_mean: np.ndarray
    visual_std: np.ndarray

    @classmethod
    def fit(cls, textures) -> "Standardizer":
        t = np.concatenate([tex.tactile.reshape(-1, tex.tactile.shape[-1]) for tex in textures])
        v = np.concatenate([tex.visual for tex in textures])
        return cls(t.mean(0), _safe_std(t), v.mean(0), _safe_std(v))

    @classmethod
    def identity(cls, tactile_dim, visual_dim) -> "Standardizer":
        return cls(np.zeros(tactile_dim), np.ones(tactile_dim), np.zeros(visual_dim),
                   np.ones(visual_dim))

    def tactile(self, x):
        return (x - self.tactile_mean) / self.tactile_std

    def visual(self, x):
        return (x - self.visual_mean) / self.visual_std

    def tensors(self) -> dict:
        return {f"norm.{k}": getattr(self, k) for k in
                ("tactile_mean", "tactile_std", "visual_mean", "visual_std")}

    @classmethod
    def from_tensors(cls, tensors) -> "Standardizer":
        return cls(*(tensors[f"norm.{k}"] for k in
                     ("tactile_mean", "tactile_std", "visual_mean", "visual_std")))


def _safe_std(x):
    s = x.std(axis=0)
    return np.where(s > 1e-8, s, 1.0)


class EarlyStopping:
    """Stop once the validation loss has not improved for ``patience`` epochs."""

    def __init__(self, patience: int):
        self.patience = patience
        self.best = np.inf
        self.best_epoch = 0
        self.wait = 0

    def update(self, epoch: int, val_loss: float) -> bool:
        """Record an epoch; returns True when training should stop."""
        if val_loss < self.best:
            self.best, self.best_epoch, self.wait = val_loss, epoch, 0
            return False
        self.wait += 1
        return self.wait >= self.patience

    @property
    def improved_last(self):
        return self.wait == 0


@dataclass
class TrainResult:
    model: object
    standardizer: Standardizer
    history: list = field(default_factory=list)  # (epoch, train_loss, val_loss)
    best_epoch: int = 0
    epochs_run: int = 0

    def write_history(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["epoch", "train_loss", "val_loss"])
            for epoch, tr, va in self.history:
                w.writerow([epoch, repr(tr), repr(va)])


def split_instances(textures, val_fraction: float, rng):
    """Per-texture split of instance indices into train and validation lists.

    Each texture contributes ``max(1, round(val_fraction * n))`` validation
    instances and keeps at least one for training.
    """
    train, val = [], []
    for ti, tex in enumerate(textures):
        n = len(tex.tactile)
        if n < 2:
            raise ConfigError(f"texture {tex.texture_id} has {n} instance(s); need 2 to split")
        n_val = min(n - 1, max(1, int(round(val_fraction * n))))
        order = rng.permutation(n)
        val += [(ti, int(i)) for i in sorted(order[:n_val])]
        train += [(ti, int(i)) for i in sorted(order[n_val:])]
    return train, val


def _gather(textures, pairs, views):
    tactile = np.stack([textures[t].tactile[i] for t, i in pairs])
    visual = np.stack([textures[t].visual[v] for (t, _), v in zip(pairs, views)])
    target = np.stack([textures[t].target for t, _ in pairs])
    return tactile, visual, target


def _validation_loss(model, textures, val, batch_size):
    views = [i % len(textures[t].visual) for t, i in val]
    preds, targets = [], []
    for s in range(0, len(val), batch_size):
        tac, vis, tgt = _gather(textures, val[s:s + batch_size], views[s:s + batch_size])
        preds.append(model.predict(tac, vis))
        targets.append(tgt)
    diff = np.concatenate(preds).astype(np.float64) - np.concatenate(targets)
    return float(np.sqrt(np.mean(diff * diff)))


def standardize(textures, standardizer: Standardizer):
    return [TextureData(t.texture_id, t.class_label, standardizer.tactile(t.tactile),
                        standardizer.visual(t.visual), np.asarray(t.target, dtype=np.float64))
            for t in textures]


def train(model, textures, cfg: TrainConfig, standardizer: Standardizer | None = None,
          on_epoch=None) -> TrainResult:
    """Train ``model`` in place with Adam and early stopping.

    Validation instances are drawn per texture; every epoch each training
    sequence is paired with a randomly drawn view of its own texture. The
    parameters of the best validation epoch are restored before returning.
    """
    cfg.validate()
    if not textures:
        raise ArgError("training set is empty")
    rng = np.random.default_rng(cfg.seed)
    if standardizer is None:
        standardizer = Standardizer.fit(textures)
    data = standardize(textures, standardizer)
    train_idx, val_idx = split_instances(data, cfg.val_fraction, rng)
    params = param_dict(model)
    opt = Adam(lr=cfg.learning_rate)
    stopper = EarlyStopping(cfg.patience)
    best = {k: v.copy() for k, v in params.items()}
    result = TrainResult(model, standardizer)

    for epoch in range(1, cfg.max_epochs + 1):
        order = rng.permutation(len(train_idx))
        views = [int(rng.integers(len(data[train_idx[j][0]].visual))) for j in order]
        losses = []
        for s in range(0, len(order), cfg.batch_size):
            pairs = [train_idx[j] for j in order[s:s + cfg.batch_size]]
            tac, vis, tgt = _gather(data, pairs, views[s:s + cfg.batch_size])
            loss = model.loss_and_grad(tac, vis, tgt)
            if not np.isfinite(loss):
                raise TrainingAbort(f"non-finite loss at epoch {epoch}", epoch=epoch)
            try:
                opt.step(params, grad_dict(model))
            except TrainingAbort as exc:
                raise TrainingAbort(f"{exc} at epoch {epoch}", epoch=epoch) from exc
            losses.append((loss, len(pairs)))
        train_loss = sum(l * n for l, n in losses) / sum(n for _, n in losses)
        val_loss = _validation_loss(model, data, val_idx, cfg.batch_size)
        if not np.isfinite(val_loss):
            raise TrainingAbort(f"non-finite validation loss at epoch {epoch}", epoch=epoch)
        result.history.append((epoch, train_loss, val_loss))
        stop = stopper.update(epoch, val_loss)
        if stopper.improved_last:
            best = {k: v.copy() for k, v in params.items()}
        log.debug("epoch %d train %.4f val %.4f", epoch, train_loss, val_loss)
        if on_epoch is not None:
            on_epoch(epoch, train_loss, val_loss)
        if stop:
            break

    load_params(model, best)
    result.best_epoch = stopper.best_epoch
    result.epochs_run = len(result.history)
    return result


def predict_texture(model, instances) -> np.ndarray:
    """Mean prediction over a texture's (sequence, image-vector) pairs."""
    instances = list(instances)
    if not instances:
        raise ArgError("no instances to predict")
    tactile = np.stack([np.asarray(s) for s, _ in instances])
    visual = np.stack([np.asarray(v) for _, v in instances])
    return np.asarray(model.predict(tactile, visual), dtype=np.float64).mean(axis=0)


def predict_instances(model, standardizer: Standardizer, tactile, visual, batch_size=16):
    """Per-instance predictions; instance ``i`` uses view ``i mod n_views``.

    Inputs are raw (unstandardised) features.
    """
    tactile = standardizer.tactile(np.asarray(tactile, dtype=np.float64))
    visual = standardizer.visual(np.asarray(visual, dtype=np.float64))
    views = np.arange(len(tactile)) % len(visual)
    out = [model.predict(tactile[s:s + batch_size], visual[views[s:s + batch_size]])
           for s in range(0, len(tactile), batch_size)]
    return np.concatenate(out).astype(np.float64)


# --- checkpoints -------------------------------------------------------------------

def save_model(path, model, standardizer: Standardizer, seed: int = 0, epoch: int = 0,
               extra: dict | None = None) -> None:
    tensors = {f"param.{k}": v for k, v in param_dict(model).items()}
    tensors.update(standardizer.tensors())
    header = {"config": model.cfg.to_dict(), "seed": seed, "epoch": epoch}
    header.update(extra or {})
    save_checkpoint(path, tensors, header)


def load_model(path):
    """Rebuild a model from a checkpoint; returns ``(model, standardizer, header)``."""
    tensors, header = load_checkpoint(path)
    cfg = ModelConfig.from_dict(header["config"])
    model = build_model(cfg, seed=header.get("seed", 0))
    load_params(model, {k[len("param."):]: v for k, v in tensors.items() if k.startswith("param.")})
    return model, Standardizer.from_tensors(tensors), header
