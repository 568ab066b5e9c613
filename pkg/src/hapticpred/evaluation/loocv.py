"""Leave-one-texture-out cross-validation."""
from __future__ import annotations

import copy
import hashlib
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from ..errors import ConfigError, TrainingAbort
from ..model.config import ATTRIBUTES, ModelConfig
from ..model.networks import build_model
from ..model.training import predict_instances, train
from .metrics import mae, rescale_to_0_100, rmse

log = logging.getLogger(__name__)


@dataclass
class FoldReport:
    held_out: str
    class_label: str
    target: np.ndarray
    prediction: np.ndarray
    mae: np.ndarray  # per attribute, 0..100 scale
    rmse: np.ndarray
    instance_predictions: np.ndarray = None
    instance_mae: np.ndarray = None
    instance_rmse: np.ndarray = None
    epochs: int = 0
    best_epoch: int = 0
    failed: bool = False
    error: str = ""


@dataclass
class AggregateReport:
    mae: np.ndarray
    rmse: np.ndarray
    class_mae: dict  # class -> per-attribute MAE
    n_folds: int
    n_failed: int
    metadata: dict = field(default_factory=dict)


def fold_seed(seed: int, texture_id: str) -> int:
    """Run seed XOR a stable 63-bit hash of the texture id."""
    h = int.from_bytes(hashlib.sha256(texture_id.encode()).digest()[:8], "little")
    return (seed ^ h) & ((1 << 63) - 1)


def texture_errors(target, prediction, clamp=False):
    """Per-attribute MAE and RMSE of one texture-level prediction (0..100 scale)."""
    pred = np.clip(prediction, -100, 100) if clamp else prediction
    y, y_hat = rescale_to_0_100(target), rescale_to_0_100(pred)
    m = np.array([mae(y[a], y_hat[a]) for a in range(len(y))])
    r = np.array([rmse(y[a], y_hat[a]) for a in range(len(y))])
    return m, r


def neural_predictor(train_set, test, cfg: ModelConfig, seed: int):
    """Default fold predictor: train the configured network, predict the held-out texture."""
    cfg = copy.deepcopy(cfg)
    cfg.train.seed = seed
    model = build_model(cfg, seed=seed)
    result = train(model, train_set, cfg.train)
    preds = predict_instances(model, result.standardizer, test.tactile, test.visual,
                              cfg.train.batch_size)
    return preds, result.epochs_run, result.best_epoch


def mean_predictor(train_set, test, cfg, seed):
    """Constant predictor: the mean training target, for every instance."""
    mean = np.mean([t.target for t in train_set], axis=0)
    return np.tile(mean, (len(test.tactile), 1)), 0, 0


def run_fold(textures, k, cfg: ModelConfig, seed: int, predictor=neural_predictor) -> FoldReport:
    test = textures[k]
    train_set = [t for i, t in enumerate(textures) if i != k]
    s = fold_seed(seed, test.texture_id)
    target = np.asarray(test.target, dtype=np.float64)
    try:
        with threadpool_limits(limits=1):
            preds, epochs, best = predictor(train_set, test, cfg, s)
    except TrainingAbort as exc:
        log.error("fold %s aborted: %s", test.texture_id, exc)
        nan = np.full(len(target), np.nan)
        return FoldReport(test.texture_id, test.class_label, target, nan, nan, nan,
                          failed=True, error=str(exc), epochs=exc.epoch or 0)
    preds = np.asarray(preds, dtype=np.float64)
    texture_pred = preds.mean(axis=0)
    m, r = texture_errors(target, texture_pred, cfg.features.clamp_predictions)
    y = rescale_to_0_100(target)
    yi = rescale_to_0_100(preds)
    inst_mae = np.array([mae(np.full(len(yi), y[a]), yi[:, a]) for a in range(len(y))])
    inst_rmse = np.array([rmse(np.full(len(yi), y[a]), yi[:, a]) for a in range(len(y))])
    return FoldReport(test.texture_id, test.class_label, target, texture_pred, m, r, preds,
                      inst_mae, inst_rmse, epochs, best)


def _run_fold_job(args):
    return run_fold(*args)


def aggregate(folds, metadata=None) -> AggregateReport:
    """Per-attribute arithmetic means of fold MAE and fold RMSE over non-failed folds.

    The pooled root-mean-square error across held-out textures goes into the
    metadata under ``pooled_rmse``.
    """
    ok = [f for f in folds if not f.failed]
    n_attr = len(ATTRIBUTES)
    if ok:
        mae_mean = np.mean([f.mae for f in ok], axis=0)
        rmse_all = np.mean([f.rmse for f in ok], axis=0)
        pooled = np.sqrt(np.mean([f.rmse ** 2 for f in ok], axis=0))
    else:
        mae_mean = rmse_all = pooled = np.full(n_attr, np.nan)
    by_class = {}
    for f in ok:
        by_class.setdefault(f.class_label, []).append(f.mae)
    class_mae = {c: np.mean(v, axis=0) for c, v in sorted(by_class.items())}
    meta = dict(metadata or {})
    meta["pooled_rmse"] = {a: float(pooled[i]) for i, a in enumerate(ATTRIBUTES)}
    return AggregateReport(mae_mean, rmse_all, class_mae, len(folds), len(folds) - len(ok), meta)


def loocv(textures, cfg: ModelConfig, seed: int = 0, jobs: int = 1, predictor=neural_predictor):
    """One fold per texture; returns ``(folds, aggregate)`` with folds in input order.

    Fold seeds depend only on ``seed`` and the held-out texture id, and each
    fold runs with single-threaded BLAS, so ``jobs`` never changes results.
    """
    cfg.validate()
    if len(textures) < 3:
        raise ConfigError(f"LOOCV needs at least 3 textures, got {len(textures)}")
    ids = [t.texture_id for t in textures]
    if len(set(ids)) != len(ids):
        raise ConfigError("texture ids must be unique")
    started = time.time()
    args = [(textures, k, cfg, seed, predictor) for k in range(len(textures))]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            folds = list(pool.map(_run_fold_job, args))
    else:
        folds = [_run_fold_job(a) for a in args]
    meta = {"seed": seed, "config_hash": cfg.digest(), "n_textures": len(textures),
            "started": started, "finished": time.time(), "jobs": jobs,
            "checkpoint_policy": "best-validation"}
    return folds, aggregate(folds, meta)


def mean_predictor_baseline(textures, cfg: ModelConfig | None = None, seed: int = 0):
    """Aggregate report of the constant-mean predictor under the same folds."""
    cfg = cfg or ModelConfig()
    return loocv(textures, cfg, seed, jobs=1, predictor=mean_predictor)
