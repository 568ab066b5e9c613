"""Attribute prediction networks and their training."""
import numpy as np

from .config import (ATTRIBUTES, AnnConfig, FeatureConfig, FusionConfig, HtNetConfig,
                     HvNetConfig, ModelConfig, TrainConfig, reduced_config)
from .networks import AnnBaseline, FusionHead, HtNet, HvNet, VisuoTactileNet, build_model
from .training import (EarlyStopping, Standardizer, TextureData, TrainResult, load_model,
                       predict_instances, predict_texture, save_model, split_instances, train)


def hvnet_forward(net: HvNet, x):
    """Single 2304-vector -> (128-d feature, 2304-d reconstruction)."""
    feat, recon = net.forward(np.asarray(x, dtype=float)[None, :], need_recon=True)
    return feat[0], recon[0]


def htnet_forward(net: HtNet, seq):
    """Single ``(S, 526)`` sequence -> 128-d tactile feature."""
    return net.forward(np.asarray(seq, dtype=float)[None])[0]


def fuse_predict(head: FusionHead, visual, tactile):
    return head.forward(np.asarray(visual, dtype=float)[None], np.asarray(tactile, dtype=float)[None])[0]


def ann_baseline(model: AnnBaseline, tactile_vec, visual_vec):
    return model.predict(np.asarray(tactile_vec)[None], np.asarray(visual_vec)[None])[0]


__all__ = [
    "ATTRIBUTES", "AnnBaseline", "AnnConfig", "EarlyStopping", "FeatureConfig", "FusionConfig",
    "FusionHead", "HtNet", "HtNetConfig", "HvNet", "HvNetConfig", "ModelConfig", "Standardizer",
    "TextureData", "TrainConfig", "TrainResult", "VisuoTactileNet", "ann_baseline",
    "build_model", "fuse_predict", "htnet_forward", "hvnet_forward", "load_model",
    "predict_instances", "predict_texture", "reduced_config", "save_model", "split_instances",
    "train",
]
