"""Turn recordings, feature files and ratings into per-texture training data."""
from __future__ import annotations

import numpy as np

from ..errors import ManifestError
from ..model.config import ModelConfig
from ..model.training import TextureData
from ..signal_core import ProcessedSignals, load_recording, preprocess
from ..tactile_features import read_features, recording_features, stack_sequences
from ..vision_features import read_feature_vectors
from .ratings import read_aggregated


def instance_length(cfg: ModelConfig) -> int:
    return 1 if cfg.kind == "ann" else cfg.ht.seq_len


def make_instances(segment_features, cfg: ModelConfig) -> np.ndarray:
    """Group segment vectors into sequences, optionally thinned to an evenly spaced subset."""
    seqs = stack_sequences(segment_features, instance_length(cfg), cfg.features.seq_stride)
    cap = cfg.features.max_sequences_per_texture
    if cap is not None and len(seqs) > cap:
        keep = np.unique(np.round(np.linspace(0, len(seqs) - 1, cap)).astype(int))
        seqs = seqs[keep]
    return seqs


def from_synthetic(data, cfg: ModelConfig) -> list:
    out = []
    for tex in data.textures:
        feats = recording_features(preprocess(tex.recording), cfg.features.segment_hop)
        out.append(TextureData(tex.texture_id, tex.class_label, make_instances(feats, cfg),
                               np.asarray(tex.image_vectors, dtype=np.float64),
                               np.asarray(tex.latent, dtype=np.float64)))
    return out


def segment_matrix(manifest, entry, hop: int) -> np.ndarray:
    if entry.tactile_features:
        feats, _ = read_features(manifest.resolve(entry.tactile_features))
        return feats.astype(np.float64)
    if entry.processed:
        sig = ProcessedSignals.from_csv(manifest.resolve(entry.processed), entry.texture_id)
    elif entry.raw_dir:
        sig = preprocess(load_recording(manifest.resolve(entry.raw_dir)))
    else:
        raise ManifestError(f"texture {entry.texture_id} has no tactile source", path=None)
    return recording_features(sig, hop)


def from_manifest(manifest, cfg: ModelConfig) -> list:
    if manifest.ratings is None:
        raise ManifestError("manifest lists no ratings file", path=None)
    ratings = read_aggregated(manifest.resolve(manifest.ratings))
    out = []
    for entry in manifest.textures:
        if entry.texture_id not in ratings:
            raise ManifestError(f"no rating for texture {entry.texture_id}",
                                path=manifest.ratings)
        if not entry.image_features:
            raise ManifestError(f"texture {entry.texture_id} has no image features", path=None)
        visual, _ = read_feature_vectors(manifest.resolve(entry.image_features))
        feats = segment_matrix(manifest, entry, cfg.features.segment_hop)
        out.append(TextureData(entry.texture_id, entry.class_label, make_instances(feats, cfg),
                               visual.astype(np.float64), ratings[entry.texture_id].values))
    return out
