"""Per-segment tactile features.

Each 500-sample segment of the conditioned signals becomes one 526-entry
vector: a 40 x 13 MFCC matrix of the vibration channel (flattened frame by
frame) followed by (min, max, mean) of speed and of normal force.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.fft import dct
from scipy.integrate import trapezoid

from . import binfmt
from .errors import ArgError, SequenceError, ShapeError
from .signal_core import ProcessedSignals, segment

MAGIC = b"HTFT"
N_FEATURES = 526


@dataclass(frozen=True)
class MfccConfig:
    sample_rate_hz: float = 1000.0
    segment_samples: int = 500
    frame_samples: int = 25
    frame_hop: int = 12
    n_frames: int = 40
    n_fft: int = 32
    n_mels: int = 26
    n_coeffs: int = 13
    fmin_hz: float = 0.0
    fmax_hz: float = 500.0
    log_floor: float = 1e-10

    def digest(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


DEFAULT_MFCC = MfccConfig()


def hann(n: int) -> np.ndarray:
    """Symmetric Hann window with zero endpoints."""
    if n < 2:
        raise ArgError(f"Hann window needs n >= 2, got {n}")
    k = np.arange(n)
    w = 0.5 * (1.0 - np.cos(2.0 * np.pi * k / (n - 1)))
    # make the symmetry exact rather than round-off close
    half = n // 2
    w[n - half:] = w[:half][::-1]
    return w


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=float) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=float) / 2595.0) - 1.0)


def mel_filterbank(cfg: MfccConfig = DEFAULT_MFCC, grid_points: int = 20001) -> np.ndarray:
    """Triangular mel filters mapped onto the FFT bins, shape ``(n_mels, n_fft//2 + 1)``.

    There are more filters than bins, so evaluating triangles only at bin
    centres would leave the narrow low-frequency filters empty. Instead the
    power spectrum is treated as piecewise linear between bins and each
    weight is the overlap integral of a mel triangle with a bin's linear
    interpolation hat, computed by trapezoidal quadrature.
    """
    n_bins = cfg.n_fft // 2 + 1
    bin_hz = cfg.sample_rate_hz / cfg.n_fft
    edges = mel_to_hz(np.linspace(hz_to_mel(cfg.fmin_hz), hz_to_mel(cfg.fmax_hz), cfg.n_mels + 2))
    f = np.linspace(0.0, (n_bins - 1) * bin_hz, grid_points)
    hats = np.clip(1.0 - np.abs(f[None, :] / bin_hz - np.arange(n_bins)[:, None]), 0.0, None)
    lo, mid, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    tri = np.clip(np.minimum((f - lo) / (mid - lo), (hi - f) / (hi - mid)), 0.0, None)
    return trapezoid(tri[:, None, :] * hats[None, :, :], f, axis=-1)


_FILTERBANK_CACHE: dict = {}


def _filterbank(cfg):
    fb = _FILTERBANK_CACHE.get(cfg)
    if fb is None:
        fb = _FILTERBANK_CACHE[cfg] = mel_filterbank(cfg)
    return fb


def frames(segment_samples: np.ndarray, cfg: MfccConfig = DEFAULT_MFCC) -> np.ndarray:
    starts = np.arange(cfg.n_frames) * cfg.frame_hop
    return segment_samples[starts[:, None] + np.arange(cfg.frame_samples)[None, :]]


def mel_energies(seg, cfg: MfccConfig = DEFAULT_MFCC) -> np.ndarray:
    """Pre-log filterbank energies per frame, shape ``(n_frames, n_mels)``."""
    seg = np.asarray(seg, dtype=np.float64)
    if seg.shape != (cfg.segment_samples,):
        raise ShapeError(f"segment must have {cfg.segment_samples} samples, got shape {seg.shape}")
    windowed = frames(seg, cfg) * hann(cfg.frame_samples)
    power = np.abs(np.fft.rfft(windowed, n=cfg.n_fft, axis=1)) ** 2 / cfg.n_fft
    return power @ _filterbank(cfg).T


def mfcc(seg, cfg: MfccConfig = DEFAULT_MFCC) -> np.ndarray:
    """MFCC matrix of one vibration segment, shape ``(40, 13)``."""
    energies = mel_energies(seg, cfg)
    log_e = np.log(np.maximum(energies, cfg.log_floor))
    return dct(log_e, type=2, norm="ortho", axis=1)[:, :cfg.n_coeffs]


def stats3(x) -> tuple:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.size == 0:
        raise ArgError("statistics of an empty segment")
    # exactly rounded sum: the mean does not depend on sample order
    mean = min(max(math.fsum(x) / x.size, float(x.min())), float(x.max()))
    return float(x.min()), float(x.max()), mean


def feature_names(cfg: MfccConfig = DEFAULT_MFCC) -> list:
    """Names of the segment-vector entries in storage order."""
    names = [f"mfcc_f{f:02d}_c{c:02d}" for f in range(cfg.n_frames) for c in range(cfg.n_coeffs)]
    return names + ["speed_min", "speed_max", "speed_mean", "force_min", "force_max", "force_mean"]


def segment_features(a_seg, v_seg, f_seg, cfg: MfccConfig = DEFAULT_MFCC) -> np.ndarray:
    """526-entry vector: flattened MFCC (frame-major), stats(v), stats(f)."""
    a_seg, v_seg, f_seg = (np.asarray(s, dtype=np.float64) for s in (a_seg, v_seg, f_seg))
    if not a_seg.shape == v_seg.shape == f_seg.shape:
        raise ShapeError(f"misaligned segments {a_seg.shape}, {v_seg.shape}, {f_seg.shape}")
    out = np.empty(cfg.n_frames * cfg.n_coeffs + 6)
    out[:-6] = mfcc(a_seg, cfg).reshape(-1)
    out[-6:-3] = stats3(v_seg)
    out[-3:] = stats3(f_seg)
    return out


def recording_features(sig: ProcessedSignals, hop_samples: int = 250,
                       cfg: MfccConfig = DEFAULT_MFCC) -> np.ndarray:
    """Feature matrix ``(segments, 526)`` for a processed recording."""
    w = cfg.segment_samples
    a = segment(sig.a, w, hop_samples)
    v = segment(sig.v, w, hop_samples)
    f = segment(sig.f, w, hop_samples)
    if not len(a) == len(v) == len(f):
        raise ShapeError("channels of unequal length")
    return np.stack([segment_features(a[i], v[i], f[i], cfg) for i in range(len(a))])


@dataclass
class SegmentSequence:
    texture_id: str
    start: int
    steps: np.ndarray  # (S, 526)


def sequence_starts(k: int, s: int, stride: int) -> np.ndarray:
    if s < 1 or stride < 1:
        raise SequenceError("sequence length and stride must be >= 1")
    if k < s:
        raise SequenceError(f"{k} segments cannot form a sequence of {s}")
    return np.arange((k - s) // stride + 1) * stride


def build_sequences(segments, s: int = 8, stride: int = 4, texture_id: str = "") -> list:
    segments = np.asarray(segments)
    return [SegmentSequence(texture_id, int(i), segments[i:i + s])
            for i in sequence_starts(len(segments), s, stride)]


def stack_sequences(segments, s: int = 8, stride: int = 4) -> np.ndarray:
    """Array form of :func:`build_sequences`: ``(count, s, dim)``."""
    segments = np.asarray(segments)
    starts = sequence_starts(len(segments), s, stride)
    return segments[starts[:, None] + np.arange(s)[None, :]]


def write_features(path, features, texture_id: str, s: int = 8, stride: int = 4,
                   cfg: MfccConfig = DEFAULT_MFCC) -> None:
    features = np.asarray(features)
    if features.ndim != 2 or features.shape[1] != N_FEATURES:
        raise ShapeError(f"tactile feature matrix must be (n, {N_FEATURES}), got {features.shape}")
    binfmt.write_matrix(path, MAGIC, features, {
        "texture_id": texture_id, "S": s, "stride": stride, "mfcc_config_hash": cfg.digest()})


def read_features(path):
    return binfmt.read_matrix(path, MAGIC, cols=N_FEATURES)
