"""Synthetic visuo-tactile dataset with known ground truth.

Each texture gets latent attributes ``u = (R-S, F-B, S-S, H-S)`` in
[-100, 100] and the signals are generated from them with a fixed mapping
(``w(x) = (x + 100) / 200`` rescales an attribute to [0, 1]):

* vibration: band-limited noise whose spectral centre rises from 50 Hz to
  250 Hz with ``w(u_RS)``, plus a 32 Hz bump component whose amplitude
  rises with ``w(u_FB)``; gravity rides on the z axis;
* scanning speed: 0.12 m/s with a 2.7 Hz oscillation whose amplitude rises
  with ``w(u_SS)``;
* normal force: mean 0.4 N + 2.0 N * ``w(u_HS)`` with a small 1.1 Hz wobble;
* image vectors: softplus of a fixed random linear map of ``u / 100`` (2048
  "deep" entries) plus a co-occurrence matrix whose diagonal spread follows
  ``u_RS`` and whose centre follows ``u_FB``; each view adds seeded noise;
* ratings equal ``u``.

The linear maps come from a constant seed, so every dataset shares the same
attribute-to-feature relationship; ``seed`` only drives the per-texture
draws and noise.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ArgError
from ..signal_core import Recording, TimeSeries, write_raw_recording
from ..vision_features import DEEP_DIM, LEVELS, write_feature_vectors
from .manifest import Manifest, TextureEntry, manifest_save
from .ratings import (AttributeRatings, ParticipantRating, scale_to_slider, write_aggregated,
                      write_participant_ratings)

MAPPING_SEED = 7_041_993
N_CLASSES = 16
CLASS_LABELS = tuple(f"C{i:02d}" for i in range(N_CLASSES))
ACCEL_HZ = 3000.0
FORCE_HZ = 8000.0
KINEMATICS_HZ = 1000.0
GRAVITY = 9.81


def _w(u):
    return (np.asarray(u, dtype=float) + 100.0) / 200.0


def vibration_centre_hz(u_rs):
    return 50.0 * 5.0 ** _w(u_rs)


@dataclass
class SyntheticTexture:
    texture_id: str
    class_label: str
    latent: np.ndarray
    recording: Recording
    image_vectors: np.ndarray


@dataclass
class SyntheticDataset:
    seed: int
    textures: list = field(default_factory=list)

    @property
    def ratings(self) -> dict:
        return {t.texture_id: AttributeRatings(t.texture_id, t.latent, t.class_label)
                for t in self.textures}

    def participant_ratings(self) -> list:
        return [ParticipantRating("P01", t.texture_id, tuple(scale_to_slider(t.latent)))
                for t in self.textures]


def _stratified_latents(rng, n):
    # one draw per stratum and attribute keeps the textures spread over the cube
    cols = [(rng.permutation(n) + rng.uniform(0.1, 0.9, n)) / n for _ in range(4)]
    return np.round(-100.0 + 200.0 * np.column_stack(cols), 6)


def band_noise(rng, n, fs, centre_hz, rel_width=0.35):
    """Unit-RMS noise with a Gaussian-shaped spectrum around ``centre_hz``."""
    spectrum = np.fft.rfft(rng.standard_normal(n))
    f = np.fft.rfftfreq(n, 1.0 / fs)
    spectrum *= np.exp(-0.5 * ((f - centre_hz) / (rel_width * centre_hz)) ** 2)
    x = np.fft.irfft(spectrum, n=n)
    return x / np.sqrt(np.mean(x * x))


def acceleration(rng, u, duration_s, fs=ACCEL_HZ):
    n = int(round(duration_s * fs))
    t = np.arange(n) / fs
    fc = vibration_centre_hz(u[0])
    bumps = (0.1 + 1.5 * _w(u[1])) * np.sin(2 * np.pi * 32.0 * t + rng.uniform(0, 2 * np.pi)) \
        * (0.6 + 0.4 * np.sin(2 * np.pi * 0.5 * t))
    ax = 0.8 * band_noise(rng, n, fs, fc)
    ay = 0.5 * band_noise(rng, n, fs, fc)
    az = 0.4 * band_noise(rng, n, fs, fc) + bumps + GRAVITY
    return np.column_stack([ax, ay, az])


def spectral_centroid(x, fs):
    """Power-weighted mean frequency of the mean-removed signal."""
    x = np.asarray(x, dtype=float)
    p = np.abs(np.fft.rfft(x - x.mean())) ** 2
    f = np.fft.rfftfreq(len(x), 1.0 / fs)
    return float(np.sum(f * p) / np.sum(p))


def _direction(t, phase):
    theta = 2 * np.pi * 0.2 * t + phase
    return np.cos(theta), np.sin(theta)


def velocity(rng, u, duration_s, phase, fs=KINEMATICS_HZ):
    n = int(round(duration_s * fs))
    t = np.arange(n) / fs
    amp = 0.005 + 0.06 * _w(u[2])
    speed = 0.12 + amp * np.sin(2 * np.pi * 2.7 * t + rng.uniform(0, 2 * np.pi))
    cx, cy = _direction(t, phase)
    vz = 0.002 * np.sin(2 * np.pi * 0.9 * t)
    return np.column_stack([speed * cx, speed * cy, vz])


def force(rng, u, duration_s, phase, fs=FORCE_HZ):
    n = int(round(duration_s * fs))
    t = np.arange(n) / fs
    fn = 0.4 + 2.0 * _w(u[3]) + 0.15 * np.sin(2 * np.pi * 1.1 * t + rng.uniform(0, 2 * np.pi)) \
        + 0.02 * rng.standard_normal(n)
    cx, cy = _direction(t, phase)
    return np.column_stack([0.3 * fn * cx, 0.3 * fn * cy, fn])


def _glcm_pattern(u, jitter):
    i, j = np.meshgrid(np.arange(LEVELS), np.arange(LEVELS), indexing="ij")
    width = 0.8 + 3.0 * _w(u[0]) + jitter[0]
    centre = 7.5 + 3.5 * u[1] / 100.0 + jitter[1]
    m = np.exp(-0.5 * ((i - j) / width) ** 2) * np.exp(-0.5 * (((i + j) / 2 - centre) / 3.0) ** 2)
    m = m + m.T
    return (m / m.sum()).ravel()


def image_vectors(rng, u, n_views):
    mapping = np.random.default_rng(MAPPING_SEED)
    a = mapping.standard_normal((DEEP_DIM, 4))
    c = 0.5 * mapping.standard_normal(DEEP_DIM)
    z = u / 100.0
    out = []
    for _ in range(n_views):
        pre = a @ z + c + 0.05 * rng.standard_normal(DEEP_DIM)
        deep = np.logaddexp(0.0, pre)
        glcm = _glcm_pattern(u, 0.05 * rng.standard_normal(2))
        out.append(np.concatenate([deep, glcm]))
    return np.stack(out)


def synth_generate(seed: int, n_textures: int, duration_s: float = 60.0,
                   n_views: int = 10) -> SyntheticDataset:
    """Generate ``n_textures`` textures with raw recordings, image vectors and ratings."""
    if n_textures < 4:
        raise ArgError("need at least 4 synthetic textures")
    if duration_s < 10:
        raise ArgError("synthetic recordings must last at least 10 s")
    rng = np.random.default_rng(seed)
    latents = _stratified_latents(rng, n_textures)
    data = SyntheticDataset(seed)
    for k in range(n_textures):
        trng = np.random.default_rng([seed, k])
        u = latents[k]
        phase = trng.uniform(0, 2 * np.pi)
        rec = Recording(
            texture_id=f"T{k + 1:02d}",
            accel_xyz=TimeSeries(acceleration(trng, u, duration_s), ACCEL_HZ),
            force_xyz=TimeSeries(force(trng, u, duration_s, phase), FORCE_HZ),
            velocity_xyz=TimeSeries(velocity(trng, u, duration_s, phase), KINEMATICS_HZ),
            class_label=CLASS_LABELS[k % N_CLASSES],
        )
        data.textures.append(SyntheticTexture(rec.texture_id, rec.class_label, u, rec,
                                              image_vectors(trng, u, n_views)))
    return data


def write_dataset(data: SyntheticDataset, out_dir) -> Path:
    """Write raw recordings, image vectors, ratings and a manifest; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    entries = []
    for tex in data.textures:
        raw = Path("raw") / tex.texture_id
        write_raw_recording(out / raw, tex.recording)
        img = Path("image_features") / f"{tex.texture_id}.hvft"
        (out / img.parent).mkdir(exist_ok=True)
        write_feature_vectors(out / img, tex.image_vectors, tex.texture_id, image="synthetic")
        entries.append(TextureEntry(tex.texture_id, tex.class_label, raw_dir=str(raw),
                                    image_features=str(img)))
    write_participant_ratings(out / "ratings_raw.csv", data.participant_ratings())
    write_aggregated(out / "ratings.csv", data.ratings)
    manifest = Manifest(entries, ratings="ratings.csv", root=str(out))
    path = out / "manifest.json"
    manifest_save(path, manifest)
    return path
