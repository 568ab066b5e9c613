"""From a raw synthetic recording to the per-segment feature matrix.

Generates one synthetic texture, conditions its three sensor streams, and
shows how the 526-entry segment vector is laid out.
"""
import numpy as np

from hapticpred.data import synth_generate
from hapticpred.signal_core import TimeSeries, dft321, preprocess
from hapticpred.tactile_features import feature_names, mfcc, recording_features

data = synth_generate(seed=1, n_textures=4, duration_s=20.0)
texture = data.textures[0]
print(f"texture {texture.texture_id} ({texture.class_label})")
print("raw accelerometer samples:", texture.recording.accel_xyz.samples.shape)

signals = preprocess(texture.recording)
print("after resampling and cropping:", signals.a.samples.shape, "at", signals.a.sample_rate_hz, "Hz")

# The three accelerometer axes collapse into one energy-preserving signal.
axes = texture.recording.accel_xyz.samples[:4096]
single = dft321(TimeSeries(axes, texture.recording.accel_xyz.sample_rate_hz)).samples
print(f"energy before {np.sum(axes ** 2):.3f}, after {np.sum(single ** 2):.3f}")

features = recording_features(signals)
print("segments x features:", features.shape)
names = feature_names()
print("first names:", names[:3], "last names:", names[-6:])
print("MFCC matrix of the first segment:", mfcc(signals.a.samples[:500]).shape)
