"""Deterministic inputs shared by the golden-file tests."""
import numpy as np


def tactile_triple():
    t = np.arange(500) / 1000.0
    a = np.sin(2 * np.pi * 100 * t) + 0.5 * np.sin(2 * np.pi * 310 * t + 0.3)
    v = 0.1 + 0.02 * np.cos(2 * np.pi * 3 * t)
    f = 1.0 + 0.25 * t
    return a, v, f


def gradient_image(size=1568):
    """Smooth 8-bit test image with structure along both axes."""
    r = np.arange(size)[:, None]
    c = np.arange(size)[None, :]
    return ((r * 3 + c * 5 + 40 * np.sin(c / 17.0)) % 256).astype(np.int64)
