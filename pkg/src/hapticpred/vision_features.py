"""Image features: averaged deep patch features plus a gray-level co-occurrence matrix.

The final vector is ``[deep (2048) | glcm (256)]``. Deep features come from an
external pretrained extractor, ingested as 49 x 2048 matrices; a seeded
random-projection stand-in is available so everything runs offline.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import binfmt
from .errors import GlcmError, ShapeError

MAGIC = b"HVFT"
IMAGE_SIZE = 1568
PATCH = 224
GRID = IMAGE_SIZE // PATCH  # 7
N_PATCHES = GRID * GRID
DEEP_DIM = 2048
LEVELS = 16
GLCM_DIM = LEVELS * LEVELS
FEATURE_DIM = DEEP_DIM + GLCM_DIM
PHI_DIM = 64
NOISE_SIGMA = 5.0

_LUMA = np.array([0.299, 0.587, 0.114])


@dataclass
class ImageFeatureVector:
    deep: np.ndarray
    glcm: np.ndarray
    texture_id: str = ""

    def __post_init__(self):
        if self.deep.shape != (DEEP_DIM,) or self.glcm.shape != (GLCM_DIM,):
            raise ShapeError(f"expected ({DEEP_DIM},) + ({GLCM_DIM},), got "
                             f"{self.deep.shape} + {self.glcm.shape}")

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.deep, self.glcm])


def to_grayscale(rgb) -> np.ndarray:
    """BT.601 luma, rounded half-up to integers in [0, 255]."""
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.ndim != 3 or rgb.shape[-1] != 3:
        raise ShapeError(f"expected an H x W x 3 image, got shape {rgb.shape}")
    g = rgb @ _LUMA
    # weights sum to 1 up to round-off; the slack keeps (g, g, g) -> g exact
    return np.clip(np.floor(g + 0.5 + 1e-9), 0, 255).astype(np.int64)


def quantize16(img) -> np.ndarray:
    return np.clip(np.floor(np.asarray(img, dtype=np.float64) / 16.0), 0, 15).astype(np.int64)


def glcm16(levels, offset=(0, 1)) -> np.ndarray:
    """Symmetric, normalized co-occurrence matrix flattened row-major (256 entries)."""
    levels = np.asarray(levels)
    if levels.ndim != 2:
        raise GlcmError(f"expected a 2-D level image, got shape {levels.shape}")
    dr, dc = offset
    h, w = levels.shape
    if w < 2 or h <= abs(dr) or w <= abs(dc):
        raise GlcmError(f"image {h}x{w} too small for offset {offset}")
    if levels.min() < 0 or levels.max() >= LEVELS:
        raise GlcmError("levels must lie in 0..15")
    r0, r1 = max(0, -dr), h - max(0, dr)
    c0, c1 = max(0, -dc), w - max(0, dc)
    a = levels[r0:r1, c0:c1]
    b = levels[r0 + dr:r1 + dr, c0 + dc:c1 + dc]
    counts = np.bincount((a * LEVELS + b).ravel(), minlength=GLCM_DIM).reshape(LEVELS, LEVELS)
    sym = (counts + counts.T).astype(np.float64)
    return (sym / sym.sum()).ravel()


def _check_canonical(img):
    img = np.asarray(img)
    if img.shape != (IMAGE_SIZE, IMAGE_SIZE):
        raise ShapeError(f"expected a {IMAGE_SIZE}x{IMAGE_SIZE} grayscale image, got {img.shape}")
    return img


def patch_grid(img) -> np.ndarray:
    """7 x 7 grid of 224 x 224 patches in row-major order, shape ``(49, 224, 224)``."""
    img = _check_canonical(img)
    return (img.reshape(GRID, PATCH, GRID, PATCH)
               .transpose(0, 2, 1, 3)
               .reshape(N_PATCHES, PATCH, PATCH)
               .copy())


def reassemble(patches) -> np.ndarray:
    patches = np.asarray(patches)
    if patches.shape != (N_PATCHES, PATCH, PATCH):
        raise ShapeError(f"expected ({N_PATCHES}, {PATCH}, {PATCH}) patches, got {patches.shape}")
    return patches.reshape(GRID, GRID, PATCH, PATCH).transpose(0, 2, 1, 3).reshape(
        IMAGE_SIZE, IMAGE_SIZE)


# --- deep features ----------------------------------------------------------

def write_deep_features(path, matrix, texture_id: str = "", image: str = "") -> None:
    matrix = np.asarray(matrix)
    if matrix.shape != (N_PATCHES, DEEP_DIM):
        raise ShapeError(f"deep features must be ({N_PATCHES}, {DEEP_DIM}), got {matrix.shape}")
    binfmt.write_matrix(path, MAGIC, matrix, {"texture_id": texture_id, "image": image})


def ingest_deep_features(path) -> np.ndarray:
    """Per-patch feature rows (49 x 2048) from a precomputed HVFT file."""
    matrix, _ = binfmt.read_matrix(path, MAGIC, rows=N_PATCHES, cols=DEEP_DIM)
    return matrix


def projection_matrix(seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.standard_normal((DEEP_DIM, PHI_DIM)) / np.sqrt(PHI_DIM)


def _autocorr(centered, var, dr, dc):
    h, w = centered.shape
    a = centered[:h - dr, :w - dc]
    b = centered[dr:, dc:]
    return float(np.mean(a * b) / var) if var > 0 else 0.0


def patch_statistics(patch) -> np.ndarray:
    """64 offset-invariant-except-for-the-mean descriptors of a patch.

    Layout: mean, variance, 16-bin histogram of deviations from the mean,
    row and column gradient energies, autocorrelation at lags 1..15 along
    rows, 1..15 along columns and 1..14 along the diagonal.
    """
    p = np.asarray(patch, dtype=np.float64)
    if p.shape != (PATCH, PATCH):
        raise ShapeError(f"patch must be {PATCH}x{PATCH}, got {p.shape}")
    mean = p.mean()
    c = p - mean
    var = float(np.mean(c * c))
    hist, _ = np.histogram(np.clip(c, -128, 127.999), bins=16, range=(-128, 128))
    phi = [mean / 255.0, var / 255.0 ** 2]
    phi.extend(hist / c.size)
    phi.append(float(np.mean(np.diff(p, axis=0) ** 2)) / 255.0 ** 2)
    phi.append(float(np.mean(np.diff(p, axis=1) ** 2)) / 255.0 ** 2)
    phi.extend(_autocorr(c, var, 0, lag) for lag in range(1, 16))
    phi.extend(_autocorr(c, var, lag, 0) for lag in range(1, 16))
    phi.extend(_autocorr(c, var, lag, lag) for lag in range(1, 15))
    return np.asarray(phi)


def fallback_deep_features(patch, seed: int = 0, projection=None) -> np.ndarray:
    """Deterministic stand-in for a pretrained extractor: ``P @ phi(patch)``."""
    P = projection_matrix(seed) if projection is None else projection
    return P @ patch_statistics(patch)


def average_patches(vectors) -> np.ndarray:
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[0] != N_PATCHES:
        raise ShapeError(f"expected {N_PATCHES} patch rows, got shape {vectors.shape}")
    return vectors.mean(axis=0)


def feature_names() -> list:
    """Names of the image-vector entries in storage order."""
    return ([f"deep_{i:04d}" for i in range(DEEP_DIM)]
            + [f"glcm_{i:02d}_{j:02d}" for i in range(LEVELS) for j in range(LEVELS)])


def image_feature_vector(img, deep=None, seed: int = 0, texture_id: str = "") -> ImageFeatureVector:
    """Image vector ``[averaged deep features | GLCM]``.

    ``deep`` is a 49 x 2048 matrix (e.g. from :func:`ingest_deep_features`);
    when omitted the fallback extractor runs on the 49 patches.
    """
    img = np.asarray(img)
    if img.ndim == 3:
        img = to_grayscale(img)
    img = _check_canonical(img)
    if deep is None:
        P = projection_matrix(seed)
        deep = np.stack([fallback_deep_features(p, projection=P) for p in patch_grid(img)])
    return ImageFeatureVector(average_patches(deep), glcm16(quantize16(img)), texture_id)


# --- augmentation -------------------------------------------------------------

def augment_params(seed: int) -> tuple:
    """(quarter turns, horizontal flip, vertical flip) drawn for ``seed``."""
    rng = np.random.default_rng(seed)
    return int(rng.integers(4)), bool(rng.random() < 0.5), bool(rng.random() < 0.5)


def augment(img, seed: int, noise: bool = True, sigma: float = NOISE_SIGMA) -> np.ndarray:
    """Right-angle rotation, random flips and clamped Gaussian noise, fully seeded."""
    rng = np.random.default_rng(seed)
    k = int(rng.integers(4))
    hflip = rng.random() < 0.5
    vflip = rng.random() < 0.5
    out = np.rot90(np.asarray(img, dtype=np.float64), k)
    if hflip:
        out = out[:, ::-1]
    if vflip:
        out = out[::-1, :]
    if noise:
        out = np.clip(out + rng.normal(0.0, sigma, size=out.shape), 0.0, 255.0)
    return np.ascontiguousarray(out)


# --- image files ----------------------------------------------------------------

def load_image(path, size: int = IMAGE_SIZE) -> np.ndarray:
    """8-bit PNG/PGM -> grayscale, centre-cropped to a square and resized to ``size``."""
    from PIL import Image

    with Image.open(Path(path)) as im:
        im = im.convert("RGB")
        w, h = im.size
        side = min(w, h)
        left, top = (w - side) // 2, (h - side) // 2
        im = im.crop((left, top, left + side, top + side))
        if side != size:
            im = im.resize((size, size), Image.BICUBIC)
        return to_grayscale(np.asarray(im))


def write_feature_vectors(path, vectors, texture_id: str = "", image: str = "") -> None:
    vectors = np.atleast_2d(np.asarray(vectors))
    if vectors.shape[1] != FEATURE_DIM:
        raise ShapeError(f"image vectors must have {FEATURE_DIM} entries, got {vectors.shape[1]}")
    binfmt.write_matrix(path, MAGIC, vectors, {"texture_id": texture_id, "image": image})


def read_feature_vectors(path):
    return binfmt.read_matrix(path, MAGIC, cols=FEATURE_DIM)
