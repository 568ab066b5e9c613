from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hapticpred.binfmt import write_matrix
from hapticpred.errors import FormatError, GlcmError, ShapeError
from hapticpred.vision_features import (DEEP_DIM, FEATURE_DIM, ImageFeatureVector, augment,
                                        augment_params, average_patches, fallback_deep_features,
                                        feature_names, glcm16, image_feature_vector,
                                        ingest_deep_features, load_image, patch_grid,
                                        patch_statistics, projection_matrix, quantize16,
                                        read_feature_vectors, reassemble, to_grayscale,
                                        write_deep_features, write_feature_vectors)

from _golden_inputs import gradient_image

GOLDEN = Path(__file__).parent / "golden"
levels = arrays(np.int64, st.tuples(st.integers(1, 12), st.integers(2, 12)),
                elements=st.integers(0, 15))


@pytest.fixture(scope="module")
def image():
    return gradient_image()


def test_grayscale_examples():
    assert to_grayscale(np.full((1, 1, 3), 255))[0, 0] == 255
    assert to_grayscale(np.array([[[255, 0, 0]]]))[0, 0] == 76
    g = np.arange(256)
    assert np.array_equal(to_grayscale(np.stack([g, g, g], axis=-1)[None])[0], g)
    with pytest.raises(ShapeError):
        to_grayscale(np.zeros((2, 2, 4)))


def test_quantize_examples():
    assert quantize16(np.array([0, 16, 255])).tolist() == [0, 1, 15]
    g = np.arange(256)
    q = quantize16(g)
    assert np.all(np.diff(q) >= 0)
    assert np.array_equal(quantize16(q * 16), q)


def test_glcm_constant():
    v = glcm16(np.full((5, 5), 5)).reshape(16, 16)
    assert v[5, 5] == 1 and v.sum() == 1


def test_glcm_alternating_row():
    v = glcm16(np.array([[0, 15, 0, 15]])).reshape(16, 16)
    assert v[0, 15] == 0.5 and v[15, 0] == 0.5 and v.sum() == 1


def test_glcm_degenerate():
    with pytest.raises(GlcmError):
        glcm16(np.zeros((4, 1), dtype=int))


def brute_glcm(lv):
    m = np.zeros((16, 16))
    for r in range(lv.shape[0]):
        for c in range(lv.shape[1] - 1):
            m[lv[r, c], lv[r, c + 1]] += 1
            m[lv[r, c + 1], lv[r, c]] += 1
    return (m / m.sum()).reshape(-1)


@given(levels)
def test_glcm_probability_symmetric_and_matches_count(lv):
    v = glcm16(lv)
    assert np.all(v >= 0) and abs(v.sum() - 1) < 1e-9
    m = v.reshape(16, 16)
    assert np.array_equal(m, m.T)
    assert np.allclose(v, brute_glcm(lv), atol=1e-15)
    assert np.array_equal(glcm16(lv), v)


def test_patch_grid_indices(image):
    patches = patch_grid(image)
    assert patches.shape == (49, 224, 224)
    assert np.array_equal(patches[0], image[:224, :224])
    assert np.array_equal(patches[48], image[1344:1568, 1344:1568])
    assert np.array_equal(reassemble(patches), image)


def test_patch_grid_covers_once():
    idx = np.arange(1568 * 1568).reshape(1568, 1568)
    flat = np.sort(patch_grid(idx).reshape(-1))
    assert np.array_equal(flat, np.arange(1568 * 1568))


def test_patch_grid_wrong_size():
    with pytest.raises(ShapeError):
        patch_grid(np.zeros((1500, 1568)))


def test_deep_feature_ingest(tmp_path):
    rng = np.random.default_rng(0)
    m = rng.normal(size=(49, 2048)).astype(np.float32)
    write_deep_features(tmp_path / "d.hvft", m, "T1", "img.png")
    back = ingest_deep_features(tmp_path / "d.hvft")
    assert back.shape == (49, 2048)
    assert back.astype(np.float32).tobytes() == m.tobytes()
    write_matrix(tmp_path / "bad.hvft", b"HVFT", m[:48], {})
    with pytest.raises(FormatError):
        ingest_deep_features(tmp_path / "bad.hvft")


def test_fallback_deterministic(image):
    p = patch_grid(image)[3]
    a, b = fallback_deep_features(p, seed=4), fallback_deep_features(p, seed=4)
    assert a.shape == (DEEP_DIM,) and a.tobytes() == b.tobytes()
    assert not np.array_equal(a, fallback_deep_features(p, seed=5))


def test_fallback_offset_changes_only_mean_column():
    rng = np.random.default_rng(2)
    p = rng.integers(40, 200, size=(224, 224)).astype(float)
    P = projection_matrix(0)
    phi_a, phi_b = patch_statistics(p), patch_statistics(p + 7)
    diff = phi_b - phi_a
    assert diff[0] == pytest.approx(7 / 255)
    assert np.allclose(diff[1:], 0, atol=1e-9)
    za, zb = fallback_deep_features(p, projection=P), fallback_deep_features(p + 7, projection=P)
    assert np.allclose(zb - za, P[:, 0] * (7 / 255), atol=1e-9)


def test_fallback_zero_patch_closed_form():
    P = projection_matrix(0)
    # zero patch: only the histogram bin holding deviation 0 (bin 8) is populated
    assert np.allclose(fallback_deep_features(np.zeros((224, 224)), projection=P), P[:, 2 + 8],
                       atol=1e-15)


def test_average_patches():
    v = np.arange(2048.0)
    assert np.array_equal(average_patches(np.tile(v, (49, 1))), v)
    rows = np.zeros((49, 2048))
    rows[0, 0], rows[1, 1], rows[2, 2] = 49, 98, 147
    assert np.allclose(average_patches(rows)[:3], [1, 2, 3])
    rng = np.random.default_rng(0)
    m = rng.normal(size=(49, 2048))
    assert np.allclose(average_patches(m), average_patches(m[rng.permutation(49)]), atol=1e-14)
    with pytest.raises(ShapeError):
        average_patches(m[:10])


def test_image_vector_layout(image):
    fv = image_feature_vector(image)
    assert fv.vector.shape == (FEATURE_DIM,)
    assert np.array_equal(fv.vector[2048:], glcm16(quantize16(image)))
    assert np.array_equal(fv.vector, image_feature_vector(image).vector)


def test_image_vector_ingested_deep(image):
    deep = np.random.default_rng(1).normal(size=(49, 2048))
    fv = image_feature_vector(image, deep=deep)
    assert np.allclose(fv.deep, deep.mean(axis=0))


def test_constant_image_rotation_invariant():
    img = np.full((1568, 1568), 100)
    v = image_feature_vector(img).vector
    g = v[2048:]
    assert g.max() == 1 and np.count_nonzero(g) == 1
    assert np.array_equal(image_feature_vector(np.rot90(img)).vector, v)


def test_image_vector_dataclass_checks_shape():
    with pytest.raises(ShapeError):
        ImageFeatureVector(np.zeros(10), np.zeros(256))


def test_golden_image_layout(image):
    names = (GOLDEN / "image_layout.txt").read_text().split()
    assert names == feature_names() and len(names) == 2304
    assert names[2048] == "glcm_00_00" and names[2048 + 16] == "glcm_01_00"
    expected = np.array([float(s) for s in (GOLDEN / "image_vector.txt").read_text().split()])
    assert np.allclose(image_feature_vector(image).vector, expected, rtol=1e-9, atol=1e-12)


def test_augment_identity_branch():
    img = np.arange(16.0).reshape(4, 4)
    seed = next(s for s in range(1000) if augment_params(s) == (0, False, False))
    assert np.array_equal(augment(img, seed, noise=False), img)


def test_augment_rotation_180():
    seed = next(s for s in range(1000) if augment_params(s) == (2, False, False))
    out = augment(np.array([[1.0, 2], [3, 4]]), seed, noise=False)
    assert out.tolist() == [[4, 3], [2, 1]]


@given(st.integers(0, 2**32 - 1))
def test_augment_deterministic_and_clamped(seed):
    img = np.random.default_rng(0).integers(0, 256, size=(8, 8)).astype(float)
    a, b = augment(img, seed), augment(img, seed)
    assert a.tobytes() == b.tobytes()
    assert a.min() >= 0 and a.max() <= 255


def test_feature_vector_file_round_trip(tmp_path):
    x = np.random.default_rng(0).normal(size=(3, 2304)).astype(np.float32)
    write_feature_vectors(tmp_path / "v.hvft", x, "T1", "a.png")
    back, meta = read_feature_vectors(tmp_path / "v.hvft")
    assert back.tobytes() == x.tobytes() and meta["texture_id"] == "T1"
    with pytest.raises(ShapeError):
        write_feature_vectors(tmp_path / "w.hvft", np.zeros((1, 2300)))


def test_load_image_centre_crop(tmp_path):
    from PIL import Image

    rgb = np.zeros((1600, 1700, 3), dtype=np.uint8)
    rgb[..., 0] = 255
    Image.fromarray(rgb).save(tmp_path / "red.png")
    img = load_image(tmp_path / "red.png")
    assert img.shape == (1568, 1568) and np.all(img == 76)
