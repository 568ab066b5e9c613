from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hapticpred.data import (AttributeRatings, Manifest, ParticipantRating, TextureEntry,
                             aggregate_ratings, hps_export, manifest_load, manifest_save,
                             pair_antonyms, read_adjective_matrix, read_aggregated,
                             read_participant_ratings, relevance_filter, relevance_scores,
                             scale_to_slider, slider_to_scale, spectral_centroid, synth_generate,
                             write_aggregated, write_dataset, write_participant_ratings)
from hapticpred.data.synth import ACCEL_HZ, acceleration
from hapticpred.errors import AggregateError, ArgError, IngestError, ManifestError
from hapticpred.signal_core import load_recording

GOLDEN = Path(__file__).parent / "golden"
slider = st.floats(0, 100, allow_nan=False)


def pr(p, t, *s):
    return ParticipantRating(p, t, s)


# --- aggregation ---------------------------------------------------------------------

def test_aggregate_examples():
    out = aggregate_ratings([pr("p1", "T", 50, 20, 100, 0), pr("p2", "T", 50, 80, 100, 0)])
    assert out["T"].values.tolist() == [0, 0, 100, -100]


def test_aggregate_missing_texture():
    with pytest.raises(AggregateError):
        aggregate_ratings([pr("p1", "A", 1, 2, 3, 4)], texture_ids=["A", "B"])


def test_slider_validation():
    with pytest.raises(IngestError):
        pr("p", "t", 101, 0, 0, 0)
    with pytest.raises(IngestError):
        AttributeRatings("t", [0, 0, 0, 120])


@given(st.lists(st.tuples(slider, slider, slider, slider), min_size=1, max_size=12))
def test_aggregate_is_linear(sliders):
    ratings = [pr(f"p{i}", "T", *s) for i, s in enumerate(sliders)]
    mapped_then_mean = np.mean([slider_to_scale(s) for s in sliders], axis=0)
    assert np.allclose(aggregate_ratings(ratings)["T"].values, mapped_then_mean, atol=1e-9)


@given(st.floats(-100, 100, allow_nan=False))
def test_scale_inverse(r):
    assert slider_to_scale(scale_to_slider(r)) == pytest.approx(r, abs=1e-12)


# --- relevance -----------------------------------------------------------------------

def test_relevance_examples():
    marks = np.zeros((26, 5, 3), dtype=int)
    marks[:, :, 0] = 1
    marks[:13, :, 1] = 1
    assert relevance_scores(marks).tolist() == [1.0, 0.5, 0.0]
    assert relevance_filter(marks, ["rough", "smooth", "sticky"], 0.5) == ["rough", "smooth"]


def test_relevance_errors():
    with pytest.raises(ArgError):
        relevance_filter(np.zeros((0, 0, 0)), [], 0.5)
    with pytest.raises(ArgError):
        relevance_filter(np.zeros((1, 1, 1)), ["a"], 0)


@given(st.integers(0, 2**32 - 1), st.floats(0.01, 1), st.floats(0.01, 1))
def test_relevance_monotone(seed, t1, t2):
    marks = np.random.default_rng(seed).integers(0, 2, size=(4, 3, 6))
    names = list("abcdef")
    lo, hi = sorted((t1, t2))
    assert set(relevance_filter(marks, names, hi)) <= set(relevance_filter(marks, names, lo))


def test_pair_antonyms():
    table = [("rough", "smooth"), ("hard", "soft")]
    assert pair_antonyms(["rough", "smooth", "hard"], table) == [("rough", "smooth")]


# --- CSV formats and HPS --------------------------------------------------------------

def test_hps_export_golden(tmp_path):
    ratings = {"B02": AttributeRatings("B02", [0, 100, -55.5, -100], "C07"),
               "A01": AttributeRatings("A01", [10, -20, 30, 40], "C03")}
    rows = hps_export(ratings, tmp_path / "hps.csv")
    assert rows[0] == ["A01", 40, -20, 10, 30, "C03"]
    assert (tmp_path / "hps.csv").read_text() == (GOLDEN / "hps_export.csv").read_text()


def test_hps_export_fifty_rows():
    ratings = [AttributeRatings(f"T{i:02d}", [0, 0, 0, 0]) for i in reversed(range(50))]
    rows = hps_export(ratings)
    assert len(rows) == 50 and [r[0] for r in rows] == sorted(r[0] for r in rows)


def test_ratings_csv_round_trips(tmp_path):
    parts = [pr("p1", "T1", 10, 20, 30, 40), pr("p2", "T1", 12.5, 0, 100, 50)]
    write_participant_ratings(tmp_path / "raw.csv", parts)
    assert read_participant_ratings(tmp_path / "raw.csv") == parts
    agg = aggregate_ratings(parts, class_labels={"T1": "C01"})
    write_aggregated(tmp_path / "agg.csv", agg)
    back = read_aggregated(tmp_path / "agg.csv")
    assert back["T1"].class_label == "C01"
    assert np.array_equal(back["T1"].values, agg["T1"].values)
    header = (tmp_path / "agg.csv").read_text().splitlines()[0]
    assert header == "texture_id,class,rs,fb,ss,hs"


def test_adjective_matrix_csv(tmp_path):
    (tmp_path / "adj.csv").write_text(
        "participant_id,texture_id,adjective,mark\np1,T1,rough,1\np1,T1,soft,0\np2,T1,rough,1\n")
    marks, parts, texs, adjs = read_adjective_matrix(tmp_path / "adj.csv")
    assert marks.shape == (2, 1, 2)
    assert relevance_filter(marks, adjs, 0.5) == ["rough"]


# --- manifests -------------------------------------------------------------------------

def test_manifest_round_trip(tmp_path):
    (tmp_path / "r.csv").write_text("x")
    m = Manifest([TextureEntry("T1", "C00", image_features=None)], ratings="r.csv",
                 root=str(tmp_path))
    manifest_save(tmp_path / "m.json", m)
    back = manifest_load(tmp_path / "m.json")
    assert back.to_dict() == m.to_dict()
    manifest_save(tmp_path / "m2.json", back)
    assert (tmp_path / "m.json").read_bytes() == (tmp_path / "m2.json").read_bytes()


def test_manifest_missing_file(tmp_path):
    m = Manifest([TextureEntry("T1", "C00", raw_dir="raw/T1")], root=str(tmp_path))
    manifest_save(tmp_path / "m.json", m)
    with pytest.raises(ManifestError) as exc:
        manifest_load(tmp_path / "m.json")
    assert "raw/T1" in str(exc.value)


def test_fifty_texture_manifest_has_sixteen_classes():
    data = synth_generate(0, 50, duration_s=10)
    entries = [TextureEntry(t.texture_id, t.class_label) for t in data.textures]
    assert len(Manifest(entries).classes) == 16


# --- synthetic generator --------------------------------------------------------------

def test_synth_deterministic(tmp_path):
    a = write_dataset(synth_generate(3, 4, 12), tmp_path / "a")
    b = write_dataset(synth_generate(3, 4, 12), tmp_path / "b")
    files = sorted(p.relative_to(a.parent) for p in a.parent.rglob("*") if p.is_file())
    assert files == sorted(p.relative_to(b.parent) for p in b.parent.rglob("*") if p.is_file())
    for rel in files:
        assert (a.parent / rel).read_bytes() == (b.parent / rel).read_bytes(), rel


def test_synth_centroid_tracks_roughness():
    rng = np.random.default_rng(0)
    lo = acceleration(rng, np.array([-100.0, 0, 0, 0]), 10.0)
    hi = acceleration(rng, np.array([100.0, 0, 0, 0]), 10.0)
    c_lo = spectral_centroid(lo[:, 0], ACCEL_HZ)
    c_hi = spectral_centroid(hi[:, 0], ACCEL_HZ)
    assert c_hi >= 2 * c_lo


def test_synth_passes_ingest(tmp_path):
    path = write_dataset(synth_generate(1, 4, 12), tmp_path)
    m = manifest_load(path)
    rec = load_recording(m.resolve(m.textures[0].raw_dir))
    for ts in (rec.accel_xyz, rec.force_xyz, rec.velocity_xyz):
        assert ts.sample_rate_hz == 1000 and np.all(np.isfinite(ts.samples))


def test_synth_ratings_round_trip(tmp_path):
    data = synth_generate(2, 4, 10)
    path = write_dataset(data, tmp_path)
    raw = read_participant_ratings(path.parent / "ratings_raw.csv")
    agg = aggregate_ratings(raw)
    for t in data.textures:
        assert np.allclose(agg[t.texture_id].values, t.latent, atol=1e-9)
        assert np.allclose(read_aggregated(path.parent / "ratings.csv")[t.texture_id].values,
                           t.latent, atol=1e-9)


def test_synth_guards():
    with pytest.raises(ArgError):
        synth_generate(0, 3)
    with pytest.raises(ArgError):
        synth_generate(0, 4, duration_s=5)
