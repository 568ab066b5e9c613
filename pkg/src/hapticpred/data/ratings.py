"""Perceptual ratings: slider aggregation, adjective relevance and the HPS bubble-plot table."""
from __future__ import annotations

import csv
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from ..errors import AggregateError, ArgError, IngestError

ATTRIBUTE_KEYS = ("rs", "fb", "ss", "hs")


@dataclass
class ParticipantRating:
    participant_id: str
    texture_id: str
    sliders: tuple  # (rs, fb, ss, hs), each in [0, 100]

    def __post_init__(self):
        self.sliders = tuple(float(s) for s in self.sliders)
        if len(self.sliders) != 4 or any(not 0.0 <= s <= 100.0 for s in self.sliders):
            raise IngestError(f"slider values must be four numbers in [0, 100], got {self.sliders}")


@dataclass
class AttributeRatings:
    texture_id: str
    values: np.ndarray  # (R-S, F-B, S-S, H-S) on -100..100
    class_label: str = ""

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != (4,) or np.any(np.abs(self.values) > 100.0):
            raise IngestError(f"ratings must be four values in [-100, 100], got {self.values}")


def slider_to_scale(m):
    """Map a 0..100 slider mean onto -100..100 (50 -> 0)."""
    return 2.0 * np.asarray(m, dtype=np.float64) - 100.0


def scale_to_slider(r):
    return (np.asarray(r, dtype=np.float64) + 100.0) / 2.0


def aggregate_ratings(ratings, texture_ids=None, class_labels=None) -> dict:
    """Average sliders per texture and map onto -100..100.

    ``texture_ids`` lists textures that must be present; one without any
    rating raises :class:`AggregateError`.
    """
    by_texture = defaultdict(list)
    for r in ratings:
        by_texture[r.texture_id].append(r.sliders)
    wanted = sorted(by_texture) if texture_ids is None else list(texture_ids)
    labels = class_labels or {}
    out = {}
    for tid in wanted:
        if not by_texture.get(tid):
            raise AggregateError(f"texture {tid} has no ratings")
        mean = np.mean(np.asarray(by_texture[tid]), axis=0)
        out[tid] = AttributeRatings(tid, slider_to_scale(mean), labels.get(tid, ""))
    return out


def relevance_scores(marks) -> np.ndarray:
    """Fraction of (participant, texture) cells marking each adjective.

    ``marks`` has shape ``(participants, textures, adjectives)`` with 0/1 entries.
    """
    marks = np.asarray(marks)
    if marks.ndim != 3 or marks.size == 0:
        raise ArgError(f"adjective matrix must be a nonempty 3-D array, got shape {marks.shape}")
    if not np.all((marks == 0) | (marks == 1)):
        raise ArgError("adjective marks must be 0 or 1")
    return marks.sum(axis=(0, 1)) / (marks.shape[0] * marks.shape[1])


def relevance_filter(marks, adjectives, threshold: float = 0.5) -> list:
    """Adjectives whose relevance score is at least ``threshold``."""
    if not 0 < threshold <= 1:
        raise ArgError(f"threshold must lie in (0, 1], got {threshold}")
    scores = relevance_scores(marks)
    if len(adjectives) != len(scores):
        raise ArgError("one name per adjective column is required")
    return [a for a, s in zip(adjectives, scores) if s >= threshold]


def pair_antonyms(retained, pairing_table) -> list:
    """Keep user-supplied antonym pairs whose two members were both retained."""
    keep = set(retained)
    return [(a, b) for a, b in pairing_table if a in keep and b in keep]


# --- CSV formats -----------------------------------------------------------------

def _reader(path, header):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [c.strip() for c in rows[0]] != header:
        raise IngestError(f"{path}: expected header {','.join(header)}")
    return rows[1:]


def read_participant_ratings(path) -> list:
    rows = _reader(path, ["participant_id", "texture_id", *ATTRIBUTE_KEYS])
    return [ParticipantRating(r[0], r[1], tuple(float(x) for x in r[2:6])) for r in rows]


def write_participant_ratings(path, ratings) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["participant_id", "texture_id", *ATTRIBUTE_KEYS])
        for r in ratings:
            w.writerow([r.participant_id, r.texture_id, *(repr(s) for s in r.sliders)])


def write_aggregated(path, ratings: dict) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["texture_id", "class", *ATTRIBUTE_KEYS])
        for tid in sorted(ratings):
            r = ratings[tid]
            w.writerow([tid, r.class_label, *(repr(float(v)) for v in r.values)])


def read_aggregated(path) -> dict:
    rows = _reader(path, ["texture_id", "class", *ATTRIBUTE_KEYS])
    return {r[0]: AttributeRatings(r[0], [float(x) for x in r[2:6]], r[1]) for r in rows}


def read_adjective_matrix(path):
    """Long-format marks -> ``(marks, participants, textures, adjectives)``; absent cells are 0."""
    rows = _reader(path, ["participant_id", "texture_id", "adjective", "mark"])
    parts = sorted({r[0] for r in rows})
    texs = sorted({r[1] for r in rows})
    adjs = sorted({r[2] for r in rows})
    marks = np.zeros((len(parts), len(texs), len(adjs)), dtype=np.int64)
    pi = {p: i for i, p in enumerate(parts)}
    ti = {t: i for i, t in enumerate(texs)}
    ai = {a: i for i, a in enumerate(adjs)}
    for p, t, a, m in rows:
        marks[pi[p], ti[t], ai[a]] = int(m)
    return marks, parts, texs, adjs


HPS_COLUMNS = ["texture_id", "x_hs", "y_fb", "size_rs", "color_ss", "class"]


def hps_rows(ratings) -> list:
    """Bubble-plot rows: x = hard-soft, y = flat-bumpy, size = rough-smooth, colour = sticky-slippery."""
    items = ratings.values() if isinstance(ratings, dict) else ratings
    rows = []
    for r in sorted(items, key=lambda r: r.texture_id):
        rs, fb, ss, hs = (float(v) for v in r.values)
        rows.append([r.texture_id, hs, fb, rs, ss, r.class_label])
    return rows


def hps_export(ratings, path=None) -> list:
    rows = hps_rows(ratings)
    if path is not None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(HPS_COLUMNS)
            for row in rows:
                w.writerow([row[0], *(f"{v:.6g}" for v in row[1:5]), row[5]])
    return rows
