"""CSV / Markdown outputs for LOOCV runs."""
from __future__ import annotations

import csv
import io
import json

import numpy as np

from ..model.config import ATTRIBUTES


def _fmt(x) -> str:
    return repr(float(x))


def aggregate_csv(agg) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["attr", "mae", "rmse"])
    for a, name in enumerate(ATTRIBUTES):
        w.writerow([name, _fmt(agg.mae[a]), _fmt(agg.rmse[a])])
    return buf.getvalue()


def folds_csv(folds) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["texture_id", "class", "attr", "target", "prediction", "mae", "rmse",
                "epochs", "best_epoch", "failed"])
    for f in folds:
        for a, name in enumerate(ATTRIBUTES):
            w.writerow([f.held_out, f.class_label, name, _fmt(f.target[a]), _fmt(f.prediction[a]),
                        _fmt(f.mae[a]), _fmt(f.rmse[a]), f.epochs, f.best_epoch, int(f.failed)])
    return buf.getvalue()


def heatmap_rows(folds) -> list:
    """``(class, attr, mae)`` rows: class-wise mean of member-fold MAEs.

    Rows are ordered by class label, then by the fixed attribute order
    R-S, F-B, S-S, H-S.
    """
    groups = {}
    for f in folds:
        if not f.failed:
            groups.setdefault(f.class_label, []).append(f.mae)
    rows = []
    for cls in sorted(groups):
        m = np.mean(groups[cls], axis=0)
        rows += [(cls, name, float(m[a])) for a, name in enumerate(ATTRIBUTES)]
    return rows


def heatmap_export(folds, path=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["class", "attr", "mae"])
    for cls, attr, value in heatmap_rows(folds):
        w.writerow([cls, attr, _fmt(value)])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text


def comparison_report(systems: dict):
    """Systems x attributes table with the lowest value of each column flagged.

    ``systems`` maps a name to four per-attribute errors. Ties are all
    flagged. Returns ``(markdown, csv_text, flags)`` where ``flags[name]`` is
    a list of booleans.
    """
    names = list(systems)
    values = np.array([np.asarray(systems[n], dtype=float) for n in names])
    best = values.min(axis=0)
    flags = {n: [bool(values[i, a] == best[a]) for a in range(len(ATTRIBUTES))]
             for i, n in enumerate(names)}
    md = ["| System | " + " | ".join(ATTRIBUTES) + " |",
          "|---|" + "---|" * len(ATTRIBUTES)]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["system", *ATTRIBUTES, *(f"best_{a}" for a in ATTRIBUTES)])
    for i, n in enumerate(names):
        cells = [f"**{v:.2f}**" if flags[n][a] else f"{v:.2f}" for a, v in enumerate(values[i])]
        md.append(f"| {n} | " + " | ".join(cells) + " |")
        w.writerow([n, *(_fmt(v) for v in values[i]), *(int(b) for b in flags[n])])
    return "\n".join(md) + "\n", buf.getvalue(), flags


def run_metadata(agg, extra=None) -> str:
    meta = dict(agg.metadata)
    meta.update(extra or {})
    meta["n_folds"] = agg.n_folds
    meta["n_failed"] = agg.n_failed
    return json.dumps(meta, indent=2, sort_keys=True)
