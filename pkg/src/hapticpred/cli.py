"""Command-line entry point: ``hapticpred <subcommand> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .errors import HapticError
from .evaluation import (aggregate_csv, comparison_report, folds_csv, heatmap_export, loocv,
                         mean_predictor, run_metadata)
from .model.config import ATTRIBUTES, ModelConfig

log = logging.getLogger("hapticpred")


def _config(args) -> ModelConfig:
    cfg = ModelConfig.load(args.config) if args.config else ModelConfig()
    if args.seed is not None:
        cfg.train.seed = args.seed
    return cfg.validate()


def _run_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_run_json(out: Path, command: str, args, **extra) -> None:
    meta = {"command": command, "version": __version__, "seed": args.seed,
            "config": args.config, "written": time.time()}
    meta.update(extra)
    (out / "run.json").write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")


def _load_textures(args, cfg):
    from .data.assemble import from_manifest
    from .data.manifest import manifest_load

    return from_manifest(manifest_load(args.manifest), cfg)


# --- subcommands ------------------------------------------------------------------

def cmd_preprocess(args) -> int:
    from .signal_core import load_recording, preprocess

    sig = preprocess(load_recording(args.raw_dir))
    out = _run_dir(args.out_dir)
    sig.to_csv(out / "processed.csv")
    _write_run_json(out, "preprocess", args, texture_id=sig.texture_id,
                    samples=int(sig.a.samples.shape[0]))
    return 0


def cmd_features(args) -> int:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.kind == "tactile":
        from .signal_core import ProcessedSignals, load_recording, preprocess
        from .tactile_features import recording_features, write_features

        src = Path(args.input)
        if src.is_dir():
            sig = preprocess(load_recording(src))
        else:
            sig = ProcessedSignals.from_csv(src, args.texture_id or src.stem)
        feats = recording_features(sig, args.hop)
        write_features(out, feats, args.texture_id or sig.texture_id)
        log.info("wrote %d tactile segments to %s", len(feats), out)
    else:
        from .vision_features import (augment, image_feature_vector, ingest_deep_features,
                                      load_image, write_feature_vectors)

        img = load_image(args.input)
        deep = ingest_deep_features(args.deep) if args.deep else None
        seed = args.seed or 0
        views = [image_feature_vector(img, deep, seed=seed).vector]
        for v in range(1, args.views):
            views.append(image_feature_vector(np.rint(augment(img, seed + v)), seed=seed).vector)
        write_feature_vectors(out, np.stack(views), args.texture_id, image=str(args.input))
        log.info("wrote %d image vectors to %s", len(views), out)
    return 0


def cmd_synth(args) -> int:
    from .data.synth import synth_generate, write_dataset

    seed = args.seed or 0
    data = synth_generate(seed, args.textures, args.duration)
    out = _run_dir(args.out)
    path = write_dataset(data, out)
    _write_run_json(out, "synth", args, textures=args.textures, duration_s=args.duration)
    print(path)
    return 0


def cmd_train(args) -> int:
    from .model.networks import build_model
    from .model.training import save_model, train

    cfg = _config(args)
    textures = _load_textures(args, cfg)
    out = _run_dir(args.out)
    model = build_model(cfg, seed=cfg.train.seed)
    result = train(model, textures, cfg.train)
    save_model(out / "model.hapt", model, result.standardizer, seed=cfg.train.seed,
               epoch=result.best_epoch, extra={"checkpoint_policy": "best-validation"})
    result.write_history(out / "history.csv")
    cfg.save(out / "config.json")
    _write_run_json(out, "train", args, config_hash=cfg.digest(), epochs=result.epochs_run,
                    best_epoch=result.best_epoch, textures=[t.texture_id for t in textures])
    return 0


def cmd_loocv(args) -> int:
    cfg = _config(args)
    textures = _load_textures(args, cfg)
    seed = cfg.train.seed
    folds, agg = loocv(textures, cfg, seed=seed, jobs=args.jobs)
    _, base = loocv(textures, cfg, seed=seed, jobs=1, predictor=mean_predictor)
    out = _run_dir(args.out)
    (out / "aggregate.csv").write_text(aggregate_csv(agg))
    (out / "folds.csv").write_text(folds_csv(folds))
    (out / "baseline_aggregate.csv").write_text(aggregate_csv(base))
    heatmap_export(folds, out / "heatmap.csv")
    md, csv_text, _ = comparison_report({cfg.kind: agg.mae, "mean-predictor": base.mae})
    (out / "comparison.md").write_text(md)
    (out / "comparison.csv").write_text(csv_text)
    cfg.save(out / "config.json")
    (out / "run.json").write_text(run_metadata(agg, {
        "command": "loocv", "version": __version__, "manifest": str(args.manifest)}) + "\n")
    for a, name in enumerate(ATTRIBUTES):
        print(f"{name}: MAE {agg.mae[a]:.3f} (mean predictor {base.mae[a]:.3f})")
    if agg.n_failed:
        log.error("%d fold(s) failed", agg.n_failed)
        return 4
    return 0


def cmd_predict(args) -> int:
    from .data.assemble import from_manifest
    from .data.manifest import manifest_load
    from .model.training import load_model, predict_instances

    model, std, _ = load_model(args.checkpoint)
    manifest = manifest_load(args.manifest)
    if args.texture not in manifest.texture_ids:
        raise HapticError(f"texture {args.texture!r} not in manifest")
    sub = manifest.__class__([e for e in manifest.textures if e.texture_id == args.texture],
                             manifest.ratings, manifest.root, manifest.version)
    tex = from_manifest(sub, model.cfg)[0]
    pred = predict_instances(model, std, tex.tactile, tex.visual).mean(axis=0)
    print(json.dumps({"texture_id": args.texture,
                      **{n: float(pred[a]) for a, n in enumerate(ATTRIBUTES)}}))
    return 0


def cmd_report(args) -> int:
    import csv

    systems = {}
    for run in args.runs:
        with open(Path(run) / "aggregate.csv", newline="") as fh:
            rows = {r["attr"]: float(r[args.metric]) for r in csv.DictReader(fh)}
        systems[Path(run).name] = [rows[a] for a in ATTRIBUTES]
    md, csv_text, _ = comparison_report(systems)
    if args.out:
        out = _run_dir(args.out)
        (out / "comparison.md").write_text(md)
        (out / "comparison.csv").write_text(csv_text)
        _write_run_json(out, "report", args, runs=[str(r) for r in args.runs])
    sys.stdout.write(md)
    return 0


# --- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    common.add_argument("--config", default=argparse.SUPPRESS, help="model config JSON")
    common.add_argument("--log-level", default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(prog="hapticpred", parents=[common],
                                description="Visuo-tactile haptic attribute prediction.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("preprocess", parents=[common], help="condition one raw recording")
    s.add_argument("raw_dir")
    s.add_argument("out_dir")
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("features", parents=[common], help="extract tactile or image features")
    s.add_argument("kind", choices=["tactile", "vision"])
    s.add_argument("input")
    s.add_argument("out")
    s.add_argument("--texture-id", default="")
    s.add_argument("--hop", type=int, default=250, help="segment hop in samples (tactile)")
    s.add_argument("--views", type=int, default=1, help="augmented views to emit (vision)")
    s.add_argument("--deep", help="49x2048 deep feature matrix (vision)")
    s.set_defaults(func=cmd_features)

    s = sub.add_parser("synth", parents=[common], help="generate a synthetic dataset")
    s.add_argument("--textures", type=int, default=12)
    s.add_argument("--duration", type=float, default=60.0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_synth)

    for name, func in (("train", cmd_train), ("loocv", cmd_loocv)):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--manifest", required=True)
        s.add_argument("--out", required=True)
        if name == "loocv":
            s.add_argument("--jobs", type=int, default=1)
        s.set_defaults(func=func)

    s = sub.add_parser("predict", parents=[common], help="predict one texture from a checkpoint")
    s.add_argument("--checkpoint", required=True)
    s.add_argument("--texture", required=True, help="texture id")
    s.add_argument("--manifest", required=True)
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("report", parents=[common], help="compare run directories")
    s.add_argument("--runs", nargs="+", required=True)
    s.add_argument("--metric", choices=["mae", "rmse"], default="mae")
    s.add_argument("--out")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for key, default in (("seed", None), ("config", None), ("log_level", "WARNING")):
        if not hasattr(args, key):
            setattr(args, key, default)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except HapticError as exc:
        log.error("%s", exc)
        return exc.exit_code
    except (OSError, json.JSONDecodeError) as exc:
        log.error("%s", exc)
        return 3


if __name__ == "__main__":
    sys.exit(main())
