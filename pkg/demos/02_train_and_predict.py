"""Train the reduced visuo-tactile model on synthetic textures and predict one of them.

A few epochs on a handful of textures is enough to see the pipeline end to
end; predictions are reported on the -100..100 attribute scale.
"""
import numpy as np

from hapticpred.data import synth_generate
from hapticpred.data.assemble import from_synthetic
from hapticpred.model import (ATTRIBUTES, build_model, predict_instances, reduced_config,
                              train)

cfg = reduced_config(max_epochs=5, patience=3, dtype="float32")
cfg.features.max_sequences_per_texture = 4

data = synth_generate(seed=2, n_textures=6, duration_s=30.0)
textures = from_synthetic(data, cfg)
held_out, training = textures[0], textures[1:]

model = build_model(cfg, seed=cfg.train.seed)
result = train(model, training, cfg.train)
for epoch, train_loss, val_loss in result.history:
    print(f"epoch {epoch}: train {train_loss:.3f}  validation {val_loss:.3f}")
print("kept parameters from epoch", result.best_epoch)

pred = predict_instances(model, result.standardizer, held_out.tactile, held_out.visual).mean(0)
for name, p, t in zip(ATTRIBUTES, pred, held_out.target):
    print(f"{name}: predicted {p:7.2f}  rated {t:7.2f}")
print("mean absolute error:", float(np.mean(np.abs(pred - held_out.target))))
