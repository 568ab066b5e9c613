"""Predict haptic attribute ratings of textured surfaces from tactile signals and images.

Subpackages:

- :mod:`hapticpred.signal_core` conditions raw accelerometer, force and
  kinematic recordings.
- :mod:`hapticpred.tactile_features` and :mod:`hapticpred.vision_features`
  build the 526-d segment and 2304-d image vectors.
- :mod:`hapticpred.neural` is a small numpy network engine with manual
  backpropagation.
- :mod:`hapticpred.model` holds the visual autoencoder, the tactile
  ConvLSTM stack, the fusion head and an ANN baseline.
- :mod:`hapticpred.data` covers ratings, manifests and a synthetic dataset.
- :mod:`hapticpred.evaluation` provides metrics, leave-one-out evaluation and
  reports.
"""

__version__ = "0.1.0"
