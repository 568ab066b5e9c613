"""Ratings, manifests and the synthetic dataset generator."""
from .manifest import Manifest, TextureEntry, manifest_load, manifest_save
from .ratings import (AttributeRatings, ParticipantRating, aggregate_ratings, hps_export,
                      hps_rows, pair_antonyms, read_adjective_matrix, read_aggregated,
                      read_participant_ratings, relevance_filter, relevance_scores,
                      scale_to_slider, slider_to_scale, write_aggregated,
                      write_participant_ratings)
from .synth import SyntheticDataset, spectral_centroid, synth_generate, write_dataset

__all__ = [
    "AttributeRatings", "Manifest", "ParticipantRating", "SyntheticDataset", "TextureEntry",
    "aggregate_ratings", "hps_export", "hps_rows", "manifest_load", "manifest_save",
    "pair_antonyms", "read_adjective_matrix", "read_aggregated", "read_participant_ratings",
    "relevance_filter", "relevance_scores", "scale_to_slider", "slider_to_scale",
    "spectral_centroid", "synth_generate", "write_aggregated", "write_dataset",
    "write_participant_ratings",
]
