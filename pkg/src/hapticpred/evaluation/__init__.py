"""Metrics, leave-one-out evaluation and reporting."""
from .loocv import (AggregateReport, FoldReport, aggregate, fold_seed, loocv, mean_predictor,
                    mean_predictor_baseline, neural_predictor, run_fold, texture_errors)
from .metrics import mae, rescale_to_0_100, rmse
from .reports import (aggregate_csv, comparison_report, folds_csv, heatmap_export, heatmap_rows,
                      run_metadata)

__all__ = [
    "AggregateReport", "FoldReport", "aggregate", "aggregate_csv", "comparison_report",
    "fold_seed", "folds_csv", "heatmap_export", "heatmap_rows", "loocv", "mae",
    "mean_predictor", "mean_predictor_baseline", "neural_predictor", "rescale_to_0_100",
    "rmse", "run_fold", "run_metadata", "texture_errors",
]
