"""Supervised dimensionality reduction with jointly learned neighbor weights.

The extension module does the work; this package re-exports its surface.
"""

from ._slnp import (
    Dataset,
    Model,
    Report,
    TrainConfig,
    fit_lda,
    fit_lfda,
    fit_lpp,
    fit_pca,
    fit_slnp,
    fit_slnp_trace,
    knn_classify,
    load_csv,
    recognition_rate,
    run_experiment,
    subsample_per_class,
    synth_two_feature_toy,
)

__all__ = [
    "Dataset",
    "Model",
    "Report",
    "TrainConfig",
    "fit_lda",
    "fit_lfda",
    "fit_lpp",
    "fit_pca",
    "fit_slnp",
    "fit_slnp_trace",
    "knn_classify",
    "load_csv",
    "recognition_rate",
    "run_experiment",
    "subsample_per_class",
    "synth_two_feature_toy",
]

__version__ = "0.1.0"
