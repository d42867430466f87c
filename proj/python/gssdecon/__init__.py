"""Skew-symmetric density deconvolution (C++ core)."""

from ._core import (
    DeconvFit,
    ErrorModel,
    GssModel,
    GssdeconError,
    gmm_solve,
    gss_sample,
    harmonize_pairs,
    np_fit,
    plugin_bandwidth,
    replicate_average,
    run_pipeline,
    simulate,
    truth_model,
)

__all__ = [
    "DeconvFit",
    "ErrorModel",
    "GssModel",
    "GssdeconError",
    "gmm_solve",
    "gss_sample",
    "harmonize_pairs",
    "np_fit",
    "plugin_bandwidth",
    "replicate_average",
    "run_pipeline",
    "simulate",
    "truth_model",
]
