"""Metrics engine and protocol orchestrator for handwritten-text-generation
evaluation: pixel metrics, feature-distribution distances, topology-based
set comparison, recognition-side error rates, style accuracy, and the
experiment protocol that ties them together."""

from . import (
    data_model,
    distribution_metrics,
    geometry_score,
    pixel_metrics,
    protocol,
    style_metrics,
    text_metrics,
)
from ._kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND",
    "__version__",
    "data_model",
    "distribution_metrics",
    "geometry_score",
    "pixel_metrics",
    "protocol",
    "style_metrics",
    "text_metrics",
]
