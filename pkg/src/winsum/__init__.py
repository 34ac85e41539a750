"""Sliding-window maximum subarray sum sketches."""

from .core import (
    ConfigurationError,
    EmptyWindowError,
    IntervalSummary,
    Params,
    kadane_max_subarray,
    summary_append,
    summary_singleton,
)
from .eh import EhBucket, ExponentialHistogram
from .nonempty import MinTracker, NonemptySketch, bucket_thresholds
from .oracle import WindowBuffer
from .smooth_histogram import (
    InvariantViolation,
    Refined,
    SmoothHistogram,
    Standard,
    expire,
    prune,
    q_bound,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigurationError",
    "EmptyWindowError",
    "EhBucket",
    "ExponentialHistogram",
    "IntervalSummary",
    "InvariantViolation",
    "MinTracker",
    "NonemptySketch",
    "Params",
    "Refined",
    "SmoothHistogram",
    "Standard",
    "WindowBuffer",
    "bucket_thresholds",
    "expire",
    "kadane_max_subarray",
    "prune",
    "q_bound",
    "summary_append",
    "summary_singleton",
]
