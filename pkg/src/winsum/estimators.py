"""scikit-learn style wrappers around the sliding-window sketches.

Each estimator treats a single column of integers as a stream.  ``fit``
consumes the stream and leaves the sketch positioned at its end;
``partial_fit`` keeps consuming; ``transform`` replays a stream through a
fresh sketch and returns the estimate after every element as one column,
so the windowed statistic can be used as a feature inside a Pipeline.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .core import ConfigurationError, Params
from .eh import ExponentialHistogram
from .harness import make_sketch
from .oracle import sliding_window_mss, sliding_window_mss_nonempty
from .validation import check_bits, check_stream, check_value_bound, infer_value_bound


class _StreamTransformer(TransformerMixin, BaseEstimator):
    _feature_name = "window_stat"

    def _validate(self, X):
        return check_stream(X)

    def _new_sketch(self):
        raise NotImplementedError

    def _setup(self, x):
        raise NotImplementedError

    def _feed(self, sketch, x):
        out = np.empty(len(x), dtype=np.int64)
        update, query = sketch.update, sketch.query
        for i, v in enumerate(x.tolist()):
            update(v)
            out[i] = query()
        return out

    def fit(self, X, y=None):
        x = self._validate(X)
        self._setup(x)
        self.sketch_ = self._new_sketch()
        self.sketch_.extend(x.tolist())
        self.n_features_in_ = 1
        return self

    def partial_fit(self, X, y=None):
        x = self._validate(X)
        if not hasattr(self, "sketch_"):
            return self.fit(x)
        self._check_chunk(x)
        self.sketch_.extend(x.tolist())
        return self

    def _check_chunk(self, x):
        pass

    def transform(self, X):
        check_is_fitted(self, "sketch_")
        x = self._validate(X)
        self._check_chunk(x)
        return self._feed(self._new_sketch(), x).reshape(-1, 1)

    @property
    def estimate_(self):
        check_is_fitted(self, "sketch_")
        return self.sketch_.query()

    def get_feature_names_out(self, input_features=None):
        return np.asarray([self._feature_name], dtype=object)


class SlidingWindowMaxSubarray(_StreamTransformer):
    """Approximate maximum subarray sum over the last ``window`` elements.

    Parameters
    ----------
    window : int
        Sliding window size.
    eps : float
        Relative error target of the refined sketch.
    value_bound : int or None
        Largest absolute element value.  Inferred from the data passed to
        ``fit`` when None.
    rule : {"refined", "standard"}
        Pruning rule.  ``"standard"`` uses ``beta`` and only guarantees the
        factor ``1 / (2 - beta)``.
    beta : float
        Closeness parameter for the standard rule.
    nonempty : bool
        Exclude the empty subarray, so all-negative windows report their
        largest element instead of 0.  Requires ``rule="refined"``.
    """

    _feature_name = "window_mss"

    def __init__(self, window=100, eps=0.1, value_bound=None, rule="refined", beta=0.5,
                 nonempty=False):
        self.window = window
        self.eps = eps
        self.value_bound = value_bound
        self.rule = rule
        self.beta = beta
        self.nonempty = nonempty

    def _setup(self, x):
        if self.rule not in ("refined", "standard"):
            raise ConfigurationError(f"rule must be 'refined' or 'standard', got {self.rule!r}")
        if self.nonempty and self.rule != "refined":
            raise ConfigurationError("nonempty=True requires rule='refined'")
        self.value_bound_ = (
            infer_value_bound(x) if self.value_bound is None else int(self.value_bound)
        )
        self._check_chunk(x)
        self.params_ = Params(int(self.window), self.eps, self.value_bound_)

    def _check_chunk(self, x):
        check_value_bound(x, self.value_bound_)

    def _new_sketch(self):
        algo = "nonempty" if self.nonempty else self.rule
        return make_sketch(algo, self.params_, self.beta)


class ExactSlidingWindowMaxSubarray(SlidingWindowMaxSubarray):
    """Exact windowed maximum subarray sum; the baseline for the sketch above."""

    def transform(self, X):
        check_is_fitted(self, "sketch_")
        x = self._validate(X)
        exact = sliding_window_mss_nonempty if self.nonempty else sliding_window_mss
        return exact(x, int(self.window)).reshape(-1, 1)


class SlidingWindowOnesCount(_StreamTransformer):
    """Approximate count of 1s among the last ``window`` bits."""

    _feature_name = "window_ones"

    def __init__(self, window=100, eps=0.1):
        self.window = window
        self.eps = eps

    def _validate(self, X):
        return check_bits(X)

    def _setup(self, x):
        if int(self.window) < 1:
            raise ConfigurationError("window must be >= 1")

    def _new_sketch(self):
        return ExponentialHistogram(int(self.window), eps=self.eps)
