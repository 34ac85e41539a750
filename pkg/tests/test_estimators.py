import numpy as np
import pytest
from sklearn.base import clone
from sklearn.pipeline import make_pipeline
from sklearn.preprocessing import FunctionTransformer

from winsum.core import ConfigurationError
from winsum.estimators import (
    ExactSlidingWindowMaxSubarray,
    SlidingWindowMaxSubarray,
    SlidingWindowOnesCount,
)
from winsum.oracle import sliding_window_count, sliding_window_mss


def stream(seed=0, size=500):
    return np.random.default_rng(seed).integers(-10, 11, size=size)


def test_params_and_clone():
    est = SlidingWindowMaxSubarray(window=30, eps=0.2)
    assert est.get_params()["window"] == 30
    assert clone(est).get_params() == est.get_params()


def test_transform_envelope():
    x = stream()
    est = SlidingWindowMaxSubarray(window=40, eps=0.2).fit(x)
    got = est.transform(x)[:, 0]
    exact = sliding_window_mss(x, 40)
    assert got.shape == (500,)
    assert (got <= exact).all() and (5 * got >= 4 * exact).all()
    assert est.estimate_ == got[-1]


def test_exact_variant():
    x = stream(1)
    est = ExactSlidingWindowMaxSubarray(window=25).fit(x)
    assert (est.transform(x)[:, 0] == sliding_window_mss(x, 25)).all()


def test_partial_fit_matches_fit():
    x = stream(2)
    a = SlidingWindowMaxSubarray(window=40, eps=0.1, value_bound=10).fit(x)
    b = SlidingWindowMaxSubarray(window=40, eps=0.1, value_bound=10)
    for chunk in np.array_split(x, 7):
        b.partial_fit(chunk)
    assert a.sketch_.instances == b.sketch_.instances


def test_column_input_and_pipeline():
    x = stream(3).reshape(-1, 1)
    pipe = make_pipeline(FunctionTransformer(lambda a: a * 2), SlidingWindowMaxSubarray(window=10))
    out = pipe.fit_transform(x)
    assert out.shape == (500, 1)
    assert list(pipe[-1].get_feature_names_out()) == ["window_mss"]


def test_nonempty_allneg():
    x = -np.arange(1, 20)
    out = SlidingWindowMaxSubarray(window=5, eps=0.5, nonempty=True).fit_transform(x)[:, 0]
    assert (out < 0).all()


def test_ones_count():
    bits = (np.random.default_rng(4).random(800) < 0.3).astype(int)
    est = SlidingWindowOnesCount(window=100, eps=0.1).fit(bits)
    got = est.transform(bits)[:, 0]
    exact = sliding_window_count(bits, 100)
    assert (10 * np.abs(got - exact) <= exact).all()


@pytest.mark.parametrize(
    "bad",
    [np.array([1.5, 2.0]), np.array([[1, 2], [3, 4]]), np.array([1.0, np.nan]), ["a", "b"]],
)
def test_validation(bad):
    with pytest.raises(ValueError):
        SlidingWindowMaxSubarray().fit(bad)


def test_value_bound_enforced():
    est = SlidingWindowMaxSubarray(window=5, value_bound=3).fit([1, 2, 3])
    with pytest.raises(ConfigurationError):
        est.partial_fit([4])
    with pytest.raises(ValueError):
        SlidingWindowOnesCount().fit([0, 2])
    with pytest.raises(ConfigurationError):
        SlidingWindowMaxSubarray(rule="standard", nonempty=True).fit([1])
