"""Maximum subarray sum without the empty subarray.

When the window holds a nonnegative element the answer equals the clamped
maximum and the refined sketch answers it.  Otherwise every element is
negative and the answer is the largest element, i.e. minus the smallest
magnitude.  That case is handled by a table of geometric magnitude buckets,
each remembering when a negative element of that magnitude was last seen.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import List, Optional

from .core import ConfigurationError, EmptyWindowError, Params, RealLike, check_unit_interval
from .smooth_histogram import Refined, SmoothHistogram


def bucket_thresholds(eps: RealLike, value_bound: int) -> List[int]:
    """Boundaries ``b_0 = 1 < b_1 < ...`` with the last one above ``value_bound``.

    ``b_{i+1} = b_i + ceil(eps * b_i)`` keeps ``(b_{i+1} - 1) / b_i <= 1 + eps``
    on integers.
    """
    e = check_unit_interval("eps", eps)
    if value_bound < 1:
        raise ConfigurationError("value_bound must be >= 1")
    num, den = e.numerator, e.denominator
    b = [1]
    while b[-1] <= value_bound:
        cur = b[-1]
        b.append(cur + -(-num * cur // den))
    return b


class MinTracker:
    """Most recent occurrence time per magnitude bucket."""

    def __init__(self, eps: RealLike, value_bound: int):
        self.eps = check_unit_interval("eps", eps)
        self.value_bound = value_bound
        self.thresholds = bucket_thresholds(self.eps, value_bound)
        self.last_seen: List[Optional[int]] = [None] * (len(self.thresholds) - 1)

    @property
    def n_buckets(self) -> int:
        return len(self.last_seen)

    def bucket_index(self, magnitude: int) -> int:
        if not 1 <= magnitude <= self.value_bound:
            raise ConfigurationError(
                f"magnitude {magnitude} outside [1, {self.value_bound}]"
            )
        return bisect_right(self.thresholds, magnitude) - 1

    def bucket_range(self, i: int) -> tuple:
        """Half-open magnitude range ``[b_i, b_{i+1})`` of bucket ``i``."""
        return self.thresholds[i], self.thresholds[i + 1]

    def stamp(self, magnitude: int, t: int) -> None:
        self.last_seen[self.bucket_index(magnitude)] = t

    def smallest_active(self, threshold: int) -> Optional[int]:
        """Index of the lowest bucket stamped after ``threshold``, or None."""
        for i, seen in enumerate(self.last_seen):
            if seen is not None and seen > threshold:
                return i
        return None


class NonemptySketch:
    """Approximate nonempty maximum subarray sum over a sliding window.

    The estimate satisfies ``|estimate - exact| <= eps * |exact|``.  In the
    all-negative regime the lower bucket endpoint is returned, so the
    magnitude is never overstated.
    """

    def __init__(self, params: Params):
        self.params = params
        self.sketch = SmoothHistogram(params, Refined(params.eps))
        self.tracker = MinTracker(params.eps, params.value_bound)
        self.last_nonneg: Optional[int] = None
        self.now = 0

    def update(self, x: int) -> None:
        self.sketch.update(x)
        self.now = self.sketch.now
        if x >= 0:
            self.last_nonneg = self.now
        else:
            self.tracker.stamp(-x, self.now)

    def extend(self, values) -> None:
        for x in values:
            self.update(int(x))

    def nonneg_active(self) -> bool:
        return self.last_nonneg is not None and self.last_nonneg > self.now - self.params.n

    def query(self) -> int:
        if self.now == 0:
            raise EmptyWindowError("no element has been processed yet")
        if self.nonneg_active():
            return self.sketch.query()
        i = self.tracker.smallest_active(self.now - self.params.n)
        if i is None:  # unreachable for a consistent state
            raise EmptyWindowError("window holds no tracked element")
        return -self.tracker.thresholds[i]

    def size(self):
        """``(q, buckets)``: sketch instance count and tracker bucket count."""
        return len(self.sketch), self.tracker.n_buckets

    def __len__(self) -> int:
        return len(self.sketch)

    def check_invariants(self) -> None:
        self.sketch.check_invariants()

    def dump(self) -> dict:
        d = self.sketch.dump()
        d["last_nonneg"] = self.last_nonneg
        d["last_seen"] = list(self.tracker.last_seen)
        return d
