"""Exponential Histogram for counting 1s in a sliding window of bits."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Deque, List, Optional

from .core import ConfigurationError, RealLike, check_unit_interval


@dataclass(frozen=True)
class EhBucket:
    size: int
    newest: int


class ExponentialHistogram:
    """Approximate count of 1s among the last ``n`` bits.

    Buckets have power-of-two sizes; at most ``k + 1`` buckets of any size are
    kept and the two oldest of an overfull size are merged.  A bucket is
    dropped once its newest 1 leaves the window.  With ``k = ceil(1/eps)`` the
    estimate is within relative error ``eps``.
    """

    def __init__(self, n: int, eps: Optional[RealLike] = None, k: Optional[int] = None):
        if n < 1:
            raise ConfigurationError("window size n must be >= 1")
        if k is None:
            if eps is None:
                raise ConfigurationError("give either eps or k")
            k = math.ceil(1 / check_unit_interval("eps", eps))
        if k < 1:
            raise ConfigurationError("k must be >= 1")
        self.n = n
        self.k = k
        self.now = 0
        # levels[j] holds newest-timestamps of size-2**j buckets, oldest first
        self._levels: List[Deque[int]] = []
        self._total = 0

    def update(self, bit: int) -> None:
        if bit not in (0, 1):
            raise ConfigurationError(f"expected a bit, got {bit!r}")
        self.now += 1
        levels = self._levels
        if bit:
            if not levels:
                levels.append(deque())
            levels[0].append(self.now)
            self._total += 1
            cap = self.k + 1
            j = 0
            while len(levels[j]) > cap:
                levels[j].popleft()
                newest = levels[j].popleft()
                if j + 1 == len(levels):
                    levels.append(deque())
                levels[j + 1].append(newest)
                j += 1
        threshold = self.now - self.n
        while levels:
            top = levels[-1]
            if top and top[0] <= threshold:
                top.popleft()
                self._total -= 1 << (len(levels) - 1)
            if top:
                break
            levels.pop()

    def extend(self, bits) -> None:
        for b in bits:
            self.update(int(b))

    def query(self) -> int:
        if not self._levels:
            return 0
        return self._total - (1 << (len(self._levels) - 1)) // 2

    @property
    def buckets(self) -> List[EhBucket]:
        """Buckets ordered oldest to newest."""
        out = []
        for j in range(len(self._levels) - 1, -1, -1):
            out.extend(EhBucket(1 << j, t) for t in self._levels[j])
        return out

    def __len__(self) -> int:
        return sum(len(level) for level in self._levels)

    def check_invariants(self) -> None:
        from .smooth_histogram import InvariantViolation

        for j, level in enumerate(self._levels):
            if len(level) > self.k + 1:
                raise InvariantViolation(f"{len(level)} buckets of size {1 << j}", self.dump())
        if self._levels and not self._levels[-1]:
            raise InvariantViolation("empty top level retained", self.dump())
        stamps = [b.newest for b in self.buckets]
        if stamps != sorted(stamps):
            raise InvariantViolation("bucket timestamps out of order", self.dump())

    def dump(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "now": self.now,
            "buckets": [[b.size, b.newest] for b in self.buckets],
        }
