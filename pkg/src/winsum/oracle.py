"""Exact ground truth for sliding-window statistics.

:class:`WindowBuffer` stores the active window verbatim and recomputes every
statistic by a linear scan.  The ``brute_*`` functions enumerate all
subarrays and exist to validate the scans themselves.  The ``sliding_*``
functions compute the exact statistic at every step of a whole stream in
O(length) numpy work, for long acceptance runs where a per-step linear scan
would be too slow.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np

from .core import ConfigurationError, EmptyWindowError


def max_prefix_sum(seq: Sequence[int]) -> int:
    best = run = 0
    for x in seq:
        run += x
        if run > best:
            best = run
    return best


def max_suffix_sum(seq: Sequence[int]) -> int:
    return max_prefix_sum(list(seq)[::-1])


def max_subarray(seq: Iterable[int]) -> int:
    """Clamped maximum subarray sum via prefix sums: max of P_j - min_{i<=j} P_i."""
    best = run = low = 0
    for x in seq:
        run += x
        if run - low > best:
            best = run - low
        if run < low:
            low = run
    return best


def max_subarray_nonempty(seq: Sequence[int]) -> int:
    if len(seq) == 0:
        raise EmptyWindowError("nonempty maximum of an empty window")
    top = max(seq)
    if top < 0:
        return top
    return max_subarray(seq)


def brute_mss(seq: Sequence[int]) -> int:
    """O(len^2) enumeration, empty subarray allowed."""
    best = 0
    for i in range(len(seq)):
        s = 0
        for j in range(i, len(seq)):
            s += seq[j]
            best = max(best, s)
    return best


def brute_mss_nonempty(seq: Sequence[int]) -> int:
    if len(seq) == 0:
        raise EmptyWindowError("nonempty maximum of an empty window")
    return max(sum(seq[i : j + 1]) for i in range(len(seq)) for j in range(i, len(seq)))


def brute_suffix(seq: Sequence[int]) -> int:
    return max([0] + [sum(seq[i:]) for i in range(len(seq))])


def brute_prefix(seq: Sequence[int]) -> int:
    return max([0] + [sum(seq[: j + 1]) for j in range(len(seq))])


class WindowBuffer:
    """The last ``n`` elements of the stream, exactly."""

    def __init__(self, n: int):
        if n < 1:
            raise ConfigurationError("window size n must be >= 1")
        self.n = n
        self.now = 0
        self._buf: deque = deque(maxlen=n)

    def update(self, x: int) -> None:
        self._buf.append(x)
        self.now += 1

    def extend(self, values) -> None:
        for x in values:
            self.update(int(x))

    @property
    def values(self) -> list:
        return list(self._buf)

    def __len__(self) -> int:
        return len(self._buf)

    def mss(self) -> int:
        return max_subarray(self._buf)

    def mss_nonempty(self) -> int:
        return max_subarray_nonempty(self.values)

    def suffix_max(self) -> int:
        return max_suffix_sum(self.values)

    def prefix_max(self) -> int:
        return max_prefix_sum(self._buf)

    def count_ones(self) -> int:
        total = 0
        for x in self._buf:
            if x not in (0, 1):
                raise ConfigurationError(f"non-bit element {x} in window")
            total += x
        return total


def _blocks(values, n):
    x = np.asarray(values, dtype=np.int64)
    length = len(x)
    nblocks = -(-length // n)
    padded = np.zeros(nblocks * n, dtype=np.int64)
    padded[:length] = x
    return padded.reshape(nblocks, n), length


def _prefix_stats(blocks):
    """Per row: clamped MSS and clamped max prefix sum of every prefix."""
    p = np.zeros((blocks.shape[0], blocks.shape[1] + 1), dtype=np.int64)
    np.cumsum(blocks, axis=1, out=p[:, 1:])
    f = np.maximum.accumulate(p - np.minimum.accumulate(p, axis=1), axis=1)
    pre = np.maximum.accumulate(p, axis=1)
    return f, pre


def sliding_window_mss(values, n: int) -> np.ndarray:
    """Exact clamped MSS of the window ending at every position.

    The stream is cut into blocks of length ``n``; a window ending inside
    block ``b`` is a suffix of block ``b-1`` followed by a prefix of block
    ``b``, and is combined as ``max(f(tail), f(head), Suf(tail) + Pre(head))``.
    """
    if n < 1:
        raise ConfigurationError("window size n must be >= 1")
    blocks, length = _blocks(values, n)
    if length == 0:
        return np.zeros(0, dtype=np.int64)
    head_f, head_pre = _prefix_stats(blocks)
    head_f, head_pre = head_f[:, 1:], head_pre[:, 1:]
    tail_f, tail_suf = _prefix_stats(blocks[:, ::-1])
    # a window ending at offset o of block b uses the last n-1-o elements of block b-1
    tf = np.zeros_like(head_f)
    ts = np.zeros_like(head_f)
    tf[1:] = tail_f[:-1, n - 1 :: -1]
    ts[1:] = tail_suf[:-1, n - 1 :: -1]
    out = np.maximum(np.maximum(tf, head_f), ts + head_pre)
    return out.reshape(-1)[:length]


def sliding_window_max(values, n: int) -> np.ndarray:
    """Exact maximum element of the window ending at every position."""
    if n < 1:
        raise ConfigurationError("window size n must be >= 1")
    blocks, length = _blocks(values, n)
    if length == 0:
        return np.zeros(0, dtype=np.int64)
    lowest = np.iinfo(np.int64).min
    head = np.maximum.accumulate(blocks, axis=1)
    tail = np.maximum.accumulate(blocks[:, ::-1], axis=1)
    prev = np.full_like(head, lowest)
    # offset o reads the last n-1-o elements of the previous block; o = n-1 reads none
    if n > 1:
        prev[1:, : n - 1] = tail[:-1, n - 2 :: -1]
    return np.maximum(prev, head).reshape(-1)[:length]


def sliding_window_mss_nonempty(values, n: int) -> np.ndarray:
    mss = sliding_window_mss(values, n)
    top = sliding_window_max(values, n)
    return np.where(top >= 0, mss, top)


def sliding_window_count(values, n: int) -> np.ndarray:
    x = np.asarray(values, dtype=np.int64)
    if np.any((x != 0) & (x != 1)):
        raise ConfigurationError("count of ones needs a bit stream")
    c = np.concatenate([[0], np.cumsum(x)])
    t = np.arange(1, len(x) + 1)
    return c[t] - c[np.maximum(t - n, 0)]
