"""Smooth Histogram over Kadane summaries.

The sketch keeps instances ``I_1 .. I_q`` with start positions
``s_1 < ... < s_q = now``; instance ``I_i`` summarises ``[s_i, now]``.  Each
update runs four steps in order: append the element to every instance,
create a singleton instance, prune, and expire.

Two pruning rules are supported.  :class:`Standard` drops ``I_i`` when
``f(I_{i+1}) >= (1 - beta) f(I_{i-1})`` and guarantees the constant factor
``1 / (2 - beta)``.  :class:`Refined` additionally requires the maximum
suffix sums to be close, ``Suf(I_{i+1}) >= (1 - eps) Suf(I_{i-1})``, which
keeps subarrays that will later cross an instance boundary and brings the
guarantee down to ``eps``.

All ratio tests are exact: the rule's ``1 - factor`` is a Fraction ``a/b``
and ``u >= (a/b) v`` is evaluated as ``b*u >= a*v`` on integers.
"""

from __future__ import annotations

import math
from operator import and_, ge, le, lt
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .core import (
    ConfigurationError,
    IntervalSummary,
    Params,
    RealLike,
    check_unit_interval,
)

WORD_BITS = 64
WORDS_PER_INSTANCE = 3


class InvariantViolation(AssertionError):
    """A structural or accuracy invariant failed; ``state`` holds a dump."""

    def __init__(self, message: str, state: Optional[dict] = None):
        super().__init__(message)
        self.state = state


@dataclass(frozen=True)
class Standard:
    """f-only pruning with closeness ``beta``; one-sided factor ``1/(2-beta)``."""

    beta: Fraction
    uses_suffix = False

    def __post_init__(self):
        object.__setattr__(self, "beta", check_unit_interval("beta", self.beta))

    @property
    def closeness(self) -> Fraction:
        return self.beta

    @property
    def alpha(self) -> Fraction:
        return 1 / (2 - self.beta)

    @property
    def guarantee(self) -> Fraction:
        return self.alpha

    @property
    def name(self) -> str:
        return "standard"


@dataclass(frozen=True)
class Refined:
    """f-and-Suf pruning; one-sided factor ``eps``."""

    eps: Fraction
    uses_suffix = True

    def __post_init__(self):
        object.__setattr__(self, "eps", check_unit_interval("eps", self.eps))

    @property
    def closeness(self) -> Fraction:
        return self.eps

    @property
    def guarantee(self) -> Fraction:
        return self.eps

    @property
    def name(self) -> str:
        return "refined"


PruneRule = Union[Standard, Refined]


def make_rule(kind: str, value: RealLike) -> PruneRule:
    if kind == "refined":
        return Refined(value)
    if kind == "standard":
        return Standard(value)
    raise ConfigurationError(f"unknown pruning rule {kind!r}")


def _keep_ratio(rule: PruneRule) -> Tuple[int, int]:
    keep = 1 - rule.closeness
    return keep.numerator, keep.denominator


def _prune_lists(
    starts: List[int],
    sufs: List[int],
    fs: List[int],
    num: int,
    den: int,
    use_suf: bool,
    first: int = 1,
) -> Tuple[List[int], List[int], List[int]]:
    # Single left-to-right pass; a removed slot is re-tested against its new
    # neighbours, which is what the kept-stack below amounts to.  Middles
    # before ``first`` are known to survive and are copied through.
    if len(fs) < 3 or first >= len(fs) - 1:
        return starts, sufs, fs
    ks, ku, kf = starts[:first], sufs[:first], fs[:first]
    tf, tu = num * fs[first - 1], num * sufs[first - 1]
    middles = zip(
        starts[first:-1], sufs[first:-1], fs[first:-1], sufs[first + 1 :], fs[first + 1 :]
    )
    if use_suf:
        for s, u, f, ru, rf in middles:
            if den * rf >= tf and den * ru >= tu:
                continue
            ks.append(s)
            ku.append(u)
            kf.append(f)
            tf, tu = num * f, num * u
    else:
        for s, u, f, ru, rf in middles:
            if den * rf >= tf:
                continue
            ks.append(s)
            ku.append(u)
            kf.append(f)
            tf = num * f
    ks.append(starts[-1])
    ku.append(sufs[-1])
    kf.append(fs[-1])
    return ks, ku, kf


def _count_above(desc: Sequence[int], v: int) -> int:
    """Length of the prefix of a nonincreasing sequence with entries > v."""
    lo, hi = 0, len(desc)
    while lo < hi:
        mid = (lo + hi) // 2
        if desc[mid] > v:
            lo = mid + 1
        else:
            hi = mid
    return lo


def _expired_prefix(starts: Sequence[int], now: int, n: int) -> int:
    """Number of leading instances to drop so at most one expired one remains."""
    threshold = now - n
    k = 0
    while k + 1 < len(starts) and starts[k + 1] <= threshold:
        k += 1
    return k


def prune(summaries: Sequence[IntervalSummary], rule: PruneRule) -> List[IntervalSummary]:
    """Apply one pruning pass to an ordered list of summaries (oldest first)."""
    num, den = _keep_ratio(rule)
    starts = [s.start for s in summaries]
    ks, ku, kf = _prune_lists(
        starts, [s.suf for s in summaries], [s.f for s in summaries], num, den, rule.uses_suffix
    )
    return [IntervalSummary(s, u, f) for s, u, f in zip(ks, ku, kf)]


def expire(summaries: Sequence[IntervalSummary], now: int, n: int) -> List[IntervalSummary]:
    """Drop leading instances while the second one has also left the window."""
    k = _expired_prefix([s.start for s in summaries], now, n)
    return list(summaries[k:])


def q_bound(n: int, value_bound: int, eps: RealLike) -> int:
    """Empirical cap on the instance count implied by the structural invariant.

    Two interleaved geometric chains (over f and over Suf), each ranging over
    ``[0, n * value_bound]`` with ratio ``1 - eps``.
    """
    e = float(eps)
    chain = math.ceil(math.log(n * value_bound + 1) / -math.log1p(-e))
    return 4 * chain + 8


class SmoothHistogram:
    """Sliding-window maximum subarray sum sketch.

    Parameters
    ----------
    params : Params
        Window size, error target and element bound.
    rule : Standard or Refined, optional
        Pruning rule.  Defaults to ``Refined(params.eps)``.

    Examples
    --------
    >>> from winsum import Params, SmoothHistogram
    >>> sk = SmoothHistogram(Params(n=3, eps=0.1, value_bound=10))
    >>> for x in (2, -1, 3, -9, 4):
    ...     sk.update(x)
    >>> sk.query()
    4
    """

    def __init__(self, params: Params, rule: Optional[PruneRule] = None):
        self.params = params
        self.rule = Refined(params.eps) if rule is None else rule
        self.now = 0
        self._starts: List[int] = []
        self._sufs: List[int] = []
        self._fs: List[int] = []
        self._num, self._den = _keep_ratio(self.rule)
        self._pruned = True

    def update(self, x: int) -> None:
        x = self.params.check_value(x)
        self.now += 1
        # 1. append x to every instance
        sufs, fs, starts = self._sufs, self._fs, self._starts
        q = len(fs)
        first = 1
        if x > 0:
            sufs = [u + x for u in sufs]
            fs = [f if f > u else u for f, u in zip(fs, sufs)]
        elif x == 0:
            # nothing changes, only the new singleton can make its neighbour removable
            if self._pruned and q > 1:
                first = q - 1
        elif q:
            k = _count_above(sufs, -x)
            # sufs from index k on are clamped to 0; those from z on already were
            z = k if k == q or sufs[k] == 0 else _count_above(sufs, 0)
            if k < q:
                sufs = [u + x for u in sufs[:k]]
                sufs.extend([0] * (q - k))
            else:
                sufs = [u + x for u in sufs]
            if self._pruned:
                # f is unchanged and suf ratios only shrink, so a middle that
                # survived the last prune can only become removable once its
                # left neighbour's suf is newly clamped to 0, or next to the
                # new singleton
                first = q - 1
                if self.rule.uses_suffix and k < z and k + 1 < first:
                    first = k + 1
                if first < 1:
                    first = 1
        # 2. singleton at the current position
        v = x if x > 0 else 0
        starts.append(self.now)
        sufs.append(v)
        fs.append(v)
        # 3. prune
        starts, sufs, fs = _prune_lists(
            starts, sufs, fs, self._num, self._den, self.rule.uses_suffix, first
        )
        # 4. expire
        k = _expired_prefix(starts, self.now, self.params.n)
        if k:
            del starts[:k], sufs[:k], fs[:k]
        self._starts, self._sufs, self._fs = starts, sufs, fs
        self._pruned = True

    def extend(self, values) -> None:
        for x in values:
            self.update(int(x))

    def query(self) -> int:
        if not self._fs:
            return 0
        if self._starts[0] > self.now - self.params.n:
            return self._fs[0]
        return self._fs[1]

    def size(self, word_bits: int = WORD_BITS) -> Tuple[int, int]:
        """``(q, bits)`` where bits counts three machine words per instance."""
        q = len(self._fs)
        return q, q * WORDS_PER_INSTANCE * word_bits

    def __len__(self) -> int:
        return len(self._fs)

    @property
    def instances(self) -> List[IntervalSummary]:
        return [IntervalSummary(s, u, f) for s, u, f in zip(self._starts, self._sufs, self._fs)]

    def load_instances(self, now: int, instances: Sequence[IntervalSummary]) -> None:
        """Replace the state wholesale (used by snapshot restore)."""
        self.now = now
        self._starts = [s.start for s in instances]
        self._sufs = [s.suf for s in instances]
        self._fs = [s.f for s in instances]
        self._pruned = False

    def _int64_safe(self) -> bool:
        return self.params.n * self.params.value_bound * max(self._num, self._den) < 2**63

    def structure_ok(self) -> bool:
        """Post-prune invariant: every internal instance has a far-enough right neighbour."""
        num, den = self._num, self._den
        fs, us = self._fs, self._sufs
        if len(fs) < 3:
            return True
        # pair i is bad when both right-neighbour values are still close
        close_f = map(ge, [den * f for f in fs[2:]], [num * f for f in fs[:-2]])
        if not self.rule.uses_suffix:
            return not any(close_f)
        close_u = map(ge, [den * u for u in us[2:]], [num * u for u in us[:-2]])
        return not any(map(and_, close_f, close_u))

    def check_invariants(self) -> None:
        """Raise :class:`InvariantViolation` if any state invariant fails."""
        starts, sufs, fs = self._starts, self._sufs, self._fs
        n, now = self.params.n, self.now

        def fail(msg):
            raise InvariantViolation(msg, self.dump())

        if not fs:
            if now:
                fail("no instances after an update")
            return
        if starts[-1] != now:
            fail(f"last instance starts at {starts[-1]}, expected {now}")
        threshold = now - n
        if starts[0] > threshold:
            if starts[0] != 1:
                fail("first instance unexpired but does not start at position 1")
        elif len(starts) < 2 or starts[1] <= threshold:
            fail("more than one expired instance retained")
        if len(fs) > 8 and self._int64_safe():
            problem = self._vector_check()
        else:
            problem = self._scalar_check()
        if problem:
            fail(problem)

    def _scalar_check(self) -> Optional[str]:
        starts, sufs, fs = self._starts, self._sufs, self._fs
        if not all(map(lt, starts, starts[1:])):
            return "start positions are not strictly increasing"
        if not (all(map(le, sufs, fs)) and min(sufs) >= 0):
            return "summary violates 0 <= suf <= f"
        if not all(map(ge, fs, fs[1:])):
            return "f values are not nonincreasing"
        if not all(map(ge, sufs, sufs[1:])):
            return "suf values are not nonincreasing"
        if not self.structure_ok():
            return "post-prune structural invariant violated"
        return None

    def _vector_check(self) -> Optional[str]:
        st = np.array(self._starts, dtype=np.int64)
        u = np.array(self._sufs, dtype=np.int64)
        f = np.array(self._fs, dtype=np.int64)
        if not (st[:-1] < st[1:]).all():
            return "start positions are not strictly increasing"
        if not ((u >= 0).all() and (u <= f).all()):
            return "summary violates 0 <= suf <= f"
        if not (f[:-1] >= f[1:]).all():
            return "f values are not nonincreasing"
        if not (u[:-1] >= u[1:]).all():
            return "suf values are not nonincreasing"
        num, den = self._num, self._den
        bad = den * f[2:] >= num * f[:-2]
        if self.rule.uses_suffix:
            bad &= den * u[2:] >= num * u[:-2]
        if bad.any():
            return "post-prune structural invariant violated"
        return None

    def dump(self) -> dict:
        return {
            "rule": self.rule.name,
            "closeness": str(self.rule.closeness),
            "n": self.params.n,
            "eps": str(self.params.eps),
            "value_bound": self.params.value_bound,
            "now": self.now,
            "instances": [list(t) for t in zip(self._starts, self._sufs, self._fs)],
        }

    def __repr__(self) -> str:
        return (
            f"SmoothHistogram(n={self.params.n}, rule={self.rule.name}"
            f"({self.rule.closeness}), now={self.now}, q={len(self._fs)})"
        )
