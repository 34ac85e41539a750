"""Stream parameters and the Kadane interval summary.

Every sketch in this package keeps one :class:`IntervalSummary` per candidate
window start.  A summary holds the clamped maximum suffix sum and the clamped
maximum subarray sum of ``[start, now]``; both are updated in O(1) when an
element is appended at the right end.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

# Snapshots store sums as signed 64-bit words; one spare bit keeps
# ``suf + x`` in range before it is clamped.
MAX_WINDOW_SUM = 2**62

RealLike = Union[Fraction, int, float, str]


class ConfigurationError(ValueError):
    """Raised for invalid parameters or elements outside the value bound."""


class EmptyWindowError(LookupError):
    """A nonempty-subarray maximum was requested for an empty window."""


def as_fraction(value: RealLike) -> Fraction:
    """Convert a user-supplied real to an exact rational.

    Floats go through their shortest decimal repr, so ``0.1`` becomes
    ``Fraction(1, 10)`` rather than the binary expansion.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ConfigurationError(f"expected a real number, got {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as exc:
            raise ConfigurationError(f"cannot parse {value!r} as a number") from exc
    raise ConfigurationError(f"expected a real number, got {type(value).__name__}")


def check_unit_interval(name: str, value: RealLike) -> Fraction:
    frac = as_fraction(value)
    if not 0 < frac < 1:
        raise ConfigurationError(f"{name} must lie strictly between 0 and 1, got {value}")
    return frac


@dataclass(frozen=True)
class Params:
    """Window size ``n``, relative error ``eps`` and element bound ``value_bound``.

    ``eps`` is stored as an exact :class:`~fractions.Fraction` so every
    ``(1 - eps)`` comparison downstream is done in integer arithmetic.
    """

    n: int
    eps: Fraction
    value_bound: int

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise ConfigurationError(f"window size n must be an integer >= 1, got {self.n!r}")
        if (
            isinstance(self.value_bound, bool)
            or not isinstance(self.value_bound, int)
            or self.value_bound < 1
        ):
            raise ConfigurationError(
                f"value_bound must be an integer >= 1, got {self.value_bound!r}"
            )
        if self.n * self.value_bound > MAX_WINDOW_SUM:
            raise ConfigurationError(
                f"n * value_bound = {self.n * self.value_bound} exceeds the 64-bit "
                f"sum budget of {MAX_WINDOW_SUM}"
            )
        object.__setattr__(self, "eps", check_unit_interval("eps", self.eps))

    def check_value(self, x: int) -> int:
        if not -self.value_bound <= x <= self.value_bound:
            raise ConfigurationError(
                f"element {x} exceeds the value bound {self.value_bound}"
            )
        return x


@dataclass(frozen=True)
class IntervalSummary:
    """Kadane state of the interval ``[start, now]``.

    ``suf`` is the maximum suffix sum and ``f`` the maximum subarray sum,
    both clamped at zero (the empty subarray is allowed).
    """

    start: Optional[int]
    suf: int
    f: int


EMPTY_SUMMARY = IntervalSummary(start=None, suf=0, f=0)


def _check_bound(x: int, value_bound: Optional[int]) -> None:
    if value_bound is not None and not -value_bound <= x <= value_bound:
        raise ConfigurationError(f"element {x} exceeds the value bound {value_bound}")


def summary_singleton(x: int, t: int, value_bound: Optional[int] = None) -> IntervalSummary:
    _check_bound(x, value_bound)
    v = x if x > 0 else 0
    return IntervalSummary(start=t, suf=v, f=v)


def summary_append(
    s: IntervalSummary, x: int, value_bound: Optional[int] = None
) -> IntervalSummary:
    """Extend the interval by one element at the right end."""
    _check_bound(x, value_bound)
    suf = s.suf + x
    if suf < 0:
        suf = 0
    return IntervalSummary(start=s.start, suf=suf, f=s.f if s.f > suf else suf)


def kadane_max_subarray(seq: Iterable[int], value_bound: Optional[int] = None) -> int:
    """Maximum subarray sum of ``seq`` with the empty subarray allowed."""
    s = EMPTY_SUMMARY
    for x in seq:
        s = summary_append(s, int(x), value_bound)
    return s.f
