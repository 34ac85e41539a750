"""Deterministic, seedable stream generators.

Randomness comes from SplitMix64 implemented from its published constants,
so a ``(spec, seed)`` pair yields the same integers on every platform and in
any language that follows the same recipe:

* uniform integers in ``[lo, hi]`` use rejection sampling on the raw 64-bit
  output (``x < 2**64 - 2**64 % span``, then ``lo + x % span``);
* Bernoulli draws compare ``(x >> 11) / 2**53`` against ``p``.

Stream spec strings::

    uniform:-10..10
    walk:step=3            (optional ,bound=100)
    bursty:burst=20,hi=10,gap=50,lo=-10
    allneg:-50..-1
    bits:p=0.3
    decay:peak=1000000,ratio=0.9
    file:<path>
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional

from .core import ConfigurationError, as_fraction

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in ``[lo, hi]``, both ends inclusive."""
        if hi < lo:
            raise ConfigurationError(f"empty range [{lo}, {hi}]")
        span = hi - lo + 1
        limit = (1 << 64) - (1 << 64) % span
        while True:
            x = self.next_u64()
            if x < limit:
                return lo + x % span

    def bernoulli(self, p: float) -> int:
        return 1 if (self.next_u64() >> 11) * (1.0 / (1 << 53)) < p else 0


class StreamFileError(ConfigurationError):
    pass


@dataclass(frozen=True)
class StreamSpec:
    kind: str
    options: Dict[str, object] = field(default_factory=dict)
    seed: int = 0
    length: int = 0

    def with_run(self, seed: int, length: int) -> "StreamSpec":
        return StreamSpec(self.kind, dict(self.options), seed, length)

    @property
    def value_bound(self) -> int:
        """Smallest M such that every generated |value| <= M (at least 1)."""
        o = self.options
        if self.kind in ("uniform", "allneg"):
            return max(1, abs(o["lo"]), abs(o["hi"]))
        if self.kind == "walk":
            return max(1, o["bound"])
        if self.kind == "bursty":
            return max(1, o["hi"], abs(o["lo"]))
        if self.kind == "bits":
            return 1
        if self.kind == "decay":
            return max(1, o["peak"])
        if self.kind == "file":
            values = read_stream_file(o["path"])
            return max([1] + [abs(v) for v in values])
        raise ConfigurationError(f"unknown stream kind {self.kind!r}")

    @property
    def is_bits(self) -> bool:
        return self.kind == "bits"

    def __str__(self) -> str:
        return format_stream_spec(self)


_RANGE = re.compile(r"^\s*(-?\d+)\s*\.\.\s*(-?\d+)\s*$")


def _keyvals(body: str, kind: str) -> Dict[str, str]:
    out = {}
    for part in filter(None, (p.strip() for p in body.split(","))):
        if "=" not in part:
            raise ConfigurationError(f"{kind}: expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _int(d, key, kind, default=None):
    if key not in d:
        if default is None:
            raise ConfigurationError(f"{kind}: missing {key}=")
        return default
    try:
        return int(d[key])
    except ValueError as exc:
        raise ConfigurationError(f"{kind}: {key} must be an integer") from exc


def parse_stream_spec(text: str, seed: int = 0, length: int = 0) -> StreamSpec:
    """Parse a spec string such as ``uniform:-10..10`` or ``bits:p=0.3``."""
    if ":" not in text:
        raise ConfigurationError(f"stream spec {text!r} has no ':'")
    kind, body = text.split(":", 1)
    kind = kind.strip()
    if kind in ("uniform", "allneg"):
        m = _RANGE.match(body)
        if not m:
            raise ConfigurationError(f"{kind}: expected lo..hi, got {body!r}")
        lo, hi = int(m.group(1)), int(m.group(2))
        if lo > hi:
            raise ConfigurationError(f"{kind}: lo > hi")
        if kind == "allneg" and hi >= 0:
            raise ConfigurationError("allneg: hi must be negative")
        opts = {"lo": lo, "hi": hi}
    elif kind == "walk":
        d = _keyvals(body, kind)
        opts = {"step": _int(d, "step", kind), "bound": _int(d, "bound", kind, 100)}
        if opts["step"] < 1 or opts["bound"] < 1:
            raise ConfigurationError("walk: step and bound must be >= 1")
    elif kind == "bursty":
        d = _keyvals(body, kind)
        opts = {
            "burst": _int(d, "burst", kind, 20),
            "hi": _int(d, "hi", kind, 10),
            "gap": _int(d, "gap", kind, 50),
            "lo": _int(d, "lo", kind, -10),
        }
        if opts["burst"] < 1 or opts["gap"] < 0 or opts["hi"] < 1 or opts["lo"] > 0:
            raise ConfigurationError("bursty: need burst >= 1, gap >= 0, hi >= 1, lo <= 0")
    elif kind == "bits":
        d = _keyvals(body, kind)
        if "p" not in d:
            raise ConfigurationError("bits: missing p=")
        p = float(d["p"])
        if not 0.0 <= p <= 1.0:
            raise ConfigurationError("bits: p must lie in [0, 1]")
        opts = {"p": p}
    elif kind == "decay":
        d = _keyvals(body, kind)
        ratio = as_fraction(d.get("ratio", "0.9"))
        if not 0 < ratio < 1:
            raise ConfigurationError("decay: ratio must lie in (0, 1)")
        opts = {"peak": _int(d, "peak", kind, 1_000_000), "ratio": ratio}
        if opts["peak"] < 1:
            raise ConfigurationError("decay: peak must be >= 1")
    elif kind == "file":
        if not body:
            raise ConfigurationError("file: missing path")
        opts = {"path": body}
    else:
        raise ConfigurationError(f"unknown stream kind {kind!r}")
    return StreamSpec(kind, opts, seed, length)


def format_stream_spec(spec: StreamSpec) -> str:
    o = spec.options
    if spec.kind in ("uniform", "allneg"):
        return f"{spec.kind}:{o['lo']}..{o['hi']}"
    if spec.kind == "walk":
        return f"walk:step={o['step']},bound={o['bound']}"
    if spec.kind == "bursty":
        return f"bursty:burst={o['burst']},hi={o['hi']},gap={o['gap']},lo={o['lo']}"
    if spec.kind == "bits":
        return f"bits:p={o['p']}"
    if spec.kind == "decay":
        return f"decay:peak={o['peak']},ratio={float(o['ratio'])!r}"
    return f"file:{o['path']}"


def read_stream_file(path) -> List[int]:
    """One decimal integer per line; blank trailing line allowed."""
    text = Path(path).read_text(encoding="utf-8")
    values = []
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        try:
            values.append(int(line.strip()))
        except ValueError:
            raise StreamFileError(f"{path}:{lineno}: not an integer: {line!r}") from None
    return values


def _decay(rng: SplitMix64, length: int, peak: int, ratio: Fraction) -> List[int]:
    # descending ramps peak, peak*r, peak*r^2, ... each followed by a random
    # negative dip of at most half its size; restart at peak when the ramp hits 0
    out: List[int] = []
    num, den = ratio.numerator, ratio.denominator
    v = peak
    while len(out) < length:
        out.append(v)
        if len(out) < length:
            out.append(-rng.randint(0, v // 2))
        v = v * num // den
        if v < 1:
            v = peak
    return out


def generate(spec: StreamSpec, value_bound: Optional[int] = None) -> List[int]:
    """Produce ``spec.length`` integers; raise if any exceeds ``value_bound``."""
    rng = SplitMix64(spec.seed)
    o = spec.options
    length = spec.length
    if spec.kind in ("uniform", "allneg"):
        lo, hi = o["lo"], o["hi"]
        out = [rng.randint(lo, hi) for _ in range(length)]
    elif spec.kind == "walk":
        step, bound = o["step"], o["bound"]
        out, v = [], 0
        for _ in range(length):
            v = min(bound, max(-bound, v + rng.randint(-step, step)))
            out.append(v)
    elif spec.kind == "bursty":
        out = []
        period = o["burst"] + o["gap"]
        for t in range(length):
            if t % period < o["burst"]:
                out.append(rng.randint(1, o["hi"]))
            else:
                out.append(rng.randint(o["lo"], 0))
    elif spec.kind == "bits":
        p = o["p"]
        out = [rng.bernoulli(p) for _ in range(length)]
    elif spec.kind == "decay":
        out = _decay(rng, length, o["peak"], o["ratio"])
    elif spec.kind == "file":
        out = read_stream_file(o["path"])
        if length:
            out = out[:length]
    else:
        raise ConfigurationError(f"unknown stream kind {spec.kind!r}")
    if value_bound is not None:
        for t, x in enumerate(out, start=1):
            if abs(x) > value_bound:
                raise ConfigurationError(
                    f"stream value {x} at position {t} exceeds bound {value_bound}"
                )
    return out
