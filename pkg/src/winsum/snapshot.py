"""Snapshot serialization for sketch state, in binary and JSON.

Binary layout, all fields little-endian::

    offset  size  field
    0       4     magic: b"WSH1" (SmoothHistogram) or b"WSN1" (NonemptySketch)
    4       1     rule kind: 0 = standard, 1 = refined
    5       3     zero padding
    8       8     n                      u64
    16      8     value_bound            i64
    24      8     eps numerator          u64
    32      8     eps denominator        u64
    40      8     rule closeness num     u64   (beta or eps)
    48      8     rule closeness den     u64
    56      8     now                    u64
    64      8     q                      u64
    72      24*q  instances, oldest first: start i64, suf i64, f i64

``WSN1`` appends the nonempty tracker after the instances::

            8     last_nonneg            u64   (0 = never)
            8     r = bucket count       u64
            8*(r+1) thresholds           i64
            8*r   last_seen per bucket   u64   (0 = never)

Positions start at 1, so 0 is free to mean "never".
"""

from __future__ import annotations

import json
import struct
from fractions import Fraction
from typing import Union

from .core import ConfigurationError, IntervalSummary, Params
from .nonempty import NonemptySketch
from .smooth_histogram import Refined, SmoothHistogram, Standard, make_rule

MAGIC_SKETCH = b"WSH1"
MAGIC_NONEMPTY = b"WSN1"
_HEADER = struct.Struct("<4sB3xQqQQQQQQ")
_INSTANCE = struct.Struct("<qqq")
_U64 = struct.Struct("<Q")

Sketch = Union[SmoothHistogram, NonemptySketch]


class SnapshotError(ConfigurationError):
    pass


def _base(sk: Sketch) -> SmoothHistogram:
    return sk.sketch if isinstance(sk, NonemptySketch) else sk


def to_bytes(sk: Sketch) -> bytes:
    base = _base(sk)
    p, rule = base.params, base.rule
    magic = MAGIC_NONEMPTY if isinstance(sk, NonemptySketch) else MAGIC_SKETCH
    inst = base.instances
    parts = [
        _HEADER.pack(
            magic,
            1 if isinstance(rule, Refined) else 0,
            p.n,
            p.value_bound,
            p.eps.numerator,
            p.eps.denominator,
            rule.closeness.numerator,
            rule.closeness.denominator,
            base.now,
            len(inst),
        )
    ]
    parts.extend(_INSTANCE.pack(s.start, s.suf, s.f) for s in inst)
    if isinstance(sk, NonemptySketch):
        tr = sk.tracker
        parts.append(_U64.pack(sk.last_nonneg or 0))
        parts.append(_U64.pack(tr.n_buckets))
        parts.append(struct.pack(f"<{len(tr.thresholds)}q", *tr.thresholds))
        parts.append(struct.pack(f"<{tr.n_buckets}Q", *[t or 0 for t in tr.last_seen]))
    return b"".join(parts)


def _restore(params, rule_kind, closeness, now, instances, nonempty):
    rule = make_rule(rule_kind, closeness)
    if nonempty:
        if not isinstance(rule, Refined):
            raise SnapshotError("nonempty snapshots must use the refined rule")
        sk = NonemptySketch(params)
        sk.now = now
        base = sk.sketch
    else:
        sk = base = SmoothHistogram(params, rule)
    base.load_instances(now, instances)
    try:
        base.check_invariants()
    except AssertionError as exc:
        raise SnapshotError(f"snapshot state is inconsistent: {exc}") from exc
    return sk


def from_bytes(data: bytes) -> Sketch:
    if len(data) < _HEADER.size:
        raise SnapshotError("snapshot truncated")
    magic, kind, n, m, en, ed, cn, cd, now, q = _HEADER.unpack_from(data, 0)
    if magic not in (MAGIC_SKETCH, MAGIC_NONEMPTY):
        raise SnapshotError(f"bad magic {magic!r}")
    if kind not in (0, 1):
        raise SnapshotError(f"bad rule kind {kind}")
    off = _HEADER.size
    if len(data) < off + q * _INSTANCE.size:
        raise SnapshotError("snapshot truncated")
    instances = [
        IntervalSummary(*_INSTANCE.unpack_from(data, off + i * _INSTANCE.size)) for i in range(q)
    ]
    off += q * _INSTANCE.size
    params = Params(n, Fraction(en, ed), m)
    nonempty = magic == MAGIC_NONEMPTY
    sk = _restore(
        params, "refined" if kind else "standard", Fraction(cn, cd), now, instances, nonempty
    )
    if nonempty:
        try:
            (last_nonneg,) = _U64.unpack_from(data, off)
            (r,) = _U64.unpack_from(data, off + 8)
            off += 16
            thresholds = list(struct.unpack_from(f"<{r + 1}q", data, off))
            off += 8 * (r + 1)
            seen = list(struct.unpack_from(f"<{r}Q", data, off))
            off += 8 * r
        except struct.error as exc:
            raise SnapshotError("snapshot truncated") from exc
        if thresholds != sk.tracker.thresholds:
            raise SnapshotError("tracker thresholds do not match eps/value_bound")
        sk.last_nonneg = last_nonneg or None
        sk.tracker.last_seen = [t or None for t in seen]
    if off != len(data):
        raise SnapshotError(f"{len(data) - off} trailing bytes")
    return sk


def to_dict(sk: Sketch) -> dict:
    base = _base(sk)
    p, rule = base.params, base.rule
    d = {
        "format": "winsum.nonempty" if isinstance(sk, NonemptySketch) else "winsum.sketch",
        "version": 1,
        "params": {"n": p.n, "eps": str(p.eps), "value_bound": p.value_bound},
        "rule": {"kind": rule.name, "closeness": str(rule.closeness)},
        "now": base.now,
        "instances": [[s.start, s.suf, s.f] for s in base.instances],
    }
    if isinstance(sk, NonemptySketch):
        d["tracker"] = {
            "last_nonneg": sk.last_nonneg,
            "thresholds": list(sk.tracker.thresholds),
            "last_seen": list(sk.tracker.last_seen),
        }
    return d


def from_dict(d: dict) -> Sketch:
    fmt = d.get("format")
    if fmt not in ("winsum.sketch", "winsum.nonempty") or d.get("version") != 1:
        raise SnapshotError(f"unsupported snapshot format {fmt!r}")
    try:
        p = d["params"]
        params = Params(int(p["n"]), Fraction(p["eps"]), int(p["value_bound"]))
        instances = [IntervalSummary(int(s), int(u), int(f)) for s, u, f in d["instances"]]
        sk = _restore(
            params,
            d["rule"]["kind"],
            Fraction(d["rule"]["closeness"]),
            int(d["now"]),
            instances,
            fmt == "winsum.nonempty",
        )
        if fmt == "winsum.nonempty":
            tr = d["tracker"]
            if list(tr["thresholds"]) != sk.tracker.thresholds:
                raise SnapshotError("tracker thresholds do not match eps/value_bound")
            if len(tr["last_seen"]) != sk.tracker.n_buckets:
                raise SnapshotError("tracker bucket count mismatch")
            sk.last_nonneg = tr["last_nonneg"]
            sk.tracker.last_seen = list(tr["last_seen"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SnapshotError):
            raise
        raise SnapshotError(f"malformed snapshot: {exc}") from exc
    return sk


def to_json(sk: Sketch) -> str:
    return json.dumps(to_dict(sk), sort_keys=True)


def from_json(text: str) -> Sketch:
    return from_dict(json.loads(text))


__all__ = [
    "to_bytes",
    "from_bytes",
    "to_dict",
    "from_dict",
    "to_json",
    "from_json",
    "SnapshotError",
    "Standard",
    "Refined",
]
