"""Run sketches against the exact oracle and report error, space and speed."""

from __future__ import annotations

import csv
import io
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from .core import ConfigurationError, Params, RealLike, as_fraction
from .eh import ExponentialHistogram
from .nonempty import NonemptySketch
from .oracle import (
    WindowBuffer,
    sliding_window_count,
    sliding_window_mss,
    sliding_window_mss_nonempty,
)
from .smooth_histogram import (
    InvariantViolation,
    Refined,
    SmoothHistogram,
    Standard,
    q_bound,
)
from .streamgen import StreamSpec, generate

ALGOS = ("refined", "standard", "eh", "nonempty")
CSV_HEADER = ("t", "estimate", "exact", "rel_err", "q")


@dataclass
class RunConfig:
    algo: str
    n: int
    eps: Fraction
    stream: StreamSpec
    beta: Optional[Fraction] = None
    value_bound: Optional[int] = None
    report: str = "csv"
    out: Optional[str] = None
    check_invariants: bool = False
    fail_fast: bool = True
    oracle: str = "batch"

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise ConfigurationError(f"algo must be one of {ALGOS}, got {self.algo!r}")
        self.eps = as_fraction(self.eps)
        if self.algo == "standard":
            self.beta = as_fraction(self.beta if self.beta is not None else "0.5")
        if self.algo == "eh" and not self.stream.is_bits:
            raise ConfigurationError("algo=eh requires a bits: stream")
        if self.report not in ("csv", "json"):
            raise ConfigurationError("report must be csv or json")
        if self.oracle not in ("batch", "buffer"):
            raise ConfigurationError("oracle must be batch or buffer")
        if self.value_bound is None:
            self.value_bound = self.stream.value_bound

    @property
    def params(self) -> Params:
        return Params(self.n, self.eps, self.value_bound)

    @property
    def guarantee(self) -> Fraction:
        if self.algo == "standard":
            return Standard(self.beta).alpha
        return self.eps


@dataclass
class Report:
    config: RunConfig
    t: np.ndarray
    estimate: np.ndarray
    exact: np.ndarray
    rel_err: np.ndarray
    q: np.ndarray
    summary: Dict[str, object]
    violations: List[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def make_sketch(algo: str, params: Params, beta: Optional[RealLike] = None):
    if algo == "refined":
        return SmoothHistogram(params, Refined(params.eps))
    if algo == "standard":
        return SmoothHistogram(params, Standard(beta if beta is not None else "0.5"))
    if algo == "nonempty":
        return NonemptySketch(params)
    if algo == "eh":
        return ExponentialHistogram(params.n, eps=params.eps)
    raise ConfigurationError(f"unknown algo {algo!r}")


def exact_series(algo: str, values: Sequence[int], n: int, oracle: str = "batch") -> np.ndarray:
    """Exact statistic after every step, from the batch oracle or a ring buffer."""
    if oracle == "batch":
        if algo == "eh":
            return sliding_window_count(values, n)
        if algo == "nonempty":
            return sliding_window_mss_nonempty(values, n)
        return sliding_window_mss(values, n)
    buf = WindowBuffer(n)
    out = np.empty(len(values), dtype=np.int64)
    stat = {"eh": buf.count_ones, "nonempty": buf.mss_nonempty}.get(algo, buf.mss)
    for i, x in enumerate(values):
        buf.update(x)
        out[i] = stat()
    return out


def _in_envelope(algo: str, est: int, exact: int, num: int, den: int) -> bool:
    # num/den is the guarantee factor g; all tests are exact integer comparisons
    if algo in ("refined", "standard"):
        return est <= exact and den * est >= (den - num) * exact
    return den * abs(est - exact) <= num * abs(exact)


def _rel_err(est: np.ndarray, exact: np.ndarray) -> np.ndarray:
    out = np.zeros(len(est), dtype=np.float64)
    nz = exact != 0
    out[nz] = (exact[nz] - est[nz]) / exact[nz]
    return out


def run_compare(config: RunConfig) -> Report:
    """Feed the configured stream to sketch and oracle and record every step.

    With ``check_invariants`` set, the sketch's structural invariants, the
    accuracy envelope and the instance-count bound are checked after every
    update.  With ``fail_fast`` the first violation raises
    :class:`InvariantViolation` carrying a state dump; otherwise violations
    are collected on the report.
    """
    params = config.params
    values = generate(config.stream, params.value_bound)
    started = time.perf_counter()
    exact = exact_series(config.algo, values, params.n, config.oracle)
    sketch = make_sketch(config.algo, params, config.beta)
    length = len(values)
    est = np.empty(length, dtype=np.int64)
    qs = np.empty(length, dtype=np.int64)
    g = config.guarantee
    num, den = g.numerator, g.denominator
    check = config.check_invariants
    cap = None
    if config.algo in ("refined", "nonempty"):
        cap = q_bound(params.n, params.value_bound, params.eps)
    elif config.algo == "standard":
        cap = q_bound(params.n, params.value_bound, config.beta)
    violations: List[dict] = []

    def violate(t, message, state):
        v = {"t": t, "message": message, "state": state}
        if config.fail_fast:
            raise InvariantViolation(f"t={t}: {message}", state)
        violations.append(v)

    update, query = sketch.update, sketch.query
    for i, x in enumerate(values):
        update(x)
        e = query()
        est[i] = e
        q = len(sketch)
        qs[i] = q
        if check:
            try:
                sketch.check_invariants()
            except InvariantViolation as exc:
                violate(i + 1, str(exc), exc.state)
            ex = int(exact[i])
            if not _in_envelope(config.algo, e, ex, num, den):
                violate(i + 1, f"estimate {e} outside envelope of exact {ex}", sketch.dump())
            if config.algo == "nonempty" and sketch.nonneg_active() != (ex >= 0):
                violate(i + 1, "regime does not match the sign of the exact answer", sketch.dump())
            if cap is not None and q > cap:
                violate(i + 1, f"q={q} exceeds bound {cap}", sketch.dump())
    elapsed = time.perf_counter() - started

    rel = _rel_err(est, exact)
    zero_bad = int(np.count_nonzero((exact == 0) & (est != 0)))
    summary = {
        "algo": config.algo,
        "n": params.n,
        "eps": str(params.eps),
        "beta": None if config.beta is None else str(config.beta),
        "guarantee": str(g),
        "value_bound": params.value_bound,
        "stream": str(config.stream),
        "seed": config.stream.seed,
        "length": length,
        "max_rel_err": float(np.max(np.abs(rel))) if length else 0.0,
        "max_q": int(qs.max()) if length else 0,
        "mean_q": float(qs.mean()) if length else 0.0,
        "q_bound": cap,
        "zero_exact_violations": zero_bad,
        "violations": len(violations),
        "wall_time_s": elapsed,
    }
    return Report(
        config=config,
        t=np.arange(1, length + 1),
        estimate=est,
        exact=np.asarray(exact, dtype=np.int64),
        rel_err=rel,
        q=qs,
        summary=summary,
        violations=violations,
    )


def format_csv(report: Report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in zip(
        report.t.tolist(),
        report.estimate.tolist(),
        report.exact.tolist(),
        report.rel_err.tolist(),
        report.q.tolist(),
    ):
        w.writerow((row[0], row[1], row[2], repr(row[3]), row[4]))
    return buf.getvalue()


def format_json(report: Report) -> str:
    records = [
        {"t": t, "estimate": e, "exact": x, "rel_err": r, "q": q}
        for t, e, x, r, q in zip(
            report.t.tolist(),
            report.estimate.tolist(),
            report.exact.tolist(),
            report.rel_err.tolist(),
            report.q.tolist(),
        )
    ]
    return json.dumps({"records": records, "summary": report.summary}, indent=None) + "\n"


def write_report(report: Report, path: Optional[str] = None) -> str:
    text = format_csv(report) if report.config.report == "csv" else format_json(report)
    target = path if path is not None else report.config.out
    if target is not None:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def _one(config: RunConfig) -> Report:
    return run_compare(config)


def run_grid(configs: Iterable[RunConfig], jobs: int = 1) -> List[Report]:
    """Run independent grid points, optionally in worker processes."""
    configs = list(configs)
    if jobs <= 1:
        return [run_compare(c) for c in configs]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_one, configs))


def run_bench(
    config: RunConfig,
    doublings: int = 3,
    repeats: int = 3,
    oracle_steps: int = 0,
) -> List[dict]:
    """Time the sketch alone for ``n, 2n, 4n, ...`` on the configured stream.

    Each size runs ``config.stream.length`` updates (or ``10 n`` if the length
    is 0); the best of ``repeats`` timings is kept.  With ``oracle_steps`` the
    per-update cost of a full linear rescan of the window is timed too.
    """
    rows = []
    for k in range(doublings + 1):
        n = config.n << k
        length = config.stream.length or 10 * n
        params = Params(n, config.eps, config.value_bound)
        values = generate(config.stream.with_run(config.stream.seed, length), params.value_bound)
        best = None
        for _ in range(repeats):
            sketch = make_sketch(config.algo, params, config.beta)
            update = sketch.update
            peak = 0
            total_q = 0
            t0 = time.perf_counter()
            for x in values:
                update(x)
                q = len(sketch)
                total_q += q
                if q > peak:
                    peak = q
            dt = time.perf_counter() - t0
            if best is None or dt < best:
                best = dt
        row = {
            "algo": config.algo,
            "n": n,
            "eps": str(config.eps),
            "length": length,
            "updates_per_s": length / best if best else float("inf"),
            "ns_per_update": 1e9 * best / length if length else 0.0,
            "max_q": peak,
            "mean_q": total_q / length if length else 0.0,
        }
        if oracle_steps:
            row["oracle_ns_per_update"] = 1e9 * _time_oracle(values, n, oracle_steps)
        rows.append(row)
    return rows


def _time_oracle(values: Sequence[int], n: int, steps: int) -> float:
    """Seconds per update for recomputing the window MSS from scratch."""
    buf = WindowBuffer(n)
    warm = values[:n]
    buf.extend(warm)
    rest = list(values[n : n + steps]) or list(values[:steps])
    t0 = time.perf_counter()
    for x in rest:
        buf.update(x)
        buf.mss()
    return (time.perf_counter() - t0) / len(rest)
