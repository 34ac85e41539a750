import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from winsum.core import ConfigurationError, IntervalSummary, Params, summary_append, summary_singleton
from winsum.oracle import WindowBuffer, brute_mss, brute_prefix, brute_suffix
from winsum.smooth_histogram import (
    Refined,
    SmoothHistogram,
    Standard,
    expire,
    make_rule,
    prune,
    q_bound,
)
from winsum.streamgen import generate, parse_stream_spec


def fs_pairs(pairs, start=1):
    """Summaries from (f, suf) pairs with consecutive starts."""
    return [IntervalSummary(start + i, suf, f) for i, (f, suf) in enumerate(pairs)]


class ReferenceSketch:
    """The four update steps spelled out over immutable summaries."""

    def __init__(self, params, rule):
        self.params, self.rule, self.now, self.inst = params, rule, 0, []

    def update(self, x):
        self.now += 1
        self.inst = [summary_append(s, x) for s in self.inst]
        self.inst.append(summary_singleton(x, self.now))
        self.inst = prune(self.inst, self.rule)
        self.inst = expire(self.inst, self.now, self.params.n)


def within(est, exact, factor):
    factor = Fraction(factor)
    return est <= exact and est >= (1 - factor) * exact


class TestNew:
    def test_empty(self):
        sk = SmoothHistogram(Params(10, 0.1, 5))
        assert (len(sk), sk.now, sk.query()) == (0, 0, 0)
        assert isinstance(sk.rule, Refined)

    def test_window_one(self):
        assert len(SmoothHistogram(Params(1, 0.5, 5))) == 0

    def test_standard_alpha(self):
        assert float(Standard(0.99).alpha) == pytest.approx(0.9901, abs=1e-4)
        assert Standard(0.5).alpha == Fraction(2, 3)

    @pytest.mark.parametrize("bad", [0, 1, 1.5, -0.1])
    def test_rule_range(self, bad):
        with pytest.raises(ConfigurationError):
            Refined(bad)
        with pytest.raises(ConfigurationError):
            Standard(bad)

    def test_make_rule(self):
        assert make_rule("standard", 0.25) == Standard(0.25)
        with pytest.raises(ConfigurationError):
            make_rule("greedy", 0.1)


class TestUpdate:
    def test_first_element(self):
        sk = SmoothHistogram(Params(10, 0.1, 10))
        sk.update(4)
        assert sk.instances == [IntervalSummary(1, 4, 4)]

    def test_two_ones(self):
        sk = SmoothHistogram(Params(10, 0.5, 1))
        sk.extend([1, 1])
        assert sk.instances == [IntervalSummary(1, 2, 2), IntervalSummary(2, 1, 1)]

    def test_fifty_ones(self):
        sk = SmoothHistogram(Params(10, 0.5, 1))
        for t in range(1, 51):
            sk.update(1)
            assert sk.query() >= Fraction(1, 2) * min(t, 10)
            assert sk.query() <= min(t, 10)

    def test_rejects_out_of_bound(self):
        sk = SmoothHistogram(Params(10, 0.5, 3))
        with pytest.raises(ConfigurationError):
            sk.update(4)


class TestPrune:
    def test_middle_removed(self):
        out = prune(fs_pairs([(10, 10), (10, 10), (9, 9)]), Refined(0.1))
        assert len(out) == 2
        assert [s.start for s in out] == [1, 3]

    def test_suffix_condition_keeps_middle(self):
        inst = fs_pairs([(10, 10), (9, 1), (8, 0)])
        assert prune(inst, Refined(0.1)) == inst

    def test_scan_of_four(self):
        inst = fs_pairs([(100, 100), (99, 99), (98, 2), (97, 1)])
        assert prune(inst, Refined(0.05)) == inst

    def test_standard_ignores_suffix(self):
        inst = fs_pairs([(10, 10), (9, 1), (9, 0)])
        assert len(prune(inst, Standard(0.1))) == 2

    def test_equal_zeros_collapse(self):
        inst = fs_pairs([(5, 0), (0, 0), (0, 0), (0, 0)])
        assert [s.start for s in prune(inst, Refined(0.5))] == [1, 2, 4]

    def test_removed_slot_is_retested(self):
        # after dropping the second instance the third is tested against the first
        inst = fs_pairs([(10, 10), (10, 10), (10, 10), (10, 10)])
        assert [s.start for s in prune(inst, Refined(0.1))] == [1, 4]

    def test_endpoints_never_removed(self):
        inst = fs_pairs([(3, 3), (3, 3)])
        assert prune(inst, Refined(0.5)) == inst


class TestExpire:
    def test_drop_one(self):
        inst = fs_pairs([(0, 0)] * 3, start=1)
        assert [s.start for s in expire(inst, 12, 10)] == [2, 3]

    def test_nothing_expired(self):
        inst = [IntervalSummary(5, 0, 0), IntervalSummary(9, 0, 0)]
        assert expire(inst, 12, 10) == inst

    def test_repeated(self):
        inst = fs_pairs([(0, 0)] * 12, start=1)
        assert [s.start for s in expire(inst, 12, 3)] == [9, 10, 11, 12]


class TestQuery:
    def test_warm_up_exact(self):
        sk = SmoothHistogram(Params(10, 0.3, 1))
        sk.extend([1, 1, 1])
        assert sk.query() == 3

    @pytest.mark.parametrize("eps", [0.5, 0.1])
    def test_all_negative(self, eps):
        sk = SmoothHistogram(Params(4, eps, 9))
        for x in (-1, -9, -3, -2, -7, -1):
            sk.update(x)
            assert sk.query() == 0


class TestSize:
    def test_empty(self):
        assert SmoothHistogram(Params(4, 0.5, 9)).size() == (0, 0)

    def test_five_instances(self):
        sk = SmoothHistogram(Params(100, 0.01, 100))
        sk.extend([50, 40, 30, 20, 10])
        assert len(sk) == 5
        assert sk.size() == (5, 960)

    def test_q_bound_on_adversarial_run(self):
        n, m, eps = 10_000, 100, 0.1
        spec = parse_stream_spec("decay:peak=100,ratio=0.9", seed=4, length=2 * n)
        sk = SmoothHistogram(Params(n, eps, m))
        cap = q_bound(n, m, eps)
        peak = 0
        for x in generate(spec, m):
            sk.update(x)
            peak = max(peak, len(sk))
        assert peak <= cap


streams = st.lists(st.integers(-6, 6), min_size=1, max_size=80)
eps_values = st.sampled_from(["1/2", "1/5", "1/10", "1/3", "0.05"])


@settings(max_examples=150, deadline=None)
@given(streams, st.integers(1, 12), eps_values, st.sampled_from(["refined", "standard"]))
def test_summaries_are_exact_and_structure_holds(values, n, eps, kind):
    params = Params(n, eps, 6)
    rule = make_rule(kind, eps)
    sk = SmoothHistogram(params, rule)
    stream = []
    for x in values:
        sk.update(x)
        stream.append(x)
        sk.check_invariants()
        for s in sk.instances:
            seg = stream[s.start - 1 :]
            assert s.f == brute_mss(seg)
            assert s.suf == brute_suffix(seg)


@settings(max_examples=150, deadline=None)
@given(streams, st.integers(1, 12), eps_values, st.sampled_from(["refined", "standard"]))
def test_matches_reference_sketch(values, n, eps, kind):
    params = Params(n, eps, 6)
    rule = make_rule(kind, eps)
    sk, ref = SmoothHistogram(params, rule), ReferenceSketch(params, rule)
    for x in values:
        sk.update(x)
        ref.update(x)
        assert sk.instances == ref.inst


@settings(max_examples=150, deadline=None)
@given(streams, st.integers(1, 15), eps_values)
def test_refined_one_sided_guarantee(values, n, eps):
    sk = SmoothHistogram(Params(n, eps, 6))
    buf = WindowBuffer(n)
    for t, x in enumerate(values, start=1):
        sk.update(x)
        buf.update(x)
        assert within(sk.query(), buf.mss(), Fraction(eps))
        if t <= n:
            assert sk.query() == buf.mss()


@settings(max_examples=100, deadline=None)
@given(streams, st.integers(1, 15), st.sampled_from(["0.25", "0.5", "0.9"]))
def test_standard_constant_factor(values, n, beta):
    rule = Standard(beta)
    sk = SmoothHistogram(Params(n, 0.5, 6), rule)
    buf = WindowBuffer(n)
    for x in values:
        sk.update(x)
        buf.update(x)
        assert within(sk.query(), buf.mss(), rule.alpha)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=80), st.integers(1, 15))
def test_bit_stream_against_count(bits, n):
    sk = SmoothHistogram(Params(n, "1/4", 1))
    buf = WindowBuffer(n)
    for b in bits:
        sk.update(b)
        buf.update(b)
        c = buf.count_ones()
        assert buf.mss() == c
        assert within(sk.query(), c, Fraction(1, 4))


def test_removal_safety_sampled():
    rng = random.Random(11)
    eps = Fraction(1, 5)
    checked = 0
    while checked < 2000:
        a = [rng.randint(-5, 5) for _ in range(rng.randint(1, 12))]
        b = a[rng.randint(0, len(a) - 1) :]
        if not (brute_mss(b) >= (1 - eps) * brute_mss(a) and brute_suffix(b) >= (1 - eps) * brute_suffix(a)):
            continue
        c = [rng.randint(-5, 5) for _ in range(rng.randint(0, 12))]
        assert brute_mss(b + c) >= (1 - eps) * brute_mss(a + c)
        checked += 1


def test_restored_state_gets_full_prune():
    sk = SmoothHistogram(Params(100, 0.5, 10))
    sk.load_instances(3, fs_pairs([(10, 10), (10, 10), (10, 10)]))
    sk.update(0)
    # instance 2 goes only if the whole list is rescanned
    assert [s.start for s in sk.instances] == [1, 3, 4]
