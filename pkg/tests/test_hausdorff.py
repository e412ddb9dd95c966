import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from brjunolab.hausdorff import (LOG_POWER, POWER, Cover, GaugeDomainError, GaugeFunction, LineSet, cantor_set,
                                 critical_radii,
                                 exhaustive_count, exhaustive_premeasure, gauge_eval, greedy_count,
                                 hausdorff_trend, parse_line_set, premeasure, trend_csv)

LOG2 = GaugeFunction(LOG_POWER, 2)
CANTOR_DIM = math.log(2) / math.log(3)

point_sets = st.lists(st.fractions(Fraction(0), Fraction(1), max_denominator=1000), min_size=1, max_size=12)
scales = st.fractions(Fraction(1, 1000), Fraction(3, 10), max_denominator=1000)


def partition_oracle(points, eps):
    # oracle: enumerate all set partitions, each block must fit strictly inside 2 eps
    pts = sorted(set(points))
    best = [len(pts)]

    def rec(rest, blocks):
        if len(blocks) >= best[0]:
            return
        if not rest:
            best[0] = len(blocks)
            return
        x, tail = rest[0], rest[1:]
        for i, b in enumerate(blocks):
            nb = b + [x]
            if max(nb) - min(nb) < 2 * eps:
                rec(tail, blocks[:i] + [nb] + blocks[i + 1:])
        rec(tail, blocks + [[x]])

    rec(pts, [])
    return best[0]


def variable_radius_infimum(points, eps):
    pts = sorted(set(points))[:8]
    best = [math.inf]

    def cost(block):
        d = (max(block) - min(block)) / 2
        return 0.0 if d == 0 else gauge_eval(LOG2, d)

    def rec(rest, blocks):
        if not rest:
            best[0] = min(best[0], sum(cost(b) for b in blocks))
            return
        x, tail = rest[0], rest[1:]
        for i, b in enumerate(blocks):
            nb = b + [x]
            if max(nb) - min(nb) < 2 * eps:
                rec(tail, blocks[:i] + [nb] + blocks[i + 1:])
        rec(tail, blocks + [[x]])

    rec(pts, [])
    return best[0]


class TestGauge:
    def test_examples(self):
        assert gauge_eval(GaugeFunction(LOG_POWER, 1), math.exp(-1)) == pytest.approx(1, rel=1e-15)
        assert gauge_eval(GaugeFunction(LOG_POWER, 2), math.exp(-2)) == pytest.approx(0.25, rel=1e-15)
        assert gauge_eval(GaugeFunction(POWER, 0.5), 0.04) == pytest.approx(0.2, rel=1e-15)

    def test_upward_rounding(self):
        h = GaugeFunction(POWER, 0.5)
        assert gauge_eval(h, Fraction(1, 4)) >= 0.5

    def test_domain(self):
        with pytest.raises(GaugeDomainError):
            gauge_eval(LOG2, 0.5)
        with pytest.raises(GaugeDomainError):
            gauge_eval(LOG2, 0)
        with pytest.raises(ValueError):
            GaugeFunction(LOG_POWER, 1, r0=1.5)
        with pytest.raises(ValueError):
            GaugeFunction("BOX", 1)

    @given(st.floats(1e-300, math.exp(-1)), st.floats(1e-300, math.exp(-1)))
    def test_increasing(self, a, b):
        if a < b:
            assert gauge_eval(LOG2, a) <= gauge_eval(LOG2, b)

    @given(st.floats(1e-300, 0.36), st.floats(0.1, 5), st.floats(0.1, 5))
    def test_delta_monotone(self, t, d1, d2):
        lo, hi = sorted((d1, d2))
        assert gauge_eval(GaugeFunction(LOG_POWER, hi), t) <= gauge_eval(GaugeFunction(LOG_POWER, lo), t) * (1 + 1e-15)


class TestPremeasure:
    def test_single_point(self):
        for k in range(2, 9):
            r = premeasure(LineSet.points([Fraction(1, 2)]), Fraction(1, 10**k), LOG2)
            assert r.balls_used == 1
            assert r.bound == gauge_eval(LOG2, Fraction(1, 10**k))
            assert r.cover.covers(LineSet.points([Fraction(1, 2)])) and r.cover.radii_ok()

    def test_separated_points(self):
        pts = [Fraction(k, 10) for k in range(1, 8)]
        r = premeasure(LineSet.points(pts), Fraction(1, 100), LOG2)
        assert r.balls_used == 7 and r.bound == 7 * gauge_eval(LOG2, Fraction(1, 100))

    def test_cantor(self):
        h = GaugeFunction(POWER, CANTOR_DIM)
        r = premeasure("cantor:depth=8,ratio=1/3", Fraction(1, 3**8), h)
        assert r.balls_used == 256 and 0.99 <= r.bound <= 1.01
        assert r.cover.covers(cantor_set(8)) and r.cover.radii_ok()

    def test_interval(self):
        # [0, 1/10] with radius -> 1/100: each ball covers just under 1/50
        r = premeasure("intervals:0,1/10", Fraction(1, 100), GaugeFunction(POWER, 1))
        assert r.balls_used == 6 and r.cover.covers(LineSet.intervals([(0, Fraction(1, 10))]))

    def test_interval_exact_multiple(self):
        # length exactly 2 eps needs two open balls of radius < eps
        assert greedy_count(LineSet.intervals([(0, Fraction(1, 5))]), Fraction(1, 10)) == 2

    def test_empty(self):
        for row in hausdorff_trend("empty", LOG2, [Fraction(1, 10), Fraction(1, 100)]):
            assert row.bound == 0 and row.balls_used == 0

    def test_parse(self):
        assert len(parse_line_set("cantor:depth=3")) == 8
        assert parse_line_set("points:1/3,1/2").is_finite
        for bad in ("cantor:ratio=1/3", "cantor:depth=2,ratio=2/3", "blob:1", "intervals:0.5,0.1"):
            with pytest.raises(ValueError):
                parse_line_set(bad)

    def test_eps_domain(self):
        with pytest.raises(GaugeDomainError):
            premeasure(LineSet.points([0]), Fraction(1, 2), LOG2)


class TestOracles:
    @given(point_sets, scales)
    @settings(max_examples=200, deadline=None)
    def test_greedy_equals_exhaustive(self, pts, eps):
        E = LineSet.points(pts)
        assert greedy_count(E, eps) == exhaustive_count(pts, eps) == partition_oracle(pts, eps)
        assert premeasure(E, eps, LOG2, with_cover=False).bound == exhaustive_premeasure(pts, eps, LOG2)

    @given(point_sets, scales)
    @settings(max_examples=100, deadline=None)
    def test_scan_equals_exhaustive(self, pts, eps):
        E = LineSet.points(pts)
        assert premeasure(E, eps, LOG2, scan=True, with_cover=False).bound == \
            exhaustive_premeasure(pts, eps, LOG2, scan=True)

    @given(point_sets, scales, scales)
    @settings(max_examples=100, deadline=None)
    def test_scanned_bound_nondecreasing_as_eps_shrinks(self, pts, e1, e2):
        # holds once a critical radius lies below the smaller scale; below every
        # critical radius the scan degenerates to |E| h(eps), which tends to 0
        small, big = sorted((e1, e2))
        crit = critical_radii(LineSet.points(pts), small)
        a = exhaustive_premeasure(pts, small, LOG2, scan=True)
        b = exhaustive_premeasure(pts, big, LOG2, scan=True)
        if crit:
            assert a >= b
        else:
            assert a == len(set(pts)) * gauge_eval(LOG2, small)

    @given(point_sets, scales, scales)
    @settings(max_examples=50, deadline=None)
    def test_bound_never_below_true_infimum(self, pts, e1, e2):
        # exact infimum over variable radii: a cluster C needs r -> diam(C)/2 from
        # above and singletons cost h(0+) = 0, so minimise over set partitions
        small, big = sorted((e1, e2))
        inf_small, inf_big = variable_radius_infimum(pts, small), variable_radius_infimum(pts, big)
        assert inf_small >= inf_big
        assert exhaustive_premeasure(pts, small, LOG2, scan=True) >= inf_big

    @given(point_sets, st.lists(st.fractions(Fraction(0), Fraction(1), max_denominator=1000), max_size=4), scales)
    @settings(max_examples=100, deadline=None)
    def test_set_monotonicity(self, pts, extra, eps):
        assert exhaustive_count(pts, eps) <= exhaustive_count(pts + extra, eps)

    @given(point_sets, scales)
    @settings(max_examples=50, deadline=None)
    def test_explicit_cover_valid(self, pts, eps):
        E = LineSet.points(pts)
        r = premeasure(E, eps, LOG2)
        assert len(r.cover.balls) == r.balls_used and r.cover.covers(E) and r.cover.radii_ok()

    def test_cover_rejects_touching_balls(self):
        # open balls (0,1) and (1,2) leave the point 1 uncovered
        c = Cover(((Fraction(1, 2), Fraction(1, 2)), (Fraction(3, 2), Fraction(1, 2))), Fraction(1))
        assert not c.covers(LineSet.points([1]))


class TestTrend:
    def test_convergent_cloud_to_zero(self):
        from brjunolab.cf import convergents, parse_number

        cs = convergents(parse_number("e").partial_quotients(100), 100)
        pts = [c.value - 2 for c in cs]
        sched = [Fraction(1, 10**k) for k in range(2, 9)]
        rows = hausdorff_trend(LineSet.points(pts), LOG2, sched)
        bounds = [r.bound for r in rows]
        assert bounds[-1] < bounds[0] and bounds[-1] < 0.5

    def test_single_point_trend(self):
        rows = hausdorff_trend("points:1/2", LOG2, [Fraction(1, 10**k) for k in range(2, 9)])
        bounds = [r.bound for r in rows]
        assert all(b < a for a, b in zip(bounds, bounds[1:])) and bounds[-1] < 0.003

    def test_cantor_plateau(self):
        h = GaugeFunction(POWER, CANTOR_DIM)
        rows = hausdorff_trend("cantor:depth=8", h, [Fraction(1, 3**k) for k in range(2, 9)])
        assert all(0.99 <= r.bound <= 1.01 for r in rows)

    def test_schedule_must_decrease(self):
        with pytest.raises(ValueError):
            hausdorff_trend("points:0", LOG2, [Fraction(1, 100), Fraction(1, 10)])

    def test_csv(self):
        rows = hausdorff_trend("points:1/2", LOG2, [Fraction(1, 100)])
        assert trend_csv(rows).splitlines()[0] == "eps,bound,balls_used"
