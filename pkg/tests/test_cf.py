import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mp

from brjunolab.cf import (CertifiedReal, CFDepthError, Convergent, ExplicitCF, NumberSpecError, PartialQuotients,
                          QuadraticIrrational, approximation_gap, check_growth_bound, convergents, convergents_csv,
                          e_pattern, evaluate_finite, expand_cf, growth_bound_holds, number_convergents,
                          parse_number, quadratic_cf)
from brjunolab.intervals import Undecidable

digit_lists = st.lists(st.integers(1, 100), min_size=1, max_size=40).flatmap(
    lambda tail: st.integers(-5, 5).map(lambda v0: [v0] + tail))


def naive_value(digits):
    # independent oracle: top-down nested fraction by recursion
    if len(digits) == 1:
        return Fraction(digits[0])
    return digits[0] + 1 / naive_value(digits[1:])


class TestConvergents:
    def test_golden_seeds(self):
        cs = convergents([1, 1, 1, 1, 1], 4)
        assert [(c.P, c.Q) for c in cs] == [(1, 1), (2, 1), (3, 2), (5, 3), (8, 5)]

    def test_sqrt2(self):
        cs = number_convergents(parse_number("sqrt2"), 4)
        assert [(c.P, c.Q) for c in cs] == [(1, 1), (3, 2), (7, 5), (17, 12), (41, 29)]

    def test_depth_zero(self):
        assert convergents([3], 0) == [Convergent(0, 3, 1)]

    def test_finite_expansion_runs_out(self):
        with pytest.raises(CFDepthError):
            convergents(PartialQuotients(0, (2, 3)), 5)

    @given(digit_lists)
    def test_matches_exact_evaluation(self, digits):
        cs = convergents(digits, len(digits) - 1)
        for c in cs:
            assert c.value == naive_value(digits[: c.n + 1])
        assert evaluate_finite(digits) == naive_value(digits)

    @given(digit_lists)
    def test_determinant_identity(self, digits):
        cs = convergents(digits, len(digits) - 1)
        for a, b in zip(cs, cs[1:]):
            assert b.P * a.Q - a.P * b.Q == (-1) ** (b.n + 1)

    @given(digit_lists)
    def test_coprime_and_increasing(self, digits):
        cs = convergents(digits, len(digits) - 1)
        for c in cs:
            assert math.gcd(c.P, c.Q) == 1
        assert all(b.Q > a.Q for a, b in zip(cs[1:], cs[2:]))

    def test_csv(self):
        text = convergents_csv(convergents([1, 2, 2], 2))
        assert text.splitlines() == ["n,P,Q", "0,1,1", "1,3,2", "2,7,5"]

    def test_negative_digit_rejected(self):
        with pytest.raises(ValueError):
            PartialQuotients(0, (1, 0))


class TestQuadratic:
    @pytest.mark.parametrize("spec,expected", [
        ("quad:1,5,2", [1, 1, 1, 1, 1, 1]),
        ("quad:0,2,1", [1, 2, 2, 2, 2, 2]),
        ("quad:0,3,1", [1, 1, 2, 1, 2, 1]),
        ("quad:0,7,1", [2, 1, 1, 1, 4, 1]),
        ("quad:0,19,1", [4, 2, 1, 3, 1, 2]),
    ])
    def test_periodic_digits(self, spec, expected):
        assert parse_number(spec).partial_quotients(5) == expected

    @pytest.mark.parametrize("a,b,c", [(1, 5, 2), (0, 2, 1), (3, 7, -2), (-1, 13, 3), (5, 11, 7)])
    def test_digits_match_high_precision_floor_iteration(self, a, b, c):
        # oracle: iterate x -> 1/(x - floor x) on a 400-digit value
        with mp.workdps(400):
            x = (a + mp.sqrt(b)) / c
            ref = []
            for _ in range(40):
                f = int(mp.floor(x))
                ref.append(f)
                x = 1 / (x - f)
        assert quadratic_cf(QuadraticIrrational(a, b, c)).take(39) == ref

    def test_enclosure_contains_value(self):
        x = parse_number("golden").enclosure(128)
        phi = (1 + 5 ** 0.5) / 2
        assert x.lo < Fraction(phi) + Fraction(1, 10**15) and x.hi > Fraction(phi) - Fraction(1, 10**15)
        assert x.width < Fraction(1, 2**100)

    @pytest.mark.parametrize("bad", ["quad:1,4,2", "quad:1,5,0", "quad:1,-3,2", "quad:1,5"])
    def test_invalid(self, bad):
        with pytest.raises(NumberSpecError):
            parse_number(bad)


class TestParsing:
    def test_e_pattern(self):
        assert e_pattern().take(10) == [2, 1, 2, 1, 1, 4, 1, 1, 6, 1, 1]

    def test_cf_with_repeat(self):
        nu = parse_number("cf:0;3,1;repeat:2,5")
        assert nu.partial_quotients(7) == [0, 3, 1, 2, 5, 2, 5, 2]

    def test_interval(self):
        nu = parse_number("interval:1414/1000,1415/1000")
        assert nu.enclosure().lo == Fraction(1414, 1000)

    @pytest.mark.parametrize("bad", ["", "pi", "cf:x", "interval:2,1", "nope:1", "quad:a,b,c"])
    def test_malformed(self, bad):
        with pytest.raises(NumberSpecError):
            parse_number(bad)

    def test_liouville_spec(self):
        nu = parse_number("liouville:1,1")
        assert nu.partial_quotients(3)[:3] == [0, 1, 3]


class TestExpansion:
    def test_expand_interval_recovers_prefix(self):
        x = parse_number("sqrt2").enclosure(200)
        pq, depth = expand_cf(x, 50)
        assert depth >= 50
        assert pq.take(10) == [1] + [2] * 10

    def test_wide_interval_stops_early(self):
        pq, depth = expand_cf(CertifiedReal(Fraction(1), Fraction(3, 2)), 10)
        assert depth == 1 and pq.v0 == 1

    def test_ambiguous_integer_part(self):
        _, depth = expand_cf(CertifiedReal(Fraction(9, 10), Fraction(11, 10)), 10)
        assert depth == 0

    def test_explicit_enclosure(self):
        x = ExplicitCF(e_pattern(), "e").enclosure(200)
        assert x.lo < Fraction(2718281828459045, 10**15) + Fraction(1, 10**15)
        assert x.width < Fraction(1, 2**200)

    @given(st.fractions(min_value=Fraction(1, 1000), max_value=10), st.integers(1, 10**6))
    def test_float_with_error_is_rigorous(self, mid, w):
        x = CertifiedReal(mid - Fraction(1, w), mid + Fraction(1, w))
        f, e = x.float_with_error()
        assert abs(Fraction(f) - x.lo) <= Fraction(e) and abs(x.hi - Fraction(f)) <= Fraction(e)


class TestProperties:
    def test_growth_bound_exact_edge(self):
        # phi^(n-1)/2 vs Fibonacci Q_n = F_{n+1}: n=1 -> 1 > 1/2
        assert growth_bound_holds(1, 1)
        assert not growth_bound_holds(3, 1)  # 1 > phi^2/2 = 1.309 is false

    @given(st.integers(1, 300), st.integers(1, 10**70))
    def test_growth_bound_matches_high_precision(self, n, Q):
        with mp.workdps(120):
            ref = Q > mp.phi ** (n - 1) / 2
        assert growth_bound_holds(n, Q) == ref

    @given(st.lists(st.integers(1, 50), min_size=2, max_size=200))
    def test_growth_bound_on_sequences(self, tail):
        cs = convergents([0] + tail, len(tail))
        assert all(check_growth_bound(cs))

    @pytest.mark.parametrize("name", ["golden", "sqrt2", "sqrt7", "e"])
    def test_gap_bounds(self, name):
        nu = parse_number(name)
        cs = number_convergents(nu, 31)
        x = nu.enclosure(256)
        for n in range(31):
            assert approximation_gap(x, cs[n], cs[n + 1].Q).verdict

    def test_gap_undecidable_on_wide_enclosure(self):
        nu = parse_number("golden")
        cs = number_convergents(nu, 40)
        with pytest.raises(Undecidable):
            approximation_gap(nu.enclosure(16), cs[30], cs[31].Q)
