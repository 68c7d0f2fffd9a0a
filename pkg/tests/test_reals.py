from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmeasure.kernel import InconsistentNames, InsufficientPrecision, rational_at
from cmeasure.reals import (
    NEG_INF,
    POS_INF,
    add_lower,
    best_lower,
    best_upper,
    exact_real,
    lower_from_approx,
    meet,
    real_approx,
    real_approx_budgeted,
    real_from_bounds,
    split,
    sub_known_minus_lower,
    sub_known_minus_upper,
    sub_lower_minus_known,
    sub_upper_minus_known,
    upper_from_approx,
    weaken,
    weaken_upper,
)


def geometric(k, ratio=Fraction(1, 3)):
    return sum((ratio**i for i in range(k + 1)), Fraction(0))


def test_lower_name_of_zero_lists_only_negatives():
    pre = lower_from_approx(lambda k: 0).stream.prefix(500)
    assert pre and all(q < 0 for q in pre)


def test_lower_name_of_three_halves():
    p = lower_from_approx(geometric)
    pre = p.stream.prefix(3000)
    assert all(q < Fraction(3, 2) for q in pre)
    assert best_lower(p, 3000) > Fraction(3, 2) - Fraction(1, 1 << 20)


def test_lower_name_of_infinity_lists_every_small_rational():
    pre = set(lower_from_approx(lambda k: k).stream.prefix(4000))
    assert all(rational_at(i) in pre for i in range(40))


def test_best_lower_of_a_third():
    p = lower_from_approx(lambda k: Fraction(1, 3) - Fraction(1, 1 << k))
    b = best_lower(p, 2000)
    assert Fraction(1, 3) - Fraction(1, 1 << 20) < b < Fraction(1, 3)


def test_best_bounds_of_empty_prefix_are_sentinels():
    assert best_lower(exact_real(1).lower, 0) == NEG_INF
    assert best_upper(exact_real(1).upper, 0) == POS_INF


@settings(max_examples=20)
@given(st.integers(1, 400), st.integers(1, 400))
def test_best_lower_is_monotone(a, b):
    p = lower_from_approx(geometric)
    lo, hi = sorted((a, b))
    assert best_lower(p, lo) <= best_lower(p, hi)


def test_real_approx_examples():
    assert abs(real_approx(exact_real(0), 10)) <= Fraction(1, 1 << 10)
    x = real_approx(exact_real(Fraction(5, 12)), 20)
    assert abs(x - Fraction(5, 12)) <= Fraction(1, 1 << 20)
    total = real_from_bounds(lambda k: (geometric(k), geometric(k) + Fraction(1, 2 * 3**k)))
    for k in (5, 20, 30):
        assert abs(real_approx(total, k) - Fraction(3, 2)) <= Fraction(1, 1 << k)


def test_real_approx_reports_insufficient_precision():
    slow = real_from_bounds(lambda k: (-Fraction(1, k + 1), Fraction(1, k + 1)))
    with pytest.raises(InsufficientPrecision) as err:
        real_approx_budgeted(slow, 40, budget=128)
    assert "insufficient precision at budget 128" in str(err.value)


@pytest.mark.parametrize("a, b, expected", [(1, 0, 1), (1, Fraction(1, 3), Fraction(2, 3)),
                                            (Fraction(3, 2), Fraction(3, 2), 0)])
def test_sub_known_minus_lower(a, b, expected):
    up = sub_known_minus_lower(exact_real(a), exact_real(b).lower)
    pre = up.stream.prefix(800)
    assert pre and all(q > expected for q in pre)
    assert best_upper(up, 800) < expected + Fraction(1, 1 << 10)


def test_other_subtractions_and_sums():
    a, b = exact_real(Fraction(3, 4)), exact_real(Fraction(1, 4))
    assert best_lower(sub_known_minus_upper(a, b.upper), 600) < Fraction(1, 2)
    assert best_lower(sub_lower_minus_known(a.lower, b), 600) > Fraction(1, 2) - Fraction(1, 1 << 10)
    assert best_upper(sub_upper_minus_known(a.upper, b), 600) > Fraction(1, 2)
    s = best_lower(add_lower(a.lower, b.lower), 600)
    assert 1 - Fraction(1, 1 << 10) < s < 1


def test_meet_and_split():
    nine_eighths = Fraction(9, 8)
    lo = lower_from_approx(lambda k: geometric(k, Fraction(1, 9)))
    hi = upper_from_approx(lambda k: geometric(k, Fraction(1, 9)) + Fraction(1, 8 * 9**k))
    r = meet(lo, hi)
    assert abs(real_approx(r, 30) - nine_eighths) <= Fraction(1, 1 << 30)
    r2 = exact_real(Fraction(1, 3))
    assert split(r2) == (r2.lower, r2.upper)
    assert all(q < Fraction(1, 3) for q in weaken(r2).stream.prefix(300))
    assert all(q > Fraction(1, 3) for q in weaken_upper(r2).stream.prefix(300))


def test_meet_reports_crossing_bounds():
    r = meet(exact_real(1).lower, exact_real(0).upper)
    with pytest.raises(InconsistentNames):
        r.lower.stream.prefix(200)
