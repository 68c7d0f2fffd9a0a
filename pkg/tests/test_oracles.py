"""Exact caps of the test-set library against independent brute-force references."""

from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmeasure.kernel import ConfigError
from cmeasure.measure import lebesgue_measure, nat3_measure
from cmeasure.oracles import (
    Accumulating,
    complement,
    evens,
    finite_sets,
    interval_set,
    nat_finite,
    periodic_set,
    standard_sets,
    union,
)

NAT3 = nat3_measure()
LEB = lebesgue_measure()
NAT, IV = NAT3.space, LEB.space

MEMBERS = {
    "empty": lambda n: False,
    "N": lambda n: True,
    "evens": lambda n: n % 2 == 0,
    "odds": lambda n: n % 2 == 1,
    "{0,2}": lambda n: n in (0, 2),
    "{1,3,4}": lambda n: n in (1, 3, 4),
    "1 mod 3": lambda n: n % 3 == 1,
    "complement({0})": lambda n: n != 0,
}

DEPTH = 40  # accumulating pieces spelled out; the rest weigh at most 4^-DEPTH / 3
ACC = [(1 - Fraction(2, 1 << n), 1 - Fraction(2, 1 << n) + Fraction(1, 4**n)) for n in range(1, DEPTH + 1)]
FAR = 100
PIECES = {
    "empty": [],
    "[0,1/3)": [(0, Fraction(1, 3))],
    "[0,1/3)+[1/2,2)": [(0, Fraction(1, 3)), (Fraction(1, 2), 2)],
    "[1/4,3/4)": [(Fraction(1, 4), Fraction(3, 4))],
    "accumulating": ACC,
    "stripes": [(2 * k, 2 * k + 1) for k in range(FAR // 2)],
    "complement([0,1/3))": [(Fraction(1, 3), FAR)],
    "union([0,1/3),accumulating)": [(0, Fraction(1, 3))] + ACC,
}
SLOP = Fraction(1, 3 * 4**DEPTH)


def test_library_is_the_expected_one():
    assert set(standard_sets(NAT3)) == set(MEMBERS)
    assert set(standard_sets(LEB)) == set(PIECES)


nat_sets = st.frozensets(st.integers(0, 30), max_size=10).map(NAT.make)


@st.composite
def interval_sets(draw):
    parts = []
    for _ in range(draw(st.integers(0, 3))):
        a = Fraction(draw(st.integers(0, 40)), draw(st.integers(1, 8)))
        parts.append((a, a + Fraction(draw(st.integers(1, 16)), draw(st.integers(1, 8)))))
    return IV.make(parts)


@pytest.mark.parametrize("label", sorted(MEMBERS))
def test_nat_caps_match_membership(label):
    s = standard_sets(NAT3)[label]

    @given(nat_sets)
    def check(r):
        inside = [n for n in r.form if MEMBERS[label](n)]
        assert s.cap(r) == sum((Fraction(1, 3**n) for n in inside), Fraction(0))
        assert s.diff_measure(r) + s.cap(r) == NAT3.approx(r)[0]

    check()


@pytest.mark.parametrize("label", sorted(PIECES))
def test_interval_caps_match_explicit_pieces(label):
    s = standard_sets(LEB)[label]
    ref = IV.make(PIECES[label])

    @given(interval_sets())
    def check(r):
        expected = LEB.approx(IV.intersect(r, ref))[0]
        got = s.cap(r)
        assert expected <= got <= expected + SLOP

    check()


def test_nat_totals_match_long_partial_sums():
    for label, s in finite_sets(NAT3).items():
        partial = sum((Fraction(1, 3**n) for n in range(80) if MEMBERS[label](n)), Fraction(0))
        assert partial <= s.total() <= partial + Fraction(1, 2 * 3**79)
    assert standard_sets(NAT3)["evens"].total() == Fraction(9, 8)


def test_interval_totals():
    sets = standard_sets(LEB)
    assert sets["accumulating"].total() == Fraction(1, 3)
    assert sets["[0,1/3)+[1/2,2)"].total() == Fraction(11, 6)
    assert "stripes" not in finite_sets(LEB)


@pytest.mark.parametrize("s", [Accumulating(LEB), complement(Accumulating(LEB)),
                               union(interval_set(LEB, IV.parse("[0,1/3)")), Accumulating(LEB))],
                         ids=lambda s: s.label)
def test_series_bounds_are_sound_and_converge(s):
    r = IV.parse("[0,7/8)+[15/16,3)")
    c = s.cap(r)
    widths = []
    for k in range(1, 12):
        lo, hi = s.series_bounds(r, k)
        assert lo <= c <= hi
        widths.append(hi - lo)
    assert widths[-1] == 0 or widths[-1] < Fraction(1, 4**10)


def test_accumulating_series_is_not_exact_early():
    s = Accumulating(LEB)
    r = IV.parse("[0,7/8)")  # cuts the run of pieces, so early bounds must be loose
    lo, hi = s.series_bounds(r, 2)
    assert lo < s.cap(r) == Fraction(1, 4) + Fraction(1, 16) + Fraction(1, 64) < hi


def test_set_algebra_of_the_library():
    e = evens(NAT3)
    assert complement(complement(e)).cap(NAT.parse("{0,1,2}")) == Fraction(10, 9)
    both = union(e, nat_finite(NAT3, [1]))
    assert both.cap(NAT.parse("{0,1,2,3}")) == 1 + Fraction(1, 3) + Fraction(1, 9)
    with pytest.raises(ConfigError):
        union(Accumulating(LEB), Accumulating(LEB))
    with pytest.raises(ConfigError):
        periodic_set(LEB, Fraction(1), IV.parse("[0,2)"), "bad")


def test_bounded_unions_have_exact_totals():
    sets = finite_sets(LEB)
    # [0,1/3) overlaps the first accumulating piece [0,1/4)
    assert sets["union([0,1/3),accumulating)"].total() == Fraction(1, 3) + Fraction(1, 3) - Fraction(1, 4)
