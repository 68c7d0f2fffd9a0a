import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmeasure.algebra import build_majorising_partition, interval_ring, nat_fin_ring
from cmeasure.kernel import DomainError, nat_word, tuple_words
from cmeasure.measure import lebesgue_measure, nat3_measure

NAT = nat_fin_ring()
IV = interval_ring()

nat_sets = st.frozensets(st.integers(0, 12), max_size=6).map(NAT.make)


@st.composite
def interval_sets(draw):
    parts = []
    for _ in range(draw(st.integers(0, 3))):
        a = Fraction(draw(st.integers(0, 16)), 4)
        parts.append((a, a + Fraction(draw(st.integers(1, 8)), 4)))
    return IV.make(parts)


SPACES = [(NAT, nat_sets), (IV, interval_sets())]


def laws_hold(sp, a, b, c):
    sd, u, i, d = sp.sym_diff, sp.union, sp.intersect, sp.diff
    assert sd(a, b) == sd(b, a)  # commutative
    assert sd(sd(a, b), c) == sd(a, sd(b, c))  # associative
    assert sp.subset(sd(a, b), u(sd(a, c), sd(c, b)))  # triangle inclusion
    assert u(a, b) == u(i(a, b), sd(a, b)) and sp.disjoint(i(a, b), sd(a, b))  # disjoint decomposition
    assert sp.subset(a, u(b, sd(a, b)))  # A inside B plus the difference
    assert i(sd(a, b), c) == sd(i(a, c), i(b, c)) == sd(d(c, a), d(c, b))  # intersection distributes


@pytest.mark.parametrize("sp, strat", SPACES, ids=["natfin", "interval"])
def test_symmetric_difference_laws(sp, strat):
    @given(strat, strat, strat)
    def check(a, b, c):
        laws_hold(sp, a, b, c)

    check()


@pytest.mark.parametrize("sp, strat", SPACES, ids=["natfin", "interval"])
def test_union_of_differences_covers_difference_of_unions(sp, strat):
    # differences of unions, finite families
    @given(st.lists(st.tuples(strat, strat), min_size=1, max_size=4))
    def check(pairs):
        left = sp.sym_diff(sp.union_all(a for a, _ in pairs), sp.union_all(b for _, b in pairs))
        assert sp.subset(left, sp.union_all(sp.sym_diff(a, b) for a, b in pairs))

    check()


@pytest.mark.parametrize("sp, strat", SPACES, ids=["natfin", "interval"])
def test_canonical_form_is_idempotent(sp, strat):
    @given(strat)
    def check(r):
        assert sp.make(r.form) == r
        assert sp.element(r.word) == r
        assert sp.parse(sp.show(r)) == r

    check()


# -- ring examples ------------------------------------------------------------------


def test_interval_examples():
    assert IV.union(IV.parse("[0,1/2)"), IV.parse("[1/4,3/4)")) == IV.parse("[0,3/4)")
    sd = IV.sym_diff(IV.parse("[0,1/3)"), IV.parse("[1/4,1/2)"))
    assert sd == IV.parse("[0,1/4)+[1/3,1/2)")
    assert lebesgue_measure().approx(sd)[0] == Fraction(5, 12)
    assert IV.make([(0, Fraction(1, 2)), (Fraction(1, 2), 1)]) == IV.parse("[0,1)")
    assert IV.diff(IV.parse("[0,2)"), IV.parse("[1,3)")) == IV.parse("[0,1)")
    assert IV.make([(1, 1)]) == IV.empty


def test_nat_examples():
    r = NAT.parse("{0,2,5}")
    assert NAT.element(r.word) == r and r.form == (0, 2, 5)
    assert NAT.diff(NAT.parse("{1,3}"), NAT.parse("{3,5}")) == NAT.parse("{1}")
    assert NAT.union(NAT.parse("{0}"), NAT.parse("{1}")) == NAT.parse("{0,1}")
    assert NAT.diff(r, r) == NAT.empty


def test_domain_decider_rejects_non_canonical_words():
    unsorted = tuple_words(nat_word(2), nat_word(1))
    assert not NAT.in_domain(unsorted)
    with pytest.raises(DomainError):
        NAT.element(unsorted)
    with pytest.raises(DomainError):
        IV.parse("[1,0)")
    with pytest.raises(DomainError):
        IV.parse("[0,1")


@pytest.mark.parametrize("sp", [NAT, IV], ids=["natfin", "interval"])
def test_numbering_is_a_bijection_on_a_range(sp):
    elems = [sp.numbering(i) for i in range(1000)]
    assert len({e.word for e in elems}) == 1000
    assert all(sp.index(e) == i for i, e in enumerate(elems))
    assert sp.in_domain(sp.numbering(0).word)


@pytest.mark.parametrize("sp, strat", SPACES, ids=["natfin", "interval"])
def test_index_inverts_numbering(sp, strat):
    @given(strat)
    def check(r):
        assert sp.numbering(sp.index(r)) == r

    check()


def test_carrier_is_covered_by_the_ring():
    # every sampled point of N and of [0, oo) lies in some listed ring element
    for x in range(50):
        assert NAT.contains(NAT.cover(x), x)
    rng = random.Random(5)
    for _ in range(100):
        x = Fraction(rng.randrange(0, 10_000), rng.randrange(1, 100))
        n = int(x) + 1
        assert IV.contains(IV.key(8 * n * n + 1), x)  # the cover [0, n + 1)


def test_key_schedule_reaches_every_numbered_element():
    for sp in (NAT, IV):
        assert all(sp.key(sp.key_position(sp.numbering(i))) == sp.numbering(i) for i in range(200))


# -- partitions -----------------------------------------------------------------------


def partition_invariants(part, measure, n, ws):
    sp = part.space
    pieces = [part.piece(i) for i in range(n + 1)]
    for i in range(len(pieces)):
        assert measure.approx(pieces[i])[0] < float("inf")
        for j in range(i):
            assert sp.disjoint(pieces[i], pieces[j])
    for w in ws:
        assert sp.subset(w, sp.union_all(part.piece(i) for i in range(part.g_prime(w) + 1)))


@pytest.mark.parametrize("m", [nat3_measure(), lebesgue_measure()], ids=["natfin", "interval"])
def test_majorising_partition_from_numbering(m):
    sp = m.space
    part = build_majorising_partition(sp)
    assert part.majorising
    for n in range(31):
        assert sp.union_all(part.piece(i) for i in range(n + 1)) == sp.union_all(
            sp.numbering(i) for i in range(n + 1))
        assert sp.subset(sp.numbering(n), sp.union_all(part.piece(i) for i in range(n + 1)))
    rng = random.Random(7)
    partition_invariants(part, m, 30, [sp.numbering(rng.randrange(0, 2000)) for _ in range(100)])


@pytest.mark.parametrize("sp, strat", SPACES, ids=["natfin", "interval"])
def test_natural_partitions_are_majorising(sp, strat):
    part = sp.natural_partition()
    m = nat3_measure() if sp is NAT else lebesgue_measure()

    @given(st.lists(strat, max_size=10))
    def check(ws):
        partition_invariants(part, m, 20, ws)

    check()
