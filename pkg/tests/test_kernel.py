from fractions import Fraction
from itertools import count

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cmeasure.kernel import (
    DomainError,
    NameStream,
    cantor_pair,
    cantor_unpair,
    dovetail,
    empty_stream,
    fairness_bound,
    first_emission,
    interleave,
    list_name,
    nat_value,
    nat_word,
    omega_tuple,
    pair_word_stream,
    project,
    rat_value,
    rat_word,
    rational_at,
    rational_index,
    repeat_forever,
    scan_wrapped,
    semi_decide,
    stream_of,
    symbols_of,
    tuple_words,
    unpair3,
    untuple,
    unwrap,
    wrap,
)

words = st.text(alphabet="01", max_size=6)


def wrap_by_formula(w):
    # iota(a1...ak) = 110 0a1 0a2 ... 0ak 011, spelled out
    out = "110"
    for a in w:
        out += "0" + a
    return out + "011"


# -- wrapping ---------------------------------------------------------------------


@pytest.mark.parametrize("w, expected", [("", "110011"), ("0", "11000011"), ("10", "1100100011")])
def test_wrap_examples(w, expected):
    assert wrap(w) == expected == wrap_by_formula(w)


def test_wrap_rejects_foreign_symbols():
    with pytest.raises(DomainError):
        wrap("012")


def test_scan_examples():
    assert scan_wrapped(wrap("0") + wrap("1")) == ["0", "1"]
    assert scan_wrapped("110011") == [""]
    assert scan_wrapped("0101") == []


def test_scan_skips_garbage_between_units():
    assert scan_wrapped("0" + wrap("1") + "1010" + wrap("01")) == ["1", "01"]


@given(st.lists(words, max_size=6))
def test_wrap_scan_round_trip(ws):
    assert scan_wrapped("".join(wrap(w) for w in ws)) == ws


@given(st.lists(st.text(alphabet="01/", max_size=6), max_size=5))
def test_tuple_round_trip(ws):
    assert untuple(tuple_words(*ws)) == ws


def test_tuple_is_concatenated_wraps():
    assert tuple_words("0", "1") == wrap("0") + wrap("1")


def test_unwrap_rejects_partial_words():
    with pytest.raises(DomainError):
        unwrap(wrap("01") + "0")


# -- notations ------------------------------------------------------------------------


@given(st.integers(min_value=0, max_value=10**12))
def test_nat_round_trip(n):
    assert nat_value(nat_word(n)) == n


def test_nat_rejects_leading_zero():
    with pytest.raises(DomainError):
        nat_value("01")


@given(st.fractions())
def test_rat_round_trip(q):
    assert rat_value(rat_word(q)) == q


@pytest.mark.parametrize("w", ["0/1", "010/110", "10/1", "01/0", "0"])
def test_rat_rejects_non_canonical(w):
    # 0/1 is too short, 2/6 is unreduced, "-0", zero denominator, no separator
    with pytest.raises(DomainError):
        rat_value(w)


def test_rational_enumeration_is_a_bijection_on_a_range():
    seen = [rational_at(i) for i in range(2000)]
    assert len(set(seen)) == len(seen)
    assert all(rational_index(q) == i for i, q in enumerate(seen))
    assert seen[:5] == [0, 1, -1, Fraction(1, 2), Fraction(-1, 2)]
    # every height below p + q contributes a rational, so the index is at least p + q - 1
    assert all(i >= abs(q.numerator) + q.denominator - 1 for i, q in enumerate(seen))


# -- pairing -----------------------------------------------------------------------------


def test_pair_examples():
    assert cantor_pair(0, 0) == 0
    assert all(cantor_unpair(cantor_pair(i, j)) == (i, j) for i in range(100) for j in range(100))
    codes = {cantor_pair(i, j) for i in range(51) for j in range(51)}
    assert len(codes) == 51 * 51


def test_unpair_is_onto_an_initial_segment():
    assert sorted(cantor_pair(*cantor_unpair(n)) for n in range(5000)) == list(range(5000))
    assert all(cantor_pair(*unpair3(n)[:2]) == cantor_unpair(n)[0] for n in range(500))


# -- streams ---------------------------------------------------------------------------------


def counter_stream():
    def machine():
        for t in count(1):
            yield list(range(t % 3))

    return NameStream(machine, "counter")


@settings(max_examples=50)
@given(st.integers(0, 200), st.integers(0, 200))
def test_prefix_monotone_and_replayable(a, b):
    n, m = sorted((a, b))
    p = counter_stream()
    assert p.prefix(m)[: len(p.prefix(n))] == p.prefix(n)
    assert counter_stream().prefix(m) == p.prefix(m)


def test_cursor_reads_each_item_once():
    p = counter_stream()
    cur = p.cursor()
    got = cur.take(5) + cur.take(5) + cur.take(9)
    assert tuple(got) == p.prefix(9)


def test_finite_streams():
    assert stream_of("abc").prefix(2) == ("a", "b")
    assert stream_of("abc").prefix(50) == ("a", "b", "c")
    assert empty_stream().prefix(100) == ()
    assert repeat_forever([1, 2]).prefix(5) == (1, 2, 1, 2, 1)


def test_empty_predicate_gives_empty_list():
    p = semi_decide(lambda i: i, lambda x, k: False)
    assert p.prefix(300) == ()


def test_single_true_candidate_appears():
    p = semi_decide(lambda i: i, lambda x, k: x == 7 and k >= 3)
    assert p.prefix(200) == (7,)


def test_dovetail_is_the_union_of_its_tasks():
    def evens():
        for n in count():
            yield [2 * n]

    def threes():
        for n in count():
            yield [3 * n]

    got = set(dovetail([evens, threes]).prefix(10_000))
    assert {x for x in got if x < 1000} == {x for x in range(1000) if x % 2 == 0 or x % 3 == 0}


def test_dovetail_fairness_bound():
    # task i emits (i, k) at its k-th step; (i, k) must appear by fairness_bound(i + k)
    def task(i):
        for k in count():
            yield [(i, k)]

    p = list_name(task)
    for i in range(8):
        for k in range(8):
            hit = first_emission(p, (i, k), 10_000)
            assert hit is not None and hit.step <= fairness_bound(i + k) * 2


def test_dovetail_finite_family_terminates():
    p = dovetail([lambda: iter([[1], [2]]), lambda: iter([[3]])])
    assert sorted(p.prefix(100)) == [1, 2, 3]


def test_interleave_alternates():
    p0, p1 = repeat_forever("a"), repeat_forever("b")
    q = interleave(p0, p1).prefix(10)
    assert "".join(q[:6]) == "ababab"


def test_omega_tuple_projection_recovers_members():
    fam = lambda i: repeat_forever([f"{i}:{j}" for j in range(5)])  # noqa: E731
    q = omega_tuple(fam)
    for i in range(4):
        got = project(q, i).prefix(400)
        assert len(got) >= 5
        assert list(got) == list(fam(i).prefix(len(got)))


def test_pair_word_stream_starts_with_the_wrapped_word():
    p = pair_word_stream("01", stream_of("xyz"))
    pre = p.prefix(10)
    assert "".join(pre[: len(wrap("01"))]) == wrap("01")
    assert pre[len(wrap("01")):] == ("x", "y", "z")


def test_symbol_stream_scans_back_to_tokens():
    toks = stream_of(["0", "11", "10"])
    wire = symbols_of(toks, lambda t: t)
    assert scan_wrapped(wire, 10) == ["0", "11", "10"]
    with pytest.raises(ValueError):
        scan_wrapped(wire)
