import re
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cmeasure import msets
from cmeasure.degrees import (
    EnName,
    ce_oracle_for_decidable,
    ce_tokens_box,
    ce_via_idpm,
    contract_holds,
    en_from_bits,
    en_from_elements,
    en_of_decidable,
    first_elements,
    idp0_oracle,
    idp0_via_idpm,
    idpm_oracle,
    idpm_via_ce,
    idpm_via_idp0,
    token_at,
    token_index,
    weihrauch_apply,
    word_at,
    word_number,
)
from cmeasure.kernel import InconsistentNames, NameStream, PreconditionError
from cmeasure.measure import nat3_measure
from cmeasure.oracles import nat_finite, standard_sets
from cmeasure.reals import best_upper
from protocol import is_true, value_of

NAT3 = nat3_measure()
NAT = NAT3.space
SETS = standard_sets(NAT3)
DECIDABLE = ["evens", "odds", "{0,2}", "N", "empty"]


def members_by_regex(bits, limit):
    # reference reading of an En prefix: n is listed iff 0 1^(n+1) 0 occurs
    return {n for n in range(limit) if re.search("0" + "1" * (n + 1) + "0", bits)}


# -- enumeration names -----------------------------------------------------------------------


def test_bit_prefix_matches_subword_reading():
    e = en_from_elements([3, 0, 7, 3])
    bits = e.bits(10)
    assert bits.startswith("011110" + "010" + "0" + "1" * 8 + "0")
    assert set(e.elements(10)) == members_by_regex(bits, 20) == {0, 3, 7}


@given(st.text(alphabet="01", max_size=60))
def test_raw_bits_scan_like_the_regex(bits):
    e = en_from_bits(bits)
    assert set(e.elements(len(bits) + 2)) == members_by_regex(bits + "0", 60)


def test_decidable_enumeration():
    e = en_of_decidable(lambda n: n % 3 == 0)
    assert first_elements(e, 5) == [0, 3, 6, 9, 12]
    assert contract_holds(lambda: en_of_decidable(lambda n: n % 3 == 0).stream, [1, 5, 50, 200])


def test_bad_symbols_are_rejected():
    e = EnName(NameStream(lambda: iter([["0"], ["2"]]), "bad"))
    with pytest.raises(PreconditionError):
        e.elements(5)


# -- the word numbering ---------------------------------------------------------------------------


@pytest.mark.parametrize("w, n", [("", 0), ("0", 1), ("1", 2), ("/", 3), ("00", 4), ("//", 12), ("000", 13)])
def test_word_numbering_examples(w, n):
    assert word_number(w) == n and word_at(n) == w


def test_word_numbering_is_a_bijection_on_a_range():
    assert [word_number(word_at(n)) for n in range(2000)] == list(range(2000))


@given(st.text(alphabet="01/", max_size=40))
def test_word_numbering_round_trip(w):
    assert word_at(word_number(w)) == w


def test_token_numbers_decode():
    r = NAT.parse("{0,2}")
    n = token_index(NAT, Fraction(1, 3), r)
    assert token_at(NAT, n) == (Fraction(1, 3), r)
    assert token_at(NAT, 5) is None  # "01" is not a token


# -- CE relative to a decider -------------------------------------------------------------------


def test_ce_examples():
    ce = ce_oracle_for_decidable(lambda n: n % 2 == 0)
    assert first_elements(ce(en_of_decidable(lambda n: n % 2 == 0)), 20) == [2 * i + 1 for i in range(20)]
    everything = ce_oracle_for_decidable(lambda n: False)(en_from_elements([]))
    assert first_elements(everything, 20) == list(range(20))
    assert ce.supplier == "decider"


def test_ce_twice_is_the_identity_on_prefixes():
    evens = lambda n: n % 2 == 0  # noqa: E731
    odds = lambda n: n % 2 == 1  # noqa: E731
    twice = ce_oracle_for_decidable(odds)(ce_oracle_for_decidable(evens)(en_of_decidable(evens)))
    assert first_elements(twice, 20) == [2 * i for i in range(20)]


def test_ce_notices_inconsistent_input():
    ce = ce_oracle_for_decidable(lambda n: n % 2 == 0)
    with pytest.raises(InconsistentNames):
        ce(en_from_elements([1])).elements(10)


# -- the two pipelines -----------------------------------------------------------------------------


@pytest.mark.parametrize("label", DECIDABLE)
def test_ce_via_plus_to_minus_matches_the_decider(label):
    a = SETS[label]
    f2 = idpm_oracle(a.oracle())
    got = first_elements(ce_via_idpm(f2, en_of_decidable(a.decider()), NAT3), 20, 1 << 13)
    want = first_elements(ce_oracle_for_decidable(a.decider())(en_of_decidable(a.decider())), 20)
    assert sorted(got) == want


def test_ce_via_plus_to_minus_on_a_finite_set():
    a = nat_finite(NAT3, [0, 2])
    got = first_elements(ce_via_idpm(idpm_oracle(a.oracle()), en_of_decidable(a.decider()), NAT3), 20, 1 << 13)
    assert 0 not in got and 2 not in got and set(range(3, 21)) | {1} <= set(got) | set(range(21, 100))


@pytest.mark.parametrize("label", ["{0,2}", "{1,3,4}", "evens", "empty", "N"])
def test_plus_to_minus_via_ce_tracks_the_oracle(label):
    a = SETS[label]
    minus = idpm_via_ce(ce_tokens_box(a), msets.make_zeta_plus(a.oracle()))
    value = value_of("minus", a.cap, NAT3)
    pre = minus.prefix(3000)
    assert all(is_true("minus", t, value) for t in pre)
    for r in (NAT.parse("{0,1,2}"), NAT.parse("{2,3,4}"), NAT.parse("{0}")):
        hi = best_upper(msets.measure_cap_upper(minus, r), 3000)
        assert a.cap(r) < hi <= a.cap(r) + Fraction(1, 1 << 10)


def test_plus_to_minus_via_ce_on_the_whole_space():
    # (v, w) is listed iff mu(v) < w
    a = SETS["N"]
    minus = idpm_via_ce(ce_tokens_box(a), msets.make_zeta_plus(a.oracle()))
    for r, w in minus.prefix(2000):
        assert NAT3.approx(r)[0] < w


def test_meet_and_split_through_oracle_boxes():
    a = SETS["{1,3,4}"]
    p = msets.make_zeta_plus(a.oracle())
    both = idp0_via_idpm(idpm_oracle(a.oracle()), p)
    value = value_of("both", a.cap, NAT3)
    assert all(is_true("both", t, value) for t in both.prefix(2000))
    minus = idpm_via_idp0(idp0_oracle(a.oracle()), p)
    value = value_of("minus", a.cap, NAT3)
    assert minus.kind == "minus" and all(is_true("minus", t, value) for t in minus.prefix(2000))


def test_identity_composition():
    p = en_of_decidable(lambda n: n % 5 == 0).stream
    ident = lambda x: x  # noqa: E731
    assert weihrauch_apply(ident, ident, ident, p, strong=True) is p
    assert weihrauch_apply(ident, lambda _p, q: q, ident, p) is p


def test_pipelines_keep_the_stream_contract():
    a = SETS["evens"]

    def make():
        return ce_via_idpm(idpm_oracle(a.oracle()), en_of_decidable(a.decider()), NAT3).stream

    assert contract_holds(make, [1, 10, 100, 400])
