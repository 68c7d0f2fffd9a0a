"""Translator cases for the soundness/completeness protocol.

Each case is a name produced by one translator from a test set, paired with
the exact value its tokens bound (see :mod:`protocol`).
"""

from __future__ import annotations

from cmeasure import msets, oracles
from cmeasure.degrees import en_of_decidable
from cmeasure.measure import lebesgue_measure, nat3_measure
from protocol import value_of

MEASURES = {"nat3": nat3_measure, "lebesgue": lebesgue_measure}


def restriction_window(sp):
    return sp.parse("{0,1,2,5}") if sp.name == "natfin" else sp.parse("[0,1/2)+[1,3/2)")


def translator_cases(m, a: oracles.ExactSet) -> dict:
    sp = m.space
    part = sp.natural_partition()
    g = restriction_window(sp)
    o = a.oracle()
    comp = oracles.complement(a)
    both = msets.make_zeta(o, "both")
    plus = msets.make_zeta(o, "plus")
    minus = msets.make_zeta(o, "minus")
    lo, up = msets.zeta_split(both)
    bar = msets.zeta_to_zetabar(both, part)  # shared: names are replayable, so reading it twice is free
    cases = {
        "make_plus": (plus, value_of("plus", a.cap, m)),
        "make_minus": (minus, value_of("minus", a.cap, m)),
        "make_both": (both, value_of("both", a.cap, m)),
        "split_lower": (lo, value_of("plus", a.cap, m)),
        "split_upper": (up, value_of("minus", a.cap, m)),
        "meet": (msets.zeta_meet(plus, minus), value_of("both", a.cap, m)),
        "complement_plus": (msets.complement(plus), value_of("minus", comp.cap, m)),
        "complement_minus": (msets.complement(minus), value_of("plus", comp.cap, m)),
        "complement_both": (msets.complement(both), value_of("both", comp.cap, m)),
        "to_primed": (msets.to_primed(both), value_of("pboth", a.cap, m)),
        "from_primed": (msets.from_primed(msets.to_primed(plus)), value_of("plus", a.cap, m)),
        "primed_as_complement": (msets.primed_as_complement(msets.to_primed(minus)),
                                 value_of("plus", comp.cap, m)),
        "restrict": (msets.restrict(both, g), value_of("both", lambda r: a.cap(sp.intersect(r, g)), m)),
        "to_bar": (bar, value_of("bboth", a.cap, m, part)),
        "from_bar": (msets.zetabar_to_zeta(bar), value_of("both", a.cap, m)),
    }
    if sp.name == "natfin":
        cases["from_enumeration"] = (msets.from_enumeration(en_of_decidable(a.decider()), m),
                                     value_of("plus", a.cap, m))
    return cases
