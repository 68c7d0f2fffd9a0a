"""Small, fast versions of the main checks, for ``cmeasure selftest``."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Callable, Iterator

from . import msets, oracles
from .degrees import ce_oracle_for_decidable, en_of_decidable, first_elements
from .measure import lebesgue_measure, nat3_measure, nat3_probability, total_measure_lower
from .metric import e_inverse, e_transfer, limit_bounds_suite, make_xi, random_cauchy_sequence, xi_to_xiplus, xiplus_to_xiC
from .reals import best_lower


def _totals() -> tuple[bool, str]:
    out = []
    ok = True
    for m, target in ((nat3_measure(), Fraction(3, 2)), (nat3_probability(), Fraction(1))):
        got = best_lower(total_measure_lower(m), 4096)
        ok &= got >= target - Fraction(1, 1 << 20) and got < target
        out.append(f"{m.label}:{float(got):.9f}")
    return ok, " ".join(out)


def _sym_diff() -> tuple[bool, str]:
    rng = random.Random(0)
    m = lebesgue_measure()
    sp = m.space
    mu = lambda r: m.approx(r)[0]  # noqa: E731

    def rand():
        parts = []
        for _ in range(rng.randint(0, 3)):
            a = Fraction(rng.randrange(0, 16), 4)
            parts.append((a, a + Fraction(rng.randrange(1, 8), 4)))
        return sp.make(parts)

    for _ in range(100):
        a, b, c = rand(), rand(), rand()
        if mu(sp.sym_diff(a, c)) > mu(sp.sym_diff(a, b)) + mu(sp.sym_diff(b, c)):
            return False, "triangle inequality"
        if abs(mu(a) - mu(b)) > mu(sp.sym_diff(a, b)):
            return False, "|mu(A) - mu(B)| <= mu(A sym B)"
    return True, "100 triples"


def _transfer() -> tuple[bool, str]:
    rng = random.Random(1)
    for _ in range(200):
        x = Fraction(rng.randrange(0, 10_000), rng.randrange(1, 1000))
        if e_transfer(x) > x:
            return False, f"e({x})"
        y = Fraction(rng.randrange(0, 501), 1000)
        if e_inverse(y) > 2 * y:
            return False, f"e^-1({y})"
    return e_inverse(Fraction(1, 2)) == 1, "e^-1(1/2) = 1"


def _soundness() -> tuple[bool, str]:
    m = nat3_measure()
    a = oracles.evens(m)
    p = msets.make_zeta(a.oracle(), "both")
    q = msets.complement(p)
    comp = oracles.complement(a)
    n = 0
    for tok in q.stream.prefix(300):
        key, lo, hi = msets.token_view("both", tok)
        if not lo < comp.cap(key) < hi:
            return False, f"unsound token {tok!r}"
        n += 1
    return n > 0, f"{n} complement tokens checked"


def _cauchy() -> tuple[bool, str]:
    m = nat3_measure()
    a = oracles.odds(m)
    ws = xiplus_to_xiC(xi_to_xiplus(make_xi(a))).words(8, 1 << 12)
    ok = all(a.total() + m.approx(w)[0] - 2 * a.cap(w) <= Fraction(1, 1 << i) for i, w in enumerate(ws))
    return ok, f"{len(ws)} words"


def _limits() -> tuple[bool, str]:
    rng = random.Random(2)
    n = 0
    for m in (nat3_measure(), lebesgue_measure()):
        for _ in range(20):
            rep = limit_bounds_suite(random_cauchy_sequence(m, 6, rng), m)
            if not rep.ok:
                return False, rep.failures()[0].claim
            n += len(rep.checks)
    return True, f"{n} finite-stage checks"


def _ce() -> tuple[bool, str]:
    dec = lambda k: k % 2 == 0  # noqa: E731
    got = first_elements(ce_oracle_for_decidable(dec)(en_of_decidable(dec)), 20)
    return got == list(range(1, 40, 2)), "evens -> odds"


CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("weighted totals", _totals),
    ("symmetric difference", _sym_diff),
    ("e transfer", _transfer),
    ("complement soundness", _soundness),
    ("Cauchy modulus", _cauchy),
    ("limit bounds", _limits),
    ("complement of enumeration", _ce),
]


def run_selftest(quick: bool = True) -> Iterator[tuple[str, bool, str]]:
    for name, check in CHECKS:
        try:
            ok, detail = check()
        except Exception as exc:  # a crash is a failed check, reported with its message
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        yield name, ok, detail
