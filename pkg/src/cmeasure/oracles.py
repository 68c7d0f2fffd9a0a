"""Measurable sets with exact reference semantics, and the bound oracles built from them.

Every set here can report mu(R n A) exactly for any ring element R, which is
what the tests use as ground truth.  Names are never built from these exact
values directly; they go through :class:`BoundOracle`, which only promises
converging rational bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import ceil, gcd
from typing import Callable

from .algebra import RingWord
from .kernel import ConfigError
from .measure import ComputableMeasure
from .reals import POS_INF

Bounds = Callable[[RingWord, int], Fraction]


@dataclass
class BoundOracle:
    """A class [A] given by converging bounds of mu(R n A); either side may be missing."""

    measure: ComputableMeasure
    lower: Bounds | None
    upper: Bounds | None
    label: str = "A"

    @property
    def space(self):
        return self.measure.space


class ExactSet:
    """Base class: ``cap(R)`` is mu(R n A) exactly; ``total()`` is mu(A) (possibly inf or None if unknown)."""

    label = "A"

    def __init__(self, measure: ComputableMeasure):
        self.measure = measure
        self.space = measure.space
        self._caps: dict[str, Fraction] = {}

    def _cap(self, r: RingWord) -> Fraction:
        raise NotImplementedError

    def cap(self, r: RingWord) -> Fraction:
        got = self._caps.get(r.word)
        if got is None:
            got = self._caps[r.word] = self._cap(self.space.check(r))
        return got

    def diff_measure(self, r: RingWord) -> Fraction:
        """mu(R minus A)."""
        return self.measure.approx(r)[0] - self.cap(r)

    def total(self):
        return None

    def series_bounds(self, r: RingWord, k: int) -> tuple[Fraction, Fraction]:
        """Bounds a name-maker is allowed to see; exact by default."""
        c = self.cap(r)
        return c, c

    def oracle(self, lower: bool = True, upper: bool = True) -> BoundOracle:
        return BoundOracle(self.measure,
                           (lambda r, k: self.series_bounds(r, k)[0]) if lower else None,
                           (lambda r, k: self.series_bounds(r, k)[1]) if upper else None,
                           self.label)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.label})"


# -- subsets of N -----------------------------------------------------------------

class NatSet(ExactSet):
    """Eventually periodic subset of N: membership of n < start from ``head``, then ``pattern`` repeats."""

    def __init__(self, measure: ComputableMeasure, head: tuple[bool, ...], pattern: tuple[bool, ...], label: str):
        super().__init__(measure)
        if not pattern:
            raise ConfigError("empty period")
        self.head = tuple(head)
        self.pattern = tuple(pattern)
        self.label = label

    def __contains__(self, n: int) -> bool:
        if n < len(self.head):
            return self.head[n]
        return self.pattern[(n - len(self.head)) % len(self.pattern)]

    def decider(self) -> Callable[[int], bool]:
        return lambda n: n in self

    def _cap(self, r: RingWord) -> Fraction:
        return self.measure.approx(self.space.make(n for n in r.form if n in self))[0]

    def elements(self, limit: int) -> list[int]:
        return [n for n in range(limit) if n in self]

    def total(self):
        start, p = len(self.head), len(self.pattern)
        base = getattr(self.measure, "base", None)
        if base is None:
            return None
        scale = self.measure.scale
        s = sum((Fraction(1, base**n) for n in range(start) if self.head[n]), Fraction(0))
        ratio = Fraction(1, base**p)
        per = sum((Fraction(1, base ** (start + r)) for r in range(p) if self.pattern[r]), Fraction(0))
        return scale * (s + per / (1 - ratio))

    def complement(self) -> "NatSet":
        return NatSet(self.measure, tuple(not b for b in self.head), tuple(not b for b in self.pattern),
                      f"complement({self.label})")

    def _combine(self, other: "NatSet", op: Callable[[bool, bool], bool], name: str) -> "NatSet":
        start = max(len(self.head), len(other.head))
        p = len(self.pattern) * len(other.pattern) // gcd(len(self.pattern), len(other.pattern))
        head = tuple(op(n in self, n in other) for n in range(start))
        pattern = tuple(op(n in self, n in other) for n in range(start, start + p))
        return NatSet(self.measure, head, pattern, f"{name}({self.label},{other.label})")

    def union(self, other: "NatSet") -> "NatSet":
        return self._combine(other, lambda a, b: a or b, "union")

    def intersect(self, other: "NatSet") -> "NatSet":
        return self._combine(other, lambda a, b: a and b, "intersect")


def nat_finite(measure: ComputableMeasure, elems, label: str | None = None) -> NatSet:
    elems = sorted(set(elems))
    top = elems[-1] + 1 if elems else 0
    return NatSet(measure, tuple(n in elems for n in range(top)), (False,),
                  label or "{" + ",".join(map(str, elems)) + "}")


def nat_residues(measure: ComputableMeasure, period: int, residues, label: str) -> NatSet:
    rs = set(residues)
    return NatSet(measure, (), tuple(r in rs for r in range(period)), label)


def evens(measure: ComputableMeasure) -> NatSet:
    return nat_residues(measure, 2, {0}, "evens")


def odds(measure: ComputableMeasure) -> NatSet:
    return nat_residues(measure, 2, {1}, "odds")


def everything(measure: ComputableMeasure) -> NatSet:
    return NatSet(measure, (), (True,), "N")


def nothing(measure: ComputableMeasure) -> NatSet:
    return NatSet(measure, (), (False,), "empty")


# -- subsets of [0, oo) -------------------------------------------------------------

class LocalSet(ExactSet):
    """Locally finite union of intervals: ``window(M)`` is A n [0, M) as a ring element."""

    def __init__(self, measure: ComputableMeasure, window: Callable[[Fraction], RingWord], label: str,
                 total=None, extent: RingWord | None = None):
        super().__init__(measure)
        self.window = window
        self.label = label
        self._total = total
        self.extent = extent  # the whole set, when it is a ring element

    def _cap(self, r: RingWord) -> Fraction:
        if not r.form:
            return Fraction(0)
        return self.measure.approx(self.space.intersect(r, self.window(r.form[-1][1])))[0]

    def total(self):
        return self._total

    def complement(self) -> "LocalSet":
        sp = self.space
        tot = None
        if self._total is not None:
            tot = POS_INF if self._total != POS_INF else None
        return LocalSet(self.measure, lambda m: sp.diff(sp.make([(0, m)]), self.window(m)),
                        f"complement({self.label})", tot)


def interval_set(measure: ComputableMeasure, r: RingWord, label: str | None = None) -> LocalSet:
    sp = measure.space
    return LocalSet(measure, lambda m: sp.intersect(r, sp.make([(0, m)])), label or sp.show(r),
                    measure.approx(r)[0], r)


def periodic_set(measure: ComputableMeasure, period: Fraction, cell: RingWord, label: str) -> LocalSet:
    """Union over n of n*period + cell, with cell inside [0, period)."""
    sp = measure.space
    period = Fraction(period)
    if cell.form and cell.form[-1][1] > period:
        raise ConfigError("cell leaves [0, period)")

    def window(m: Fraction) -> RingWord:
        copies = ceil(Fraction(m) / period) + 1
        parts = [(n * period + a, n * period + b) for n in range(copies) for a, b in cell.form]
        return sp.intersect(sp.make(parts), sp.make([(0, m)]))

    return LocalSet(measure, window, label, POS_INF if cell.form else Fraction(0))


class Accumulating(ExactSet):
    """Union over n >= 1 of [1 - 2^(1-n), 1 - 2^(1-n) + 4^-n): pieces pile up below 1, total 1/3.

    Exact caps use the closed form of the geometric tail; ``series_bounds``
    only sums the first k pieces, so names built from it really approximate.
    """

    label = "accumulating"

    def __init__(self, measure: ComputableMeasure):
        super().__init__(measure)
        self._depths: dict[str, int] = {}

    @staticmethod
    def piece(n: int) -> tuple[Fraction, Fraction]:
        a = 1 - Fraction(2, 1 << n)
        return a, a + Fraction(1, 4**n)

    def _depth(self, r: RingWord) -> int:
        """N such that [1 - 2^(1-N), 1) lies inside r or misses r."""
        got = self._depths.get(r.word)
        if got is not None:
            return got
        n = 1
        for a, b in r.form:
            for x in (a, b):
                if x < 1:
                    while 1 - Fraction(2, 1 << n) <= x:
                        n += 1
        self._depths[r.word] = n
        return n

    def _partial(self, r: RingWord, upto: int) -> Fraction:
        # intervals of r are disjoint and sorted, as are the pieces
        s = Fraction(0)
        for a, b in r.form:
            if a >= 1:
                break
            for n in range(1, upto):
                lo, hi = self.piece(n)
                if lo >= b:
                    break
                if hi > a:
                    s += min(b, hi) - max(a, lo)
        return s

    def _tail_inside(self, r: RingWord, n: int) -> bool:
        return any(a <= 1 - Fraction(2, 1 << n) and b >= 1 for a, b in r.form)

    def _cap(self, r: RingWord) -> Fraction:
        n = self._depth(r)
        s = self._partial(r, n)
        if self._tail_inside(r, n):
            s += Fraction(4, 3) / 4**n
        return s

    def series_bounds(self, r: RingWord, k: int) -> tuple[Fraction, Fraction]:
        n = max(1, k)
        if n + 1 >= self._depth(r):
            c = self.cap(r)
            return c, c
        lo = self._partial(r, n + 1)
        return lo, lo + Fraction(4, 3) / 4 ** (n + 1)

    def total(self):
        return Fraction(1, 3)


class Combined(ExactSet):
    """Union or intersection of a locally finite set with any exact set."""

    def __init__(self, local: LocalSet, other: ExactSet, op: str):
        super().__init__(local.measure)
        self.local, self.other, self.op = local, other, op
        self.label = f"{op}({local.label},{other.label})"

    def _cap(self, r: RingWord) -> Fraction:
        if not r.form:
            return Fraction(0)
        sp = self.space
        lw = sp.intersect(r, self.local.window(r.form[-1][1]))
        inside = self.other.cap(lw)
        if self.op == "intersect":
            return inside
        return self.other.cap(r) + self.measure.approx(lw)[0] - inside

    def series_bounds(self, r: RingWord, k: int) -> tuple[Fraction, Fraction]:
        c = self.cap(r)
        return c, c

    def total(self):
        a, b = self.local.total(), self.other.total()
        if self.op == "union" and POS_INF in (a, b):
            return POS_INF
        r = self.local.extent
        if r is None:
            return None
        if self.op == "intersect":
            return self.other.cap(r)
        if b is None:
            return None
        return b + self.measure.approx(r)[0] - self.other.cap(r)


class Complement(ExactSet):
    def __init__(self, inner: ExactSet):
        super().__init__(inner.measure)
        self.inner = inner
        self.label = f"complement({inner.label})"

    def _cap(self, r: RingWord) -> Fraction:
        return self.measure.approx(r)[0] - self.inner.cap(r)

    def series_bounds(self, r: RingWord, k: int) -> tuple[Fraction, Fraction]:
        lo, hi = self.inner.series_bounds(r, k)
        mu = self.measure.approx(r)[0]
        return mu - hi, mu - lo

    def total(self):
        t = self.inner.total()
        if t is None:
            return None
        whole = self.measure.total_exact
        if whole is None:
            return None
        if whole == POS_INF:
            return POS_INF if t != POS_INF else None
        return whole - t


def complement(s: ExactSet) -> ExactSet:
    if isinstance(s, (NatSet, LocalSet)):
        return s.complement()
    if isinstance(s, Complement):
        return s.inner
    return Complement(s)


def union(a: ExactSet, b: ExactSet) -> ExactSet:
    if isinstance(a, NatSet) and isinstance(b, NatSet):
        return a.union(b)
    if isinstance(a, LocalSet):
        return Combined(a, b, "union")
    if isinstance(b, LocalSet):
        return Combined(b, a, "union")
    raise ConfigError("union needs a locally finite operand")


def intersect(a: ExactSet, b: ExactSet) -> ExactSet:
    if isinstance(a, NatSet) and isinstance(b, NatSet):
        return a.intersect(b)
    if isinstance(a, LocalSet):
        return Combined(a, b, "intersect")
    if isinstance(b, LocalSet):
        return Combined(b, a, "intersect")
    raise ConfigError("intersection needs a locally finite operand")


def union_all(items: list[ExactSet]) -> ExactSet:
    return reduce(union, items)


def standard_sets(measure: ComputableMeasure) -> dict[str, ExactSet]:
    """The exactly oracled sets the test suites run over (at least six per space)."""
    sp = measure.space
    if sp.name == "natfin":
        return {s.label: s for s in [
            nothing(measure),
            everything(measure),
            evens(measure),
            odds(measure),
            nat_finite(measure, [0, 2]),
            nat_finite(measure, [1, 3, 4]),
            nat_residues(measure, 3, {1}, "1 mod 3"),
            complement(nat_finite(measure, [0])),
        ]}
    third = interval_set(measure, sp.parse("[0,1/3)"))
    return {s.label: s for s in [
        interval_set(measure, sp.empty, "empty"),
        third,
        interval_set(measure, sp.parse("[0,1/3)+[1/2,2)")),
        interval_set(measure, sp.parse("[1/4,3/4)")),
        Accumulating(measure),
        periodic_set(measure, Fraction(2), sp.parse("[0,1)"), "stripes"),
        complement(third),
        Combined(third, Accumulating(measure), "union"),
    ]}


def finite_sets(measure: ComputableMeasure) -> dict[str, ExactSet]:
    """Standard sets of finite measure."""
    return {k: s for k, s in standard_sets(measure).items() if s.total() not in (None, POS_INF)}
