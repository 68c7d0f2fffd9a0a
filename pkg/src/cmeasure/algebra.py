"""Notated rings of sets: finite subsets of N and finite unions of half-open rational intervals in [0, oo).

Each ring has a decidable notation, computable union and difference, a
bijective numbering E(i) and a key schedule used by list names.  Partitions
into disjoint ring elements live here too.
"""

from __future__ import annotations

import math
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

from .kernel import (
    DomainError,
    nat_value,
    nat_word,
    nonneg_rational,
    nonneg_rational_index,
    rat_value,
    rat_word,
    tuple_words,
    untuple,
)


@dataclass(frozen=True)
class RingWord:
    """A word in the notation's domain together with its decoded canonical form."""

    space: str
    word: str
    form: tuple = field(compare=False, repr=False)

    def __repr__(self) -> str:
        return f"RingWord({self.space}:{self.form})"


class RingSpace:
    """Common machinery; subclasses supply the canonical form and the numbering."""

    name = "ring"

    def __init__(self) -> None:
        self._ops: dict[tuple, RingWord] = {}
        self._keys: dict[int, RingWord] = {}
        self.empty = self.make(())

    # notation
    def encode(self, form: tuple) -> str:
        raise NotImplementedError

    def decode(self, word: str) -> tuple:
        raise NotImplementedError

    def canonical(self, raw: Any) -> tuple:
        raise NotImplementedError

    def in_domain(self, word: str) -> bool:
        try:
            self.decode(word)
        except DomainError:
            return False
        return True

    def element(self, word: str) -> RingWord:
        return RingWord(self.name, word, self.decode(word))

    def make(self, raw: Any) -> RingWord:
        form = self.canonical(raw)
        return RingWord(self.name, self.encode(form), form)

    def check(self, r: RingWord) -> RingWord:
        if not isinstance(r, RingWord) or r.space != self.name:
            raise DomainError(f"{r!r} is not a word of {self.name}")
        return r

    # operations on canonical forms
    def _union(self, a: tuple, b: tuple) -> tuple:
        raise NotImplementedError

    def _diff(self, a: tuple, b: tuple) -> tuple:
        raise NotImplementedError

    def _cached(self, op: str, a: RingWord, b: RingWord, f: Callable[[tuple, tuple], tuple]) -> RingWord:
        key = (op, a.word, b.word)
        got = self._ops.get(key)
        if got is None:
            self.check(a)
            self.check(b)
            form = f(a.form, b.form)
            got = RingWord(self.name, self.encode(form), form)
            if len(self._ops) > 200_000:
                self._ops.clear()
            self._ops[key] = got
        return got

    def union(self, a: RingWord, b: RingWord) -> RingWord:
        return self._cached("u", a, b, self._union)

    def diff(self, a: RingWord, b: RingWord) -> RingWord:
        return self._cached("d", a, b, self._diff)

    def intersect(self, a: RingWord, b: RingWord) -> RingWord:
        return self.diff(a, self.diff(a, b))

    def sym_diff(self, a: RingWord, b: RingWord) -> RingWord:
        return self.union(self.diff(a, b), self.diff(b, a))

    def union_all(self, items) -> RingWord:
        acc = self.empty
        for r in items:
            acc = self.union(acc, r)
        return acc

    def is_empty(self, a: RingWord) -> bool:
        return a.form == ()

    def subset(self, a: RingWord, b: RingWord) -> bool:
        return self.is_empty(self.diff(a, b))

    def disjoint(self, a: RingWord, b: RingWord) -> bool:
        return self.is_empty(self.intersect(a, b))

    # numbering and schedules
    def numbering(self, i: int) -> RingWord:
        """E(i) = alpha(h(i))."""
        raise NotImplementedError

    def index(self, r: RingWord) -> int:
        """h^-1."""
        raise NotImplementedError

    def cover(self, n: int) -> RingWord:
        """Increasing exhaustion of the carrier."""
        raise NotImplementedError

    def atom(self, n: int) -> RingWord:
        raise NotImplementedError

    def cells(self, level: int) -> list[RingWord]:
        """Disjoint small pieces at a resolution level; finer and wider as the level grows."""
        raise NotImplementedError

    def cell(self, n: int) -> RingWord:
        """The n-th cell when the levels are listed one after another."""
        raise NotImplementedError

    def last_cell(self, level: int) -> int:
        """Largest n such that cell(0..n) contains every cell of the level."""
        raise NotImplementedError

    def key(self, j: int) -> RingWord:
        """Order in which list names visit ring elements.

        Even positions walk the numbering; odd positions alternate between the
        exhaustion, the unit atoms and the cells, so totals, point queries and fine
        approximations become visible at small budgets.  Every ring element
        still occurs (through the numbering).
        """
        got = self._keys.get(j)
        if got is None:
            if j % 2 == 0:
                got = self.numbering(j // 2)
            elif j % 8 == 1:
                got = self.cover(math.isqrt(j // 8))  # covers grow slowly; each one is large
            elif j % 8 == 5:
                got = self.atom(math.isqrt(j // 8))
            else:
                got = self.cell(j // 4)
            if len(self._keys) < 1 << 16:
                self._keys[j] = got
        return got

    def key_position(self, r: RingWord) -> int:
        return 2 * self.index(r)

    def translate(self, r: RingWord, n: int) -> RingWord:
        """r moved n units to the right."""
        raise NotImplementedError

    def local_key(self, i: int, j: int) -> RingWord:
        """Schedule seen from unit i: the numbering as in ``key``; covers, atoms and cells moved i units right."""
        if j % 2 == 0 or i == 0:
            return self.key(j)
        if j % 8 == 1:
            return self.cover(math.isqrt(j // 8) + i)
        if j % 8 == 5:
            return self.atom(math.isqrt(j // 8) + i)
        return self.translate(self.cell(j // 4), i)

    def contains(self, r: RingWord, x: Any) -> bool:
        raise NotImplementedError

    def parse(self, text: str) -> RingWord:
        raise NotImplementedError

    def show(self, r: RingWord) -> str:
        raise NotImplementedError

    def natural_partition(self) -> "PartitionSpec":
        raise NotImplementedError


# -- finite subsets of N ----------------------------------------------------------

class NatFinRing(RingSpace):
    """Finite subsets of N; the notation is the tuple of binary numerals in increasing order."""

    name = "natfin"

    def encode(self, form: tuple) -> str:
        return tuple_words(*(nat_word(n) for n in form))

    def decode(self, word: str) -> tuple:
        form = tuple(nat_value(w) for w in untuple(word))
        if any(a >= b for a, b in zip(form, form[1:])):
            raise DomainError(f"elements not strictly increasing: {form}")
        return form

    def canonical(self, raw: Any) -> tuple:
        out = set()
        for n in raw:
            if not isinstance(n, int) or isinstance(n, bool) or n < 0:
                raise DomainError(f"not a natural number: {n!r}")
            out.add(n)
        return tuple(sorted(out))

    def _union(self, a: tuple, b: tuple) -> tuple:
        return tuple(sorted(set(a) | set(b)))

    def _diff(self, a: tuple, b: tuple) -> tuple:
        sb = set(b)
        return tuple(n for n in a if n not in sb)

    def numbering(self, i: int) -> RingWord:
        if i < 0:
            raise DomainError("negative index")
        return self.make(k for k in range(i.bit_length()) if i >> k & 1)

    def index(self, r: RingWord) -> int:
        self.check(r)
        return sum(1 << n for n in r.form)

    def cover(self, n: int) -> RingWord:
        return self.make(range(n + 1))

    def translate(self, r: RingWord, n: int) -> RingWord:
        return self.make(x + n for x in r.form)

    def atom(self, n: int) -> RingWord:
        return self.make((n,))

    def cells(self, level: int) -> list[RingWord]:
        return [self.atom(n) for n in range(level + 1)]

    def cell(self, n: int) -> RingWord:
        return self.atom(n)

    def last_cell(self, level: int) -> int:
        return level

    def contains(self, r: RingWord, x: Any) -> bool:
        return x in r.form

    def parse(self, text: str) -> RingWord:
        s = text.strip()
        if not (s.startswith("{") and s.endswith("}")):
            raise DomainError(f"expected {{...}} at position 0: {text!r}")
        body = s[1:-1].strip()
        if not body:
            return self.empty
        try:
            return self.make(int(x) for x in body.split(","))
        except ValueError as exc:
            raise DomainError(f"bad natural in {text!r}") from exc

    def show(self, r: RingWord) -> str:
        return "{" + ",".join(str(n) for n in r.form) + "}"

    def natural_partition(self) -> "PartitionSpec":
        return PartitionSpec(self, self.atom, lambda r: max(r.form) if r.form else 0, "singletons")


# -- finite unions of intervals -----------------------------------------------------

def _evil(n: int) -> int:
    """n-th natural with an even number of one bits."""
    return 2 * n + (bin(n).count("1") & 1)


_INTERVAL = re.compile(r"\s*\[\s*([^,\[\]]+?)\s*,\s*([^,\[\]]+?)\s*\)\s*")


class IntervalRing(RingSpace):
    """Finite unions of [a, b) with rational 0 <= a < b; canonical form is sorted, disjoint, non-adjacent.

    The carrier is [0, oo), the union of the ring.  The numbering reads the
    binary digits of the n-th even-weight natural as a finite set of
    endpoints (rationals in size order), which is a bijection onto canonical forms.
    """

    name = "interval"

    def encode(self, form: tuple) -> str:
        return tuple_words(*(rat_word(x) for ab in form for x in ab))

    def decode(self, word: str) -> tuple:
        pts = [rat_value(w) for w in untuple(word)]
        if len(pts) % 2:
            raise DomainError("odd number of endpoints")
        if pts and pts[0] < 0:
            raise DomainError("negative endpoint")
        if any(a >= b for a, b in zip(pts, pts[1:])):
            raise DomainError("endpoints not strictly increasing")
        return tuple((pts[i], pts[i + 1]) for i in range(0, len(pts), 2))

    def canonical(self, raw: Any) -> tuple:
        ivs = []
        for a, b in raw:
            a, b = Fraction(a), Fraction(b)
            if a < 0 or b < 0:
                raise DomainError(f"interval [{a},{b}) leaves [0,oo)")
            if a > b:
                raise DomainError(f"interval [{a},{b}) is reversed")
            if a < b:
                ivs.append((a, b))
        ivs.sort()
        out: list[tuple[Fraction, Fraction]] = []
        for a, b in ivs:
            if out and a <= out[-1][1]:
                if b > out[-1][1]:
                    out[-1] = (out[-1][0], b)
            else:
                out.append((a, b))
        return tuple(out)

    def _union(self, a: tuple, b: tuple) -> tuple:
        return self.canonical(a + b)

    def _diff(self, a: tuple, b: tuple) -> tuple:
        out = []
        j = 0
        for lo, hi in a:
            cur = lo
            while j < len(b) and b[j][1] <= cur:
                j += 1
            k = j
            while k < len(b) and b[k][0] < hi:
                blo, bhi = b[k]
                if blo > cur:
                    out.append((cur, min(blo, hi)))
                cur = max(cur, bhi)
                if cur >= hi:
                    break
                k += 1
            if cur < hi:
                out.append((cur, hi))
        return self.canonical(out)

    def numbering(self, i: int) -> RingWord:
        if i < 0:
            raise DomainError("negative index")
        m = _evil(i)
        pts = sorted(nonneg_rational(k) for k in range(m.bit_length()) if m >> k & 1)
        form = tuple((pts[k], pts[k + 1]) for k in range(0, len(pts), 2))
        return RingWord(self.name, self.encode(form), form)

    def index(self, r: RingWord) -> int:
        self.check(r)
        m = 0
        for a, b in r.form:
            m |= 1 << nonneg_rational_index(a)
            m |= 1 << nonneg_rational_index(b)
        return m >> 1

    def cover(self, n: int) -> RingWord:
        return self.make([(0, n + 1)])

    def translate(self, r: RingWord, n: int) -> RingWord:
        return self.make([(a + n, b + n) for a, b in r.form])

    def atom(self, n: int) -> RingWord:
        return self.make([(n, n + 1)])

    def cells(self, level: int) -> list[RingWord]:
        """Dyadic intervals of width 2^-level covering [0, level + 1)."""
        w = Fraction(1, 1 << level)
        return [self.make([(k * w, (k + 1) * w)]) for k in range((level + 1) << level)]

    def cell(self, n: int) -> RingWord:
        level = 0
        while n >= (level + 1) << level:
            n -= (level + 1) << level
            level += 1
        w = Fraction(1, 1 << level)
        return self.make([(n * w, (n + 1) * w)])

    def last_cell(self, level: int) -> int:
        return sum((lv + 1) << lv for lv in range(level + 1)) - 1

    def contains(self, r: RingWord, x: Any) -> bool:
        return any(a <= x < b for a, b in r.form)

    def parse(self, text: str) -> RingWord:
        s = text.strip()
        if s in ("{}", "empty", ""):
            return self.empty
        parts = []
        pos = 0
        for chunk in s.split("+"):
            m = _INTERVAL.fullmatch(chunk)
            if not m:
                raise DomainError(f"bad interval at position {pos}: {chunk.strip()!r}")
            try:
                parts.append((Fraction(m.group(1)), Fraction(m.group(2))))
            except (ValueError, ZeroDivisionError) as exc:
                raise DomainError(f"bad endpoint at position {pos}: {chunk.strip()!r}") from exc
            pos += len(chunk) + 1
        return self.make(parts)

    def show(self, r: RingWord) -> str:
        if not r.form:
            return "{}"
        return "+".join(f"[{a},{b})" for a, b in r.form)

    def natural_partition(self) -> "PartitionSpec":
        def bound(r: RingWord) -> int:
            return max(0, math.ceil(r.form[-1][1]) - 1) if r.form else 0

        return PartitionSpec(self, self.atom, bound, "unit cells")


_NAT: NatFinRing | None = None
_IV: IntervalRing | None = None


def nat_fin_ring() -> NatFinRing:
    global _NAT
    if _NAT is None:
        _NAT = NatFinRing()
    return _NAT


def interval_ring() -> IntervalRing:
    global _IV
    if _IV is None:
        _IV = IntervalRing()
    return _IV


# -- partitions ---------------------------------------------------------------------

class PartitionSpec:
    """F(i) = alpha(g(i)) pairwise disjoint; ``bound`` (g') is the optional majorising witness."""

    def __init__(self, space: RingSpace, g: Callable[[int], RingWord],
                 bound: Callable[[RingWord], int] | None = None, label: str = "partition"):
        self.space = space
        self._g = g
        self.bound = bound
        self.label = label
        self._cache: dict[int, RingWord] = {}

    @property
    def majorising(self) -> bool:
        return self.bound is not None

    def piece(self, i: int) -> RingWord:
        got = self._cache.get(i)
        if got is None:
            got = self._cache[i] = self._g(i)
        return got

    def g_prime(self, r: RingWord) -> int:
        if self.bound is None:
            raise NotImplementedError("partition has no majorising witness")
        return self.bound(r)

    def __repr__(self) -> str:
        return f"PartitionSpec({self.space.name}, {self.label})"


def build_majorising_partition(space: RingSpace) -> PartitionSpec:
    """F_n = E_n minus the union of E_i for i < n, with g' = h^-1."""
    pieces: list[RingWord] = []
    seen = [space.empty]  # seen[n] = union of E_i for i < n
    lock = threading.Lock()

    def g(n: int) -> RingWord:
        with lock:
            while len(pieces) <= n:
                k = len(pieces)
                e = space.numbering(k)
                pieces.append(space.diff(e, seen[k]))
                seen.append(space.union(seen[k], e))
        return pieces[n]

    return PartitionSpec(space, g, space.index, "from numbering")
