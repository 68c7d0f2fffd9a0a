"""Words, wrapping and tupling codecs, replayable token streams and fair scheduling.

A name is modelled as a :class:`NameStream`: a deterministic, memoised step
machine.  ``prefix(n)`` is everything emitted during the first ``n`` scheduler
steps, so prefixes are monotone in the budget and replay identically.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from math import gcd, isqrt
from typing import Any, Callable, Iterable, Iterator, Sequence

SEPARATOR = "/"
ALPHABET = frozenset("01" + SEPARATOR)

# fairness bound B(c) = FAIRNESS_SCALE * (c+1)(c+2)/2 steps
FAIRNESS_SCALE = 1


class DomainError(ValueError):
    """A word is not in the domain of the notation it was given to."""


class BudgetExhausted(RuntimeError):
    """A search did not finish within the step budget it was allowed."""


class InsufficientPrecision(BudgetExhausted):
    def __init__(self, precision: int, budget: int):
        super().__init__(f"insufficient precision at budget {budget} (wanted 2^-{precision})")
        self.precision = precision
        self.budget = budget


class ConfigError(ValueError):
    """A parameter or configuration value is unusable."""


class PreconditionError(ValueError):
    """An operation was called outside its documented precondition."""


class UnsupportedOperation(PreconditionError):
    """The operation needs data this object does not carry (a finite total, a majorising witness, ...)."""


class InconsistentNames(ValueError):
    """Two names that should describe the same object were seen to disagree."""


def check_word(w: str) -> str:
    bad = set(w) - ALPHABET
    if bad:
        raise DomainError(f"symbols {sorted(bad)} not in alphabet")
    return w


# -- wrapping and tupling ---------------------------------------------------

_SPREAD = str.maketrans({"0": "00", "1": "01", SEPARATOR: "0" + SEPARATOR})


def wrap(w: str) -> str:
    check_word(w)
    return "110" + w.translate(_SPREAD) + "011"


def _read_wrapped(s: Sequence[str], start: int) -> tuple[str, int] | None:
    """Parse one wrapped word at ``start``; return (payload, end) or None."""
    n = len(s)
    if start + 3 > n or s[start] != "1" or s[start + 1] != "1" or s[start + 2] != "0":
        return None
    pos = start + 3
    out = []
    while pos + 1 < n:
        if s[pos] != "0":
            return None
        if s[pos + 1] == "1" and pos + 2 < n and s[pos + 2] == "1":
            return "".join(out), pos + 3
        out.append(s[pos + 1])
        pos += 2
    return None


def scan_wrapped(p: Any, budget: int | None = None) -> list[str]:
    """All maximal non-overlapping wrapped words of ``p``, unwrapped, left to right.

    ``p`` is a word, a sequence of symbols, or a symbol :class:`NameStream`
    (read at ``budget``).  Regions that do not parse are skipped.
    """
    if isinstance(p, NameStream):
        if budget is None:
            raise ValueError("budget required when scanning a stream")
        s: Sequence[str] = p.prefix(budget)
    else:
        s = p
    found = []
    i = 0
    n = len(s)
    while i < n:
        got = _read_wrapped(s, i)
        if got is None:
            i += 1
        else:
            found.append(got[0])
            i = got[1]
    return found


def unwrap(w: str) -> str:
    got = _read_wrapped(w, 0)
    if got is None or got[1] != len(w):
        raise DomainError(f"not a wrapped word: {w!r}")
    return got[0]


def tuple_words(*ws: str) -> str:
    return "".join(wrap(w) for w in ws)


def untuple(w: str) -> list[str]:
    """Inverse of :func:`tuple_words`; rejects anything that is not an exact tuple."""
    parts = []
    i = 0
    while i < len(w):
        got = _read_wrapped(w, i)
        if got is None:
            raise DomainError(f"not a tuple word: {w!r}")
        parts.append(got[0])
        i = got[1]
    return parts


# -- canonical notations of N and Q -----------------------------------------

def nat_word(n: int) -> str:
    if n < 0:
        raise DomainError("negative natural")
    return format(n, "b")


def nat_value(w: str) -> int:
    if not w or set(w) - {"0", "1"} or (len(w) > 1 and w[0] == "0"):
        raise DomainError(f"not a canonical natural: {w!r}")
    return int(w, 2)


def rat_word(q: Fraction | int) -> str:
    q = Fraction(q)
    sign = "1" if q < 0 else "0"
    return sign + format(abs(q.numerator), "b") + SEPARATOR + format(q.denominator, "b")


def rat_value(w: str) -> Fraction:
    if len(w) < 4 or w[0] not in "01" or w.count(SEPARATOR) != 1:
        raise DomainError(f"not a rational word: {w!r}")
    num_w, den_w = w[1:].split(SEPARATOR)
    num, den = nat_value(num_w), nat_value(den_w)
    if den == 0 or gcd(num, den) != 1 or (num == 0 and (w[0] == "1" or den != 1)):
        raise DomainError(f"rational word not canonical: {w!r}")
    return Fraction(-num if w[0] == "1" else num, den)


# -- pairing ------------------------------------------------------------------

def cantor_pair(i: int, j: int) -> int:
    return (i + j) * (i + j + 1) // 2 + j


def cantor_unpair(n: int) -> tuple[int, int]:
    d = (isqrt(8 * n + 1) - 1) // 2
    j = n - d * (d + 1) // 2
    return d - j, j


def unpair3(n: int) -> tuple[int, int, int]:
    a, c = cantor_unpair(n)
    x, y = cantor_unpair(a)
    return x, y, c


def fairness_bound(c: int) -> int:
    """Steps within which a dovetailed search of combined index ``c`` is reached."""
    return FAIRNESS_SCALE * (c + 1) * (c + 2) // 2


def precision_at(step: int) -> int:
    """Binary precision used by evidence evaluated at a given scheduler step."""
    return 4 + isqrt(8 * step)


_POWERS: dict[int, Fraction] = {}


def two_to_minus(k: int) -> Fraction:
    """2^-k, shared between callers."""
    got = _POWERS.get(k)
    if got is None:
        got = _POWERS[k] = Fraction(1, 1 << k)
    return got


# -- enumeration of the rationals by size -------------------------------------

class _RationalTable:
    """Non-negative rationals ordered by height p+q, then by value."""

    def __init__(self) -> None:
        self.items: list[Fraction] = []
        self.index: dict[Fraction, int] = {}
        self.height = 0
        self.lock = threading.Lock()

    def _grow(self) -> None:
        self.height += 1
        h = self.height
        level = [Fraction(p, h - p) for p in range(0, h) if gcd(p, h - p) == 1]
        if h == 1:
            level = [Fraction(0)]
        for q in sorted(level):
            self.index[q] = len(self.items)
            self.items.append(q)

    def at(self, n: int) -> Fraction:
        while n >= len(self.items):
            with self.lock:
                if n >= len(self.items):
                    self._grow()
        return self.items[n]

    def position(self, q: Fraction) -> int:
        if q < 0:
            raise DomainError("negative")
        h = q.numerator + q.denominator
        while self.height < h:
            with self.lock:
                if self.height < h:
                    self._grow()
        return self.index[q]


_NONNEG = _RationalTable()


def nonneg_rational(n: int) -> Fraction:
    return _NONNEG.at(n)


def nonneg_rational_index(q: Fraction) -> int:
    return _NONNEG.position(Fraction(q))


_NEGATED: dict[int, Fraction] = {}


def rational_at(i: int) -> Fraction:
    """Bijection N -> Q: 0, then +r1, -r1, +r2, -r2, ... with r the positive rationals by size."""
    if i % 2:
        return _NONNEG.at((i + 1) // 2)
    if i == 0:
        return _NONNEG.at(0)
    got = _NEGATED.get(i)
    if got is None:
        got = _NEGATED[i] = -_NONNEG.at(i // 2)
    return got


def rational_index(q: Fraction | int) -> int:
    q = Fraction(q)
    if q == 0:
        return 0
    n = _NONNEG.position(abs(q))
    return 2 * n - 1 if q > 0 else 2 * n


# -- streams ------------------------------------------------------------------

Steps = Iterator[Iterable[Any]]


class NameStream:
    """Replayable enumeration.  Each step of the underlying machine emits finitely many items.

    The machine is started lazily and memoised; since it is deterministic the
    memo is invisible, and concurrent readers are serialised by a lock.
    """

    def __init__(self, machine: Callable[[], Steps], label: str = ""):
        self._machine = machine
        self.label = label
        self._iter: Steps | None = None
        self._items: list[Any] = []
        self._marks = [0]
        self._done = False
        self._lock = threading.RLock()

    def _advance(self, budget: int) -> None:
        if len(self._marks) > budget:
            return
        with self._lock:
            if self._iter is None:
                self._iter = self._machine()
            while len(self._marks) <= budget:
                if not self._done:
                    try:
                        chunk = next(self._iter)
                    except StopIteration:
                        self._done = True
                        chunk = ()
                    if chunk:
                        self._items.extend(chunk)
                self._marks.append(len(self._items))

    def length_at(self, budget: int) -> int:
        budget = max(0, budget)
        self._advance(budget)
        return self._marks[budget]

    def prefix(self, budget: int) -> tuple:
        return tuple(self._items[: self.length_at(budget)])

    def slice(self, start: int, stop: int) -> list:
        return self._items[start:stop]

    def cursor(self) -> "Cursor":
        return Cursor(self)

    def __repr__(self) -> str:
        return f"NameStream({self.label or '?'})"


class Cursor:
    """Incremental reader: ``take(budget)`` returns the items that are new since the last call."""

    def __init__(self, stream: NameStream):
        self.stream = stream
        self.pos = 0

    def take(self, budget: int) -> list:
        end = self.stream.length_at(budget)
        if end <= self.pos:
            return []
        items = self.stream.slice(self.pos, end)
        self.pos = end
        return items


def stream_of(items: Iterable[Any], label: str = "") -> NameStream:
    """Finite list emitted one item per step, then silence."""
    data = tuple(items)
    return NameStream(lambda: ([x] for x in data), label)


def empty_stream(label: str = "empty") -> NameStream:
    return NameStream(lambda: iter(()), label)


def repeat_forever(items: Sequence[Any], label: str = "") -> NameStream:
    data = tuple(items)

    def machine() -> Steps:
        while True:
            for x in data:
                yield [x]

    return NameStream(machine, label)


def dovetail(tasks: Callable[[int], Iterator[Iterable[Any]]] | Sequence[Callable[[], Iterator[Iterable[Any]]]],
             label: str = "dovetail") -> NameStream:
    """Fair scheduler over countably many step-resumable tasks.

    Round ``r`` starts task ``r`` and then gives one step to every live task
    started so far, so task ``i`` performs its ``k``-th step no later than
    step ``fairness_bound(i + k)``.  A finite family is given as a sequence of
    zero-argument factories; an infinite one as ``i -> iterator``.
    """
    finite = not callable(tasks)

    def start(i: int) -> Iterator[Iterable[Any]] | None:
        if finite:
            return tasks[i]() if i < len(tasks) else None  # type: ignore[index]
        return tasks(i)  # type: ignore[operator]

    def machine() -> Steps:
        live: list[Iterator[Iterable[Any]] | None] = []
        for r in count():
            task = start(r)
            if task is not None or not finite:
                live.append(task)
            elif not any(t is not None for t in live):
                return
            for i in range(len(live)):
                t = live[i]
                if t is None:
                    continue
                try:
                    yield next(t)
                except StopIteration:
                    live[i] = None
                    yield ()

    return NameStream(machine, label)


def list_name(search: Callable[[int], Iterator[Iterable[Any]]], label: str = "list") -> NameStream:
    """A "list of all x with Q(x)" name from a semi-decision family.

    ``search(i)`` is the i-th resumable search; each step yields the tokens it
    confirmed in that step.  The result is the fair dovetail of all searches.
    """
    return dovetail(search, label)


def semi_decide(candidates: Callable[[int], Any], witness: Callable[[Any, int], bool],
                label: str = "list") -> NameStream:
    """List every candidate ``x`` for which ``witness(x, k)`` holds for some ``k``."""

    def search(i: int) -> Iterator[Iterable[Any]]:
        x = candidates(i)
        for k in count():
            if witness(x, k):
                yield [x]
                return
            yield ()

    return list_name(search, label)


# -- symbol level tupling ------------------------------------------------------

def symbols_of(tokens: NameStream, encode: Callable[[Any], str], label: str = "") -> NameStream:
    """Wire form of a token list: each token ``t`` becomes the symbols of ``wrap(encode(t))``."""

    def machine() -> Steps:
        cur = tokens.cursor()
        for t in count(1):
            out: list[str] = []
            for tok in cur.take(t):
                out.extend(wrap(encode(tok)))
            yield out

    return NameStream(machine, label or f"wire({tokens.label})")


def pair_word_stream(w: str, p: NameStream) -> NameStream:
    """<w, p> = iota(w) p."""
    head = list(wrap(w))

    def machine() -> Steps:
        yield head
        cur = p.cursor()
        for t in count(1):
            yield cur.take(t)

    return NameStream(machine, f"<{w},{p.label}>")


def interleave(p0: NameStream, p1: NameStream) -> NameStream:
    """<p0, p1> = p0(0) p1(0) p0(1) p1(1) ..."""

    def machine() -> Steps:
        out = 0
        for t in count(1):
            a, b = p0.length_at(t), p1.length_at(t)
            emit = []
            while True:
                k, side = divmod(out, 2)
                src, have = (p0, a) if side == 0 else (p1, b)
                if k >= have:
                    break
                emit.append(src.slice(k, k + 1)[0])
                out += 1
            yield emit

    return NameStream(machine, f"<{p0.label},{p1.label}>")


def omega_tuple(family: Callable[[int], NameStream]) -> NameStream:
    """<p0, p1, ...><i, j> = p_i(j) under the Cantor pairing."""
    cache: dict[int, NameStream] = {}

    def member(i: int) -> NameStream:
        if i not in cache:
            cache[i] = family(i)
        return cache[i]

    def machine() -> Steps:
        n = 0
        for t in count(1):
            emit = []
            while n < t:
                i, j = cantor_unpair(n)
                p = member(i)
                if p.length_at(t) <= j:
                    break
                emit.append(p.slice(j, j + 1)[0])
                n += 1
            yield emit

    return NameStream(machine, "omega")


def project(p: NameStream, i: int) -> NameStream:
    """Component ``i`` of an omega-tuple."""

    def machine() -> Steps:
        j = 0
        for t in count(1):
            have = p.length_at(t)
            emit = []
            while cantor_pair(i, j) < have:
                n = cantor_pair(i, j)
                emit.append(p.slice(n, n + 1)[0])
                j += 1
            yield emit

    return NameStream(machine, f"{p.label}[{i}]")


@dataclass(frozen=True)
class Emission:
    """Where a token first appeared: the step and its position in the stream."""

    step: int
    position: int


def first_emission(p: NameStream, token: Any, budget: int) -> Emission | None:
    """Smallest budget at which ``token`` is in the prefix, or None within ``budget``."""
    end = p.length_at(budget)
    items = p.slice(0, end)
    try:
        pos = items.index(token)
    except ValueError:
        return None
    lo, hi = 0, budget
    while lo < hi:
        mid = (lo + hi) // 2
        if p.length_at(mid) > pos:
            hi = mid
        else:
            lo = mid + 1
    return Emission(lo, pos)
