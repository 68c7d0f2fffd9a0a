"""Lower, upper and two-sided names of (extended) reals, and the threshold listers behind every list name.

A lower name of x lists rationals q < x.  Extended names (for +-infinity) use
the same streams; a name of +infinity simply lists every rational eventually.
``best_lower`` / ``best_upper`` report sentinels ``NEG_INF`` / ``POS_INF`` for
empty prefixes instead of extending the rationals.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Any, Callable, Hashable, Iterable

from .kernel import (
    InconsistentNames,
    InsufficientPrecision,
    NameStream,
    cantor_unpair,
    precision_at,
    rational_at,
    two_to_minus,
)

NEG_INF = float("-inf")
POS_INF = float("inf")

Bound = Fraction | float
ALL = object()  # "every dependency changed"


def revisit(step: int) -> int:
    """Key position refreshed at ``step``: sweeps 0..2^m-1 once per doubling of the step count."""
    return step - (1 << (step.bit_length() - 1)) if step > 0 else 0


def threshold_machine(
    *,
    side: str,
    bound: Callable[[Any], tuple[Bound, Bound]],
    token: Callable[..., Any],
    absorb: Callable[[int], Iterable[Hashable] | object] | None = None,
    keys: Callable[[int], Any] | None = None,
    dep: Callable[[Any], Hashable] | None = None,
):
    """Machine listing every ``(q, key)`` with q < value(key) (side "lower"), value(key) < q ("upper"), or both.

    Each step: ``absorb(step)`` pulls new evidence and reports which dependency
    keys changed (an iterable, a predicate on keys, or ``ALL``); one fresh candidate from the (rational x key) universe is
    tested; pending candidates of changed dependencies are re-tested; and
    refinement tokens ``lo - 2^-k`` / ``hi + 2^-k`` are emitted for the newest
    and a revisited key.  ``bound(key)`` must return sound non-strict bounds.
    """
    keyed = keys is not None
    key_at = keys if keyed else (lambda j: None)
    dep_of = dep or (lambda k: k)

    def holds(key: Any, u: Any, w: Any) -> bool:
        lo, hi = bound(key)
        if side == "lower":
            return u < lo
        if side == "upper":
            return hi < w
        return u < lo and hi < w

    def make(key: Any, u: Any, w: Any) -> Any:
        if side == "lower":
            return token(u, key)
        if side == "upper":
            return token(key, w)
        return token(u, key, w)

    def machine():
        # dep -> key -> [candidates waiting on the lower bound, candidates waiting on the upper bound];
        # heaps ordered so that the first entry is the easiest to confirm
        pending: dict[Hashable, dict[Any, list[list]]] = {}
        seq = count()

        def park(key: Any, u: Any, w: Any) -> None:
            heaps = pending.setdefault(dep_of(key), {}).setdefault(key, [[], []])
            if side == "upper":
                heapq.heappush(heaps[1], (-w, next(seq), u, w))
            else:
                heapq.heappush(heaps[0], (u, next(seq), u, w))

        def release(d: Hashable, out: list) -> None:
            group = pending[d]
            for key in list(group):
                lo, hi = bound(key)
                low, high = group[key]
                while high and hi < high[0][3]:
                    _, _, u, w = heapq.heappop(high)
                    out.append(make(key, u, w))
                while low and low[0][2] < lo:
                    _, _, u, w = heapq.heappop(low)
                    if side == "lower" or hi < w:
                        out.append(make(key, u, w))
                    else:
                        heapq.heappush(high, (-w, next(seq), u, w))
                if not low and not high:
                    del group[key]
            if not group:
                del pending[d]

        for t in count(1):
            touched = absorb(t) if absorb is not None else ()
            out = []
            n = t - 1
            if side == "both":
                a, j = cantor_unpair(n) if keyed else (n, 0)
                i, l = cantor_unpair(a)
                u, w = rational_at(i), rational_at(l)
            else:
                i, j = cantor_unpair(n) if keyed else (n, 0)
                u = w = rational_at(i)
            key = key_at(j)
            if holds(key, u, w):
                out.append(make(key, u, w))
            else:
                park(key, u, w)
            if touched is ALL:
                groups = list(pending)
            elif callable(touched):
                groups = [d for d in pending if touched(d)]
            else:
                groups = [d for d in touched if d in pending]  # type: ignore[union-attr]
            for d in groups:
                release(d, out)
            k = precision_at(t)
            eps = two_to_minus(k)
            fresh = {n, revisit(t)} if keyed else {0}
            for pos in sorted(fresh):
                key = key_at(pos)
                lo, hi = bound(key)
                if side in ("lower", "both") and lo != NEG_INF:
                    lo_q = (lo if isinstance(lo, Fraction) else Fraction(lo)) - eps
                if side in ("upper", "both") and hi != POS_INF:
                    hi_q = (hi if isinstance(hi, Fraction) else Fraction(hi)) + eps
                if side == "lower" and lo != NEG_INF:
                    out.append(make(key, lo_q, None))
                elif side == "upper" and hi != POS_INF:
                    out.append(make(key, None, hi_q))
                elif side == "both" and lo != NEG_INF and hi != POS_INF:
                    out.append(make(key, lo_q, hi_q))
            yield out

    return machine


# -- real names -------------------------------------------------------------------

@dataclass(frozen=True)
class LowerRealName:
    stream: NameStream


@dataclass(frozen=True)
class UpperRealName:
    stream: NameStream


@dataclass(frozen=True)
class RealName:
    lower: LowerRealName
    upper: UpperRealName


def _ident(q: Any, key: Any = None) -> Any:
    return q


def _ident_upper(key: Any, q: Any) -> Any:
    return q


class _Best:
    """Running best of a monotone approximation, shared by a name's machine."""

    def __init__(self, start: Bound):
        self.value = start


def lower_from_approx(f: Callable[[int], Fraction | int], label: str = "lower") -> LowerRealName:
    """Lower name of sup_k f(k) for a nondecreasing rational sequence f (the sup may be infinite)."""

    def build():
        best = _Best(NEG_INF)

        def absorb(t: int) -> None:
            v = Fraction(f(precision_at(t)))
            if best.value == NEG_INF or v > best.value:
                best.value = v

        return threshold_machine(side="lower", bound=lambda _k: (best.value, POS_INF), token=_ident,
                                 absorb=lambda t: (absorb(t), ALL)[1])()

    return LowerRealName(NameStream(build, label))


def upper_from_approx(f: Callable[[int], Fraction | int], label: str = "upper") -> UpperRealName:
    """Upper name of inf_k f(k) for a nonincreasing rational sequence f."""

    def build():
        best = _Best(POS_INF)

        def absorb(t: int) -> None:
            v = Fraction(f(precision_at(t)))
            if v < best.value:
                best.value = v

        return threshold_machine(side="upper", bound=lambda _k: (NEG_INF, best.value), token=_ident_upper,
                                 absorb=lambda t: (absorb(t), ALL)[1])()

    return UpperRealName(NameStream(build, label))


def real_from_bounds(g: Callable[[int], tuple[Fraction, Fraction]], label: str = "real") -> RealName:
    """Two-sided name from k -> (lo, hi) with lo <= x <= hi and hi - lo -> 0."""
    return RealName(lower_from_approx(lambda k: g(k)[0], label + "<"),
                    upper_from_approx(lambda k: g(k)[1], label + ">"))


def exact_real(x: Fraction | int, label: str | None = None) -> RealName:
    x = Fraction(x)
    return real_from_bounds(lambda k: (x, x), label or str(x))


def best_lower(p: LowerRealName | NameStream, budget: int) -> Bound:
    s = p.stream if isinstance(p, LowerRealName) else p
    pre = s.prefix(budget)
    return max(pre) if pre else NEG_INF


def best_upper(p: UpperRealName | NameStream, budget: int) -> Bound:
    s = p.stream if isinstance(p, UpperRealName) else p
    pre = s.prefix(budget)
    return min(pre) if pre else POS_INF


class BestReader:
    """Incremental best bound of a lower or upper name."""

    def __init__(self, p: LowerRealName | UpperRealName):
        self.upper = isinstance(p, UpperRealName)
        self.cur = p.stream.cursor()
        self.value: Bound = POS_INF if self.upper else NEG_INF

    def at(self, budget: int) -> Bound:
        for q in self.cur.take(budget):
            if self.upper:
                if q < self.value:
                    self.value = q
            elif q > self.value:
                self.value = q
        return self.value


def real_bounds(r: RealName, budget: int) -> tuple[Bound, Bound]:
    lo, hi = best_lower(r.lower, budget), best_upper(r.upper, budget)
    if lo != NEG_INF and hi != POS_INF and lo >= hi:
        raise InconsistentNames(f"lower bound {lo} is not below upper bound {hi}")
    return lo, hi


def real_approx_budgeted(r: RealName, k: int, budget: int = 1 << 15, start: int = 64) -> tuple[Fraction, int]:
    """Rational within 2^-k of the named real, plus the budget that sufficed."""
    b = min(start, budget)
    while True:
        lo, hi = real_bounds(r, b)
        if lo != NEG_INF and hi != POS_INF and hi - lo <= Fraction(2, 1 << k):
            return (Fraction(lo) + Fraction(hi)) / 2, b
        if b >= budget:
            raise InsufficientPrecision(k, budget)
        b = min(2 * b, budget)


def real_approx(r: RealName, k: int, budget: int = 1 << 15) -> Fraction:
    return real_approx_budgeted(r, k, budget)[0]


def _combine(label: str, upper: bool, parts: list, f: Callable[[list[Bound]], Bound]):
    def build():
        readers = [BestReader(p) for p in parts]
        state = _Best(POS_INF if upper else NEG_INF)

        def absorb(t: int) -> None:
            vals = [rd.at(t) for rd in readers]
            if any(v in (NEG_INF, POS_INF) for v in vals):
                return
            v = f(vals)
            if (upper and v < state.value) or (not upper and v > state.value):
                state.value = v

        if upper:
            return threshold_machine(side="upper", bound=lambda _k: (NEG_INF, state.value), token=_ident_upper,
                                     absorb=lambda t: (absorb(t), ALL)[1])()
        return threshold_machine(side="lower", bound=lambda _k: (state.value, POS_INF), token=_ident,
                                 absorb=lambda t: (absorb(t), ALL)[1])()

    stream = NameStream(build, label)
    return UpperRealName(stream) if upper else LowerRealName(stream)


def sub_known_minus_lower(a: RealName, b: LowerRealName) -> UpperRealName:
    """Upper name of a - b."""
    return _combine("a-b>", True, [a.upper, b], lambda v: v[0] - v[1])


def sub_known_minus_upper(a: RealName, b: UpperRealName) -> LowerRealName:
    """Lower name of a - b."""
    return _combine("a-b<", False, [a.lower, b], lambda v: v[0] - v[1])


def sub_lower_minus_known(b: LowerRealName, a: RealName) -> LowerRealName:
    """Lower name of b - a."""
    return _combine("b-a<", False, [b, a.upper], lambda v: v[0] - v[1])


def sub_upper_minus_known(b: UpperRealName, a: RealName) -> UpperRealName:
    """Upper name of b - a."""
    return _combine("b-a>", True, [b, a.lower], lambda v: v[0] - v[1])


def add_lower(p: LowerRealName, q: LowerRealName) -> LowerRealName:
    return _combine("p+q<", False, [p, q], lambda v: v[0] + v[1])


def add_upper(p: UpperRealName, q: UpperRealName) -> UpperRealName:
    return _combine("p+q>", True, [p, q], lambda v: v[0] + v[1])


def meet(p: LowerRealName, q: UpperRealName) -> RealName:
    """Pair a lower and an upper name of the same real.

    The returned streams re-emit their inputs but first compare the best
    lower bound against the best upper bound seen so far at the same budget;
    a crossing raises :class:`InconsistentNames` instead of being passed on.
    """

    def checked(own: NameStream, other: NameStream, own_is_lower: bool, label: str) -> NameStream:
        def machine():
            mine, theirs = own.cursor(), other.cursor()
            lo, hi = NEG_INF, POS_INF
            for t in count(1):
                new = mine.take(t)
                seen = theirs.take(t)
                lows, highs = (new, seen) if own_is_lower else (seen, new)
                if lows:
                    lo = max(lo, max(lows))
                if highs:
                    hi = min(hi, min(highs))
                if lo != NEG_INF and hi != POS_INF and lo >= hi:
                    raise InconsistentNames(f"lower bound {lo} is not below upper bound {hi}")
                yield new

        return NameStream(machine, label)

    return RealName(LowerRealName(checked(p.stream, q.stream, True, "meet<")),
                    UpperRealName(checked(q.stream, p.stream, False, "meet>")))


def split(r: RealName) -> tuple[LowerRealName, UpperRealName]:
    return r.lower, r.upper


def weaken(r: RealName) -> LowerRealName:
    return r.lower


def weaken_upper(r: RealName) -> UpperRealName:
    return r.upper
