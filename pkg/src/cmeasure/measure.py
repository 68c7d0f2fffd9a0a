"""Computable measures on the rings of :mod:`cmeasure.algebra`.

A measure is given on ring elements by ``approx(R, k)``, which returns
rational bounds ``lo <= mu(R) <= hi`` with ``hi - lo <= 2^-k``.  All concrete
instances here are exact, so ``lo == hi``.  ``exact(R)`` is the reference oracle
the tests compare against.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import IntervalRing, NatFinRing, RingSpace, RingWord, interval_ring, nat_fin_ring
from .kernel import ConfigError, NameStream, precision_at
from .reals import (
    ALL,
    NEG_INF,
    POS_INF,
    LowerRealName,
    RealName,
    revisit,
    real_from_bounds,
    threshold_machine,
)


@dataclass
class ComputableMeasure:
    space: RingSpace
    exact: Callable[[RingWord], Fraction]
    label: str
    total_bounds: Callable[[int], tuple[Fraction, Fraction]] | None = None  # k -> bounds of mu(Omega)
    total_exact: Fraction | float | None = None  # reference value, inf for infinite totals
    _cache: dict = field(default_factory=dict, repr=False)

    def approx(self, r: RingWord, k: int = 0) -> tuple[Fraction, Fraction]:
        got = self._cache.get(r.word)
        if got is None:
            self.space.check(r)
            got = Fraction(self.exact(r))
            if len(self._cache) > 200_000:
                self._cache.clear()
            self._cache[r.word] = got
        return got, got

    @property
    def finite_total(self) -> bool:
        return self.total_bounds is not None

    def total(self) -> RealName:
        if self.total_bounds is None:
            from .kernel import UnsupportedOperation

            raise UnsupportedOperation(f"{self.label}: no two-sided name of the total measure")
        return real_from_bounds(self.total_bounds, f"mu({self.label})")


def mu_ring(m: ComputableMeasure, r: RingWord) -> RealName:
    m.space.check(r)
    return real_from_bounds(lambda k: m.approx(r, k), f"mu{m.space.show(r)}")


def weighted_measure(weight: Callable[[int], Fraction], tail: Callable[[int], Fraction] | None = None,
                     label: str = "weighted", total: Fraction | None = None) -> ComputableMeasure:
    """mu(A) = sum of weight(i) over i in A on finite subsets of N.

    ``tail(k)`` must bound the sum of weight(i) over i > k; it makes the total
    two-sided computable.
    """
    space = nat_fin_ring()
    w_cache: dict[int, Fraction] = {}

    def w(i: int) -> Fraction:
        got = w_cache.get(i)
        if got is None:
            got = w_cache[i] = Fraction(weight(i))
            if got <= 0:
                raise ConfigError(f"weight {i} is not positive")
        return got

    def exact(r: RingWord) -> Fraction:
        return sum((w(i) for i in r.form), Fraction(0))

    sums = [Fraction(0)]
    lock = threading.Lock()

    def partial(k: int) -> Fraction:
        with lock:
            while len(sums) <= k + 1:
                sums.append(sums[-1] + w(len(sums) - 1))
        return sums[k + 1]

    def bounds(k: int) -> tuple[Fraction, Fraction]:
        s = partial(k)
        return s, s + Fraction(tail(k))

    m = ComputableMeasure(space, exact, label, bounds if tail is not None else None, total)
    m.weight = w  # type: ignore[attr-defined]
    m.partial = partial  # type: ignore[attr-defined]
    return m


def geometric_measure(base: int = 3, scale: Fraction = Fraction(1)) -> ComputableMeasure:
    """Weights scale * base^-i; total scale * base / (base - 1)."""
    if base < 2:
        raise ConfigError("base must be at least 2")
    scale = Fraction(scale)
    m = weighted_measure(
        lambda i: scale / base**i,
        lambda k: scale / (base**k * (base - 1)),
        f"nat{base}" + ("" if scale == 1 else f"*{scale}"),
        scale * Fraction(base, base - 1),
    )
    m.base, m.scale = base, scale  # type: ignore[attr-defined]

    def exact(r: RingWord) -> Fraction:
        # one integer sum over the common denominator base^top
        if not r.form:
            return Fraction(0)
        top = r.form[-1]
        return scale * Fraction(sum(base ** (top - i) for i in r.form), base**top)

    m.exact = exact
    return m


def nat3_measure() -> ComputableMeasure:
    return geometric_measure(3)


def nat3_probability() -> ComputableMeasure:
    return geometric_measure(3, Fraction(2, 3))


def ex1_measure(h: Callable[[int], int], label: str = "ex1") -> ComputableMeasure:
    """mu(A) = sum of 2^-h(i) over i in A for a total injective h.

    The total is only approximable from below in general.  Injectivity is
    checked on every index actually evaluated.
    """
    seen: dict[int, int] = {}

    def weight(i: int) -> Fraction:
        v = h(i)
        if not isinstance(v, int) or v < 0:
            raise ConfigError(f"h({i}) = {v!r} is not a natural number")
        other = seen.setdefault(v, i)
        if other != i:
            raise ConfigError(f"h is not injective: h({other}) = h({i}) = {v}")
        return Fraction(1, 1 << v)

    return weighted_measure(weight, None, label)


def lebesgue_measure() -> ComputableMeasure:
    space = interval_ring()

    def exact(r: RingWord) -> Fraction:
        return sum((b - a for a, b in r.form), Fraction(0))

    return ComputableMeasure(space, exact, "lebesgue", None, POS_INF)


def total_measure_lower(m: ComputableMeasure) -> LowerRealName:
    """Extended lower name of mu(Omega) as the sup of mu(R) over the ring, visited in key order."""
    space = m.space

    def build():
        best = [NEG_INF]

        def absorb(t: int):
            for pos in (t - 1, revisit(t)):
                lo, _ = m.approx(space.key(pos), precision_at(t))
                if best[0] == NEG_INF or lo > best[0]:
                    best[0] = lo
            return ALL

        return threshold_machine(side="lower", bound=lambda _k: (best[0], POS_INF),
                                 token=lambda q, key=None: q, absorb=absorb)()

    return LowerRealName(NameStream(build, f"mu({m.label})<"))


def measure_by_name(name: str, k_base: int = 3) -> ComputableMeasure:
    """Measures selectable from the command line: nat3, natK (with ``k_base``), nat3p, lebesgue."""
    if name == "nat3":
        return nat3_measure()
    if name == "nat3p":
        return nat3_probability()
    if name == "natK":
        return geometric_measure(k_base)
    if name == "lebesgue":
        return lebesgue_measure()
    raise ConfigError(f"unknown space {name!r}")


__all__ = [
    "ComputableMeasure",
    "IntervalRing",
    "NatFinRing",
    "ex1_measure",
    "geometric_measure",
    "lebesgue_measure",
    "measure_by_name",
    "mu_ring",
    "nat3_measure",
    "nat3_probability",
    "total_measure_lower",
    "weighted_measure",
]
