"""Enumeration names of subsets of N, complementation boxes and reduction combinators.

An En-name of A is a 0/1 sequence in which ``0 1^(n+1) 0`` occurs as a subword
exactly when n is in A.  Streams here carry single symbols ``"0"``/``"1"`` or
:class:`EnBlock` items; a block stands for the whole subword ``0 1^(n+1) 0``
so that large elements do not cost a unary string.  ``EnName.bits`` expands
the sequence bit for bit.

Complementation of enumerations (CE) is not computable.  The boxes in this
module realise it, or the translation ``plus -> minus``, relative to a decider
or an exact oracle supplied by the caller; everything else is computable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Any, Callable, Iterable, Iterator

from .algebra import RingSpace, RingWord
from .kernel import (
    DomainError,
    InconsistentNames,
    NameStream,
    SEPARATOR,
    PreconditionError,
    cantor_unpair,
)
from .measure import ComputableMeasure
from .msets import ZetaName, _lister, decode_token, encode_token, make_zeta, token_view, zeta_meet, zeta_split
from .oracles import BoundOracle, ExactSet
from .reals import POS_INF


@dataclass(frozen=True)
class EnBlock:
    """The subword 0 1^(n+1) 0."""

    n: int

    def bits(self) -> str:
        return "0" + "1" * (self.n + 1) + "0"

    def __len__(self) -> int:
        return self.n + 3


def en_block(n: int) -> list[EnBlock]:
    if n < 0:
        raise PreconditionError("enumerations list natural numbers")
    return [EnBlock(n)]


@dataclass(frozen=True)
class EnName:
    stream: NameStream

    @property
    def label(self) -> str:
        return self.stream.label

    def bits(self, budget: int, limit: int = 1 << 20) -> str:
        """The 0/1 prefix written within ``budget`` steps."""
        out: list[str] = []
        size = 0
        for item in self.stream.prefix(budget):
            s = item.bits() if isinstance(item, EnBlock) else item
            size += len(s)
            if size > limit:
                raise PreconditionError(f"bit prefix longer than {limit}")
            out.append(s)
        return "".join(out)

    def elements(self, budget: int) -> list[int]:
        """Distinct elements in order of first appearance."""
        return EnReader(self).take(budget)


class EnReader:
    """Incremental subword scanner; ``take(budget)`` returns elements not reported before."""

    def __init__(self, e: EnName):
        self.cur = e.stream.cursor()
        self.ones: int | None = None  # length of the current run of 1s, None before the first 0
        self.seen: set[int] = set()

    def _found(self, n: int, out: list[int]) -> None:
        if n not in self.seen:
            self.seen.add(n)
            out.append(n)

    def take(self, budget: int) -> list[int]:
        out: list[int] = []
        for item in self.cur.take(budget):
            if isinstance(item, EnBlock):
                if self.ones:
                    self._found(self.ones - 1, out)
                self._found(item.n, out)
                self.ones = 0
                continue
            for sym in item:
                if sym == "0":
                    if self.ones:
                        self._found(self.ones - 1, out)
                    self.ones = 0
                elif sym == "1":
                    if self.ones is not None:
                        self.ones += 1
                else:
                    raise PreconditionError(f"symbol {sym!r} in an enumeration")
        return out


def en_from_bits(bits: str, label: str = "bits") -> EnName:
    """A finite 0/1 word, one symbol per step, padded with 0s."""

    def machine():
        yield from ([b] for b in bits)
        while True:
            yield ["0"]

    return EnName(NameStream(machine, label))


def en_from_elements(elements: Iterable[int], label: str = "list") -> EnName:
    data = tuple(elements)

    def machine():
        for n in data:
            yield en_block(n)
        while True:
            yield ["0"]

    return EnName(NameStream(machine, label))


def en_of_decidable(decider: Callable[[int], bool], label: str = "decided") -> EnName:
    """Step t looks at t - 1."""

    def machine():
        for n in count():
            yield en_block(n) if decider(n) else ["0"]

    return EnName(NameStream(machine, label))


# -- oracle boxes -----------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleBox:
    """A black-box realisation of a problem; ``supplier`` names the non-computable party."""

    apply: Callable[[Any], Any]
    label: str
    supplier: str

    def __call__(self, p):
        return self.apply(p)


def ce_oracle_for_decidable(decider: Callable[[int], bool],
                            hints: Callable[[int], Iterable[int]] | None = None,
                            label: str = "CE") -> OracleBox:
    """CE relative to a total decider of A.

    Step t writes t - 1 when it lies outside A, plus any outsiders among
    ``hints(t)``.  Every element the input lists is checked against the decider.
    """

    def apply(e: EnName) -> EnName:
        def machine():
            reader = EnReader(e)
            sent: set[int] = set()
            for t in count(1):
                for n in reader.take(t):
                    if not decider(n):
                        raise InconsistentNames(f"input lists {n}, which the decider rejects")
                out: list[Any] = []
                for n in [t - 1, *(hints(t) if hints else ())]:
                    if n not in sent and not decider(n):
                        sent.add(n)
                        out.extend(en_block(n))
                yield out or ["0"]

        return EnName(NameStream(machine, f"{label}({e.label})"))

    return OracleBox(apply, label, "decider")


def weihrauch_apply(g: Callable[[Any], Any], h: Callable[..., Any], f2: Callable[[Any], Any], p,
                    strong: bool = False):
    """p -> H(p, F2(G(p))), or H(F2(G(p))) for the strong variant."""
    q = f2(g(p))
    return h(q) if strong else h(p, q)


def replay(stream: NameStream) -> NameStream:
    """A fresh, unmemoised copy of the same machine."""
    return NameStream(stream._machine, stream.label)


def contract_holds(make: Callable[[], NameStream], budgets: Iterable[int]) -> bool:
    """Two independent runs agree, and prefixes only grow with the budget."""
    a, b = make(), make()
    last: tuple = ()
    for k in sorted(budgets):
        pa = a.prefix(k)
        if pa != b.prefix(k) or pa[: len(last)] != last:
            return False
        last = pa
    return True


# -- the token universe of plus names ---------------------------------------------------------


_DIGITS = "01" + SEPARATOR


_TO_TERNARY = str.maketrans(_DIGITS, "012")
_FROM_TERNARY = str.maketrans("012", _DIGITS)


def word_number(w: str) -> int:
    """Bijective base-3 numbering of words over the name alphabet: "" -> 0, "0" -> 1, "1" -> 2, "/" -> 3, "00" -> 4."""
    if not w:
        return 0
    # words shorter than len(w) take (3^len - 1) / 2 numbers
    return _from_ternary(w.translate(_TO_TERNARY)) + (3 ** len(w) - 1) // 2


def _from_ternary(digits: str) -> int:
    # int(s, 3) refuses very long strings
    if len(digits) <= 2048:
        return int(digits, 3)
    half = len(digits) // 2
    return _from_ternary(digits[:half]) * 3 ** (len(digits) - half) + _from_ternary(digits[half:])


def _ternary(m: int, width: int) -> str:
    if width <= 32:
        out = []
        for _ in range(width):
            m, d = divmod(m, 3)
            out.append("012"[d])
        return "".join(reversed(out))
    low = width // 2
    hi, lo = divmod(m, 3**low)
    return _ternary(hi, width - low) + _ternary(lo, low)


def word_at(n: int) -> str:
    if n < 0:
        raise DomainError("negative word number")
    length, start = 0, 0
    while start + 3**length <= n:
        start += 3**length
        length += 1
    return _ternary(n - start, length).translate(_FROM_TERNARY)


_TOKENS: dict[int, tuple[Fraction, RingWord]] = {}


def token_index(space: RingSpace, u: Fraction, r: RingWord) -> int:
    """Number of the wire word of the plus token (u, R)."""
    n = word_number(encode_token("plus", (Fraction(u), r)))
    if len(_TOKENS) > 500_000:
        _TOKENS.clear()
    _TOKENS[n] = (Fraction(u), r)
    return n


def token_at(space: RingSpace, n: int) -> tuple[Fraction, RingWord] | None:
    """The plus token numbered n, or None when the word is not a token."""
    got = _TOKENS.get(n)
    if got is not None and got[1].space == space.name:
        return got
    try:
        u, r = decode_token("plus", word_at(n), space)
    except (DomainError, ValueError):
        return None
    return u, r


def token_enumeration(p: ZetaName) -> EnName:
    """The G side: an enumeration of the numbers of the tokens listed in a plus name."""
    if p.kind != "plus":
        raise PreconditionError(f"expected a plus name, got {p.kind}")
    space = p.space

    def machine():
        cur = p.stream.cursor()
        for t in count(1):
            out: list[Any] = []
            for tok in cur.take(t):
                r, u, _ = token_view("plus", tok)
                out.extend(en_block(token_index(space, u, r)))
            yield out or ["0"]

    return EnName(NameStream(machine, f"tokens({p.stream.label})"))


def token_decider(a: ExactSet) -> Callable[[int], bool]:
    """n is a true plus token of A iff u < mu(R n A)."""
    space = a.space

    def decide(n: int) -> bool:
        tok = token_at(space, n)
        return tok is not None and tok[0] < a.cap(tok[1])

    return decide


def bisection_hints(space: RingSpace, measure: ComputableMeasure,
                    decider: Callable[[int], bool]) -> Callable[[int], list[int]]:
    """Step t picks (key, level) by unpairing t - 1 and bisects for the least dyadic u = k/2^level
    with (u, R) false; that token lies in the complement and sits just above mu(R n A)."""

    def hints(t: int) -> list[int]:
        ri, level = cantor_unpair(t - 1)
        r = space.numbering(ri)
        scale = 1 << level
        top = measure.approx(r)[1]
        lo, hi = -1, int(top * scale) + 1  # (hi/scale, R) is false since mu(R n A) <= mu(R)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if decider(token_index(space, Fraction(mid, scale), r)):
                lo = mid
            else:
                hi = mid
        return [token_index(space, Fraction(hi, scale), r)]

    return hints


def ce_tokens_box(a: ExactSet) -> OracleBox:
    """CE on the token universe of plus names of A, relative to exact caps of A."""
    d = token_decider(a)
    return ce_oracle_for_decidable(d, bisection_hints(a.space, a.measure, d), f"CE*[{a.label}]")


def machine_m(q: EnName, measure: ComputableMeasure) -> ZetaName:
    """Lists (v, w) whenever some (u, v) is enumerated in q and w > u."""
    space = measure.space

    def build():
        reader = EnReader(q)
        best: dict[RingWord, Fraction] = {}

        def absorb(t: int):
            changed = []
            for n in reader.take(t):
                tok = token_at(space, n)
                if tok is None:
                    continue
                u, r = tok
                if r not in best or u < best[r]:
                    best[r] = u
                    changed.append(r)
            return changed

        return _lister("minus", space, lambda r: (Fraction(0), best.get(r, POS_INF)), absorb)

    return ZetaName("minus", NameStream(build, f"M({q.label})"), measure)


def idpm_via_ce(f_ce: Callable[[EnName], EnName], p: ZetaName) -> ZetaName:
    """minus name from a plus name, given a CE box for token enumerations."""
    return weihrauch_apply(token_enumeration, lambda q: machine_m(q, p.measure), f_ce, p, strong=True)


# -- plus to minus and back through enumerations ----------------------------------------------


def idpm_oracle(o: BoundOracle) -> OracleBox:
    """plus -> minus relative to the upper bounds of an oracle for the named class."""

    def apply(p: ZetaName) -> ZetaName:
        if p.kind != "plus":
            raise PreconditionError(f"expected a plus name, got {p.kind}")
        if p.measure is not o.measure:
            raise PreconditionError("name and oracle live on different measures")
        return make_zeta(o, "minus")

    return OracleBox(apply, f"id+-[{o.label}]", "oracle")


def idp0_oracle(o: BoundOracle) -> OracleBox:
    """plus -> two-sided relative to an oracle."""

    def apply(p: ZetaName) -> ZetaName:
        if p.kind != "plus":
            raise PreconditionError(f"expected a plus name, got {p.kind}")
        return make_zeta(o, "both")

    return OracleBox(apply, f"id+0[{o.label}]", "oracle")


def idp0_via_idpm(f2: Callable[[ZetaName], ZetaName], p: ZetaName) -> ZetaName:
    """Two-sided name as the meet of p and F2(p)."""
    return weihrauch_apply(lambda x: x, zeta_meet, f2, p)


def idpm_via_idp0(f2: Callable[[ZetaName], ZetaName], p: ZetaName) -> ZetaName:
    return weihrauch_apply(lambda x: x, lambda q: zeta_split(q)[1], f2, p, strong=True)


def ce_via_idpm(f2: Callable[[ZetaName], ZetaName], e: EnName, m: ComputableMeasure) -> EnName:
    """Complement enumeration: from_enumeration, then F2, then machine N."""
    from .msets import from_enumeration, to_complement_enumeration

    return weihrauch_apply(lambda x: from_enumeration(x, m), lambda q: to_complement_enumeration(q, m),
                           f2, e, strong=True)


def first_elements(e: EnName, n: int, budget: int = 1 << 12) -> list[int]:
    """The first n distinct elements, doubling the budget as needed; fewer if the budget runs out."""
    b = 16
    while True:
        got = e.elements(b)
        if len(got) >= n or b >= budget:
            return got[:n]
        b *= 2


def iter_elements(e: EnName) -> Iterator[int]:
    reader = EnReader(e)
    for t in count(1):
        yield from reader.take(t)


__all__ = [
    "EnBlock",
    "EnName",
    "EnReader",
    "OracleBox",
    "bisection_hints",
    "ce_oracle_for_decidable",
    "ce_tokens_box",
    "ce_via_idpm",
    "contract_holds",
    "en_block",
    "en_from_bits",
    "en_from_elements",
    "en_of_decidable",
    "first_elements",
    "idp0_oracle",
    "idp0_via_idpm",
    "idpm_oracle",
    "idpm_via_ce",
    "idpm_via_idp0",
    "iter_elements",
    "machine_m",
    "replay",
    "token_at",
    "token_decider",
    "token_enumeration",
    "token_index",
    "word_at",
    "word_number",
    "weihrauch_apply",
]
