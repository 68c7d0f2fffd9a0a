"""List names of measurable-set classes and the translators between them.

A class [A] is named by a list of rational bounds on mu(R n A) (or on
mu(R minus A) for the primed kinds) for every ring element R.  Bar kinds
index the bounds by partition pieces as well: the key is ``(i, R)`` and the
value is mu(F_i n R n A).

Kinds and their tokens (tokens are plain tuples of Fractions, ints and
RingWords):

========  ====================  ==========================
kind      token                 meaning
========  ====================  ==========================
plus      (u, R)                u < mu(R n A)
minus     (R, w)                mu(R n A) < w
both      (u, R, w)             both of the above
pplus     (u, R)                mu(R minus A) < u
pminus    (u, R)                u < mu(R minus A)
pboth     (u, R, w)             u < mu(R minus A) < w
bplus     (u, i, R)             u < mu(F_i n R n A)
bminus    (i, R, w)             mu(F_i n R n A) < w
bboth     (u, i, R, w)          both
========  ====================  ==========================

Every name here is produced by :func:`cmeasure.reals.threshold_machine`, so
tokens are sound exactly and each true token appears after finitely many
steps.  Lists may repeat tokens; order carries no meaning.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import count
from typing import Any, Callable, Hashable, Iterable

from .algebra import PartitionSpec, RingSpace, RingWord
from .kernel import (
    ConfigError,
    DomainError,
    InconsistentNames,
    NameStream,
    PreconditionError,
    UnsupportedOperation,
    cantor_pair,
    cantor_unpair,
    interleave,
    nat_value,
    nat_word,
    precision_at,
    rat_value,
    rat_word,
    rational_index,
    tuple_words,
    untuple,
)
from .measure import ComputableMeasure
from .oracles import BoundOracle
from .reals import (
    ALL,
    NEG_INF,
    POS_INF,
    LowerRealName,
    RealName,
    UpperRealName,
    meet,
    revisit,
    sub_known_minus_lower,
    threshold_machine,
)

ZERO = Fraction(0)


@dataclass(frozen=True)
class Kind:
    side: str  # which bounds the tokens carry: lower, upper, both
    diff: bool  # value is mu(R minus A) instead of mu(R n A)
    bar: bool


KINDS: dict[str, Kind] = {
    "plus": Kind("lower", False, False),
    "minus": Kind("upper", False, False),
    "both": Kind("both", False, False),
    "pplus": Kind("upper", True, False),
    "pminus": Kind("lower", True, False),
    "pboth": Kind("both", True, False),
    "bplus": Kind("lower", False, True),
    "bminus": Kind("upper", False, True),
    "bboth": Kind("both", False, True),
}

# command line spellings
KIND_ALIASES = {
    "zeta+": "plus", "zeta-": "minus", "zeta": "both",
    "zeta'+": "pplus", "zeta'-": "pminus", "zeta'": "pboth",
    "zetabar+": "bplus", "zetabar-": "bminus", "zetabar": "bboth",
    "ζ+": "plus", "ζ−": "minus", "ζ-": "minus", "ζ": "both",
    "ζ′+": "pplus", "ζ′−": "pminus", "ζ′-": "pminus", "ζ′": "pboth",
    "ζ̄+": "bplus", "ζ̄−": "bminus", "ζ̄-": "bminus", "ζ̄": "bboth",
}


def kind_named(text: str) -> str:
    k = KIND_ALIASES.get(text, text)
    if k not in KINDS:
        raise ConfigError(f"unknown name kind {text!r}")
    return k


def _with_side(kind: str, side: str) -> str:
    info = KINDS[kind]
    for name, other in KINDS.items():
        if other == Kind(side, info.diff, info.bar):
            return name
    raise UnsupportedOperation(f"no {side} variant of {kind}")


def _flip_kind(kind: str, complement: bool) -> str:
    """Kind whose value is mu(key) minus this kind's value.

    ``complement`` keeps the value type (cap of the complement); otherwise
    cap and diff are exchanged (same class, primed view).
    """
    info = KINDS[kind]
    side = {"lower": "upper", "upper": "lower", "both": "both"}[info.side]
    diff = info.diff if complement else not info.diff
    for name, other in KINDS.items():
        if other == Kind(side, diff, info.bar):
            return name
    raise UnsupportedOperation(f"no flipped variant of {kind}")


@dataclass(frozen=True)
class ZetaName:
    kind: str
    stream: NameStream
    measure: ComputableMeasure
    partition: PartitionSpec | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"unknown kind {self.kind!r}")
        if KINDS[self.kind].bar and self.partition is None:
            raise ConfigError("bar kinds need a partition")

    @property
    def info(self) -> Kind:
        return KINDS[self.kind]

    @property
    def space(self) -> RingSpace:
        return self.measure.space

    def key_at(self, j: int):
        return key_schedule(self.space, self.info.bar)(j)

    def keyset(self, key) -> RingWord:
        return keyset(self.space, self.partition, key)

    def mu(self, key) -> Fraction:
        return self.measure.approx(self.keyset(key))[0]

    def prefix(self, budget: int) -> tuple:
        return self.stream.prefix(budget)


def bar_unpair(j: int) -> tuple[int, int]:
    """Position of the bar schedule -> (piece index, plain key position).

    Even positions follow the Cantor pairing, odd positions the ruler pairing
    2^i (2j + 1), which reaches fine keys of the first few pieces after
    linearly many steps.
    """
    h, odd = divmod(j, 2)
    if not odd:
        return cantor_unpair(h)
    m = h + 1
    i = (m & -m).bit_length() - 1
    return i, m >> (i + 1)


def bar_pair(i: int, j: int) -> int:
    return min(2 * cantor_pair(i, j), 2 * ((1 << i) * (2 * j + 1) - 1) + 1)


def key_schedule(space: RingSpace, bar: bool) -> Callable[[int], Any]:
    if not bar:
        return space.key

    def at(j: int):
        i, jj = bar_unpair(j)
        return (i, space.local_key(i, jj))

    return at


def keyset(space: RingSpace, partition: PartitionSpec | None, key) -> RingWord:
    if isinstance(key, tuple):
        return space.intersect(partition.piece(key[0]), key[1])  # type: ignore[union-attr]
    return key


# -- tokens -----------------------------------------------------------------------

def token_view(kind: str, tok: tuple) -> tuple[Any, Fraction | None, Fraction | None]:
    """(key, strict lower bound or None, strict upper bound or None) carried by a token."""
    info = KINDS[kind]
    if info.bar:
        if info.side == "lower":
            u, i, v = tok
            return (i, v), u, None
        if info.side == "upper":
            i, v, w = tok
            return (i, v), None, w
        u, i, v, w = tok
        return (i, v), u, w
    if info.side == "both":
        u, v, w = tok
        return v, u, w
    if kind == "minus":
        v, w = tok
        return v, None, w
    u, v = tok
    if info.side == "lower":
        return v, u, None
    return v, None, u


def make_token(kind: str, key, lo: Fraction | None, hi: Fraction | None) -> tuple:
    info = KINDS[kind]
    parts: tuple = key if info.bar else (key,)
    if info.side == "lower":
        return (lo,) + parts
    if info.side == "upper":
        return (hi,) + parts if kind == "pplus" else parts + (hi,)
    return (lo,) + parts + (hi,)


def token_size(kind: str, tok: tuple, space: RingSpace, limit: int | None = None) -> int:
    """Largest enumeration index among the token's components (rationals and key position).

    With ``limit``, any size above it may be reported as ``limit + 1``.  A
    rational of height p + q has index at least p + q - 1, which settles most
    refinement tokens without touching the enumeration.
    """
    key, lo, hi = token_view(kind, tok)
    qs = [q for q in (lo, hi) if q is not None]
    if limit is not None and any(abs(q.numerator) + q.denominator - 1 > limit for q in qs):
        return limit + 1
    sizes = [rational_index(q) for q in qs]
    if isinstance(key, tuple):
        sizes.append(bar_pair(key[0], space.key_position(key[1])))
    else:
        sizes.append(space.key_position(key))
    return max(sizes)


def encode_token(kind: str, tok: tuple) -> str:
    return tuple_words(*(nat_word(c) if isinstance(c, int) else c.word if isinstance(c, RingWord) else rat_word(c)
                         for c in tok))


def decode_token(kind: str, word: str, space: RingSpace) -> tuple:
    parts = untuple(word)
    key, lo, hi = token_view(kind, tuple(range(len(parts))))  # positions of each component
    out: list[Any] = [None] * len(parts)
    keypos = key if isinstance(key, tuple) else (None, key)
    if keypos[0] is not None:
        out[keypos[0]] = nat_value(parts[keypos[0]])
    out[keypos[1]] = space.element(parts[keypos[1]])
    for pos in (lo, hi):
        if pos is not None:
            out[pos] = rat_value(parts[pos])
    return tuple(out)


def show_token(kind: str, tok: tuple, space: RingSpace) -> str:
    """One line per token, e.g. ``LT 1/4 IN [0,1)``: 1/4 is below the measure of [0,1) n A."""
    key, lo, hi = token_view(kind, tok)
    where = space.show(key[1]) if isinstance(key, tuple) else space.show(key)
    if isinstance(key, tuple):
        where = f"F{key[0]} & {where}"
    info = KINDS[kind]
    prefix = "OUT " if info.diff else ""
    if info.side == "both":
        return f"{prefix}BETWEEN {lo} {hi} IN {where}"
    if lo is not None:
        return f"{prefix}LT {lo} IN {where}"
    return f"{prefix}GT {hi} IN {where}"


# -- evidence ---------------------------------------------------------------------

class _Evidence:
    """Best bounds per key seen so far in an input name."""

    def __init__(self, p: ZetaName):
        self.kind = p.kind
        self.cur = p.stream.cursor()
        self.lo: dict[Hashable, Fraction] = {}
        self.hi: dict[Hashable, Fraction] = {}

    def pull(self, budget: int) -> list:
        changed = []
        for tok in self.cur.take(budget):
            key, lo, hi = token_view(self.kind, tok)
            hit = False
            if lo is not None and (key not in self.lo or lo > self.lo[key]):
                self.lo[key] = lo
                hit = True
            if hi is not None and (key not in self.hi or hi < self.hi[key]):
                self.hi[key] = hi
                hit = True
            if hit:
                changed.append(key)
        return changed

    def bounds(self, key, mu: Fraction) -> tuple[Fraction, Fraction]:
        """Sound non-strict bounds; values always lie in [0, mu(key))."""
        return max(ZERO, self.lo.get(key, ZERO)), min(mu, self.hi.get(key, mu))


def _lister(kind: str, space: RingSpace, bound: Callable[[Any], tuple], absorb: Callable[[int], Any],
            dep: Callable[[Any], Hashable] | None = None):
    """Threshold machine listing the tokens of ``kind`` whose bounds ``bound(key)`` already proves."""
    info = KINDS[kind]

    def token(*args):
        if info.side == "lower":
            u, key = args
            return make_token(kind, key, u, None)
        if info.side == "upper":
            key, w = args
            return make_token(kind, key, None, w)
        u, key, w = args
        return make_token(kind, key, u, w)

    return threshold_machine(side=info.side, bound=bound, token=token, absorb=absorb,
                             keys=key_schedule(space, info.bar), dep=dep)()


def _translate(kind: str, inputs: list[ZetaName], bound: Callable[[list[_Evidence], Any], tuple],
               label: str, partition: PartitionSpec | None = None,
               touch: Callable[[int, Any], Hashable] | None = None,
               dep: Callable[[Any], Hashable] | None = None,
               check: Callable[[list[_Evidence], Any], None] | None = None) -> ZetaName:
    """Output name whose bounds are computed from evidence read off ``inputs`` at the same budget."""
    measure = inputs[0].measure

    def build():
        evs = [_Evidence(p) for p in inputs]

        def absorb(t: int):
            changed = set()
            for idx, ev in enumerate(evs):
                for key in ev.pull(t):
                    if check is not None:
                        check(evs, key)
                    changed.add(touch(idx, key) if touch else key)
            return changed

        return _lister(kind, measure.space, lambda key: bound(evs, key), absorb, dep)

    return ZetaName(kind, NameStream(build, label), measure, partition)


def _same_space(*names: ZetaName) -> None:
    spaces = {p.space.name for p in names}
    if len(spaces) > 1:
        raise PreconditionError(f"names over different spaces: {sorted(spaces)}")


# -- constructors -------------------------------------------------------------------

def make_zeta(o: BoundOracle, kind: str = "plus", partition: PartitionSpec | None = None,
              label: str | None = None) -> ZetaName:
    """Name of the oracle's class.  The oracle is asked about the newest key and one revisited key per step."""
    info = KINDS[kind]
    m = o.measure
    space = m.space
    if info.bar and partition is None:
        raise ConfigError("bar kinds need a partition")
    need_lower = info.side in ("lower", "both")
    need_upper = info.side in ("upper", "both")
    if info.diff:
        need_lower, need_upper = need_upper, need_lower
    if (need_lower and o.lower is None) or (need_upper and o.upper is None):
        raise PreconditionError(f"oracle lacks the side needed for {kind}")
    keys = key_schedule(space, info.bar)

    def build():
        lo: dict[Hashable, Fraction] = {}
        hi: dict[Hashable, Fraction] = {}

        def absorb(t: int):
            k = precision_at(t)
            changed = []
            for pos in {t - 1, revisit(t)}:
                key = keys(pos)
                r = keyset(space, partition, key)
                mu = m.approx(r, k)[0]
                a = Fraction(o.lower(r, k)) if o.lower is not None else Fraction(0)
                b = Fraction(o.upper(r, k)) if o.upper is not None else mu
                if info.diff:
                    a, b = mu - b, mu - a
                if key not in lo or a > lo[key] or b < hi[key]:
                    lo[key] = max(a, lo.get(key, a))
                    hi[key] = min(b, hi.get(key, b))
                    changed.append(key)
            return changed

        def bound(key):
            if key in lo:
                return lo[key], hi[key]
            return ZERO, m.approx(keyset(space, partition, key))[0]

        return _lister(kind, space, bound, absorb)

    return ZetaName(kind, NameStream(build, label or f"{kind}({o.label})"), m, partition)


def make_zeta_plus(o: BoundOracle) -> ZetaName:
    return make_zeta(o, "plus")


def make_zeta_minus(o: BoundOracle) -> ZetaName:
    return make_zeta(o, "minus")


def make_zeta_both(o: BoundOracle) -> ZetaName:
    return make_zeta(o, "both")


# -- reading bounds off a name ---------------------------------------------------------

def _check_key(p: ZetaName, key) -> Any:
    if isinstance(key, tuple):
        if not p.info.bar:
            raise DomainError("partition-indexed key for a plain name")
        i, r = key
        if not isinstance(i, int) or i < 0:
            raise DomainError(f"bad partition index {i!r}")
        return (i, p.space.check(r))
    if p.info.bar:
        raise DomainError("bar names are read at (i, R) keys")
    return p.space.check(key)


def _bound_side(p: ZetaName, key, upper: bool):
    def build():
        ev = _Evidence(p)
        if upper:
            return threshold_machine(side="upper", bound=lambda _k: (NEG_INF, ev.hi.get(key, POS_INF)),
                                     token=lambda _k, w: w, absorb=lambda t: (ev.pull(t), ALL)[1])()
        return threshold_machine(side="lower", bound=lambda _k: (ev.lo.get(key, NEG_INF), POS_INF),
                                 token=lambda u, _k=None: u, absorb=lambda t: (ev.pull(t), ALL)[1])()

    stream = NameStream(build, f"{p.kind}@{key!r}")
    return UpperRealName(stream) if upper else LowerRealName(stream)


def measure_cap_lower(p: ZetaName, key) -> LowerRealName:
    """Lower name of the value named at ``key`` (mu(R n A), or mu(R minus A) for primed kinds)."""
    key = _check_key(p, key)
    if p.info.side == "upper":
        raise PreconditionError(f"{p.kind} names carry no lower bounds")
    return _bound_side(p, key, False)


def measure_cap_upper(p: ZetaName, key) -> UpperRealName:
    key = _check_key(p, key)
    if p.info.side == "lower":
        raise PreconditionError(f"{p.kind} names carry no upper bounds")
    return _bound_side(p, key, True)


def measure_cap_real(p: ZetaName, key) -> RealName:
    return RealName(measure_cap_lower(p, key), measure_cap_upper(p, key))


def best_bounds(p: ZetaName, key, budget: int) -> tuple:
    """Best (strict) bounds the prefix of length ``budget`` carries for ``key``."""
    lo, hi = NEG_INF, POS_INF
    for tok in p.stream.prefix(budget):
        k, a, b = token_view(p.kind, tok)
        if k == key:
            if a is not None and a > lo:
                lo = a
            if b is not None and b < hi:
                hi = b
    return lo, hi


def token_set(p: ZetaName, budget: int, size: int | None = None) -> frozenset:
    toks = p.stream.prefix(budget)
    if size is None:
        return frozenset(toks)
    return frozenset(t for t in toks if token_size(p.kind, t, p.space, size) <= size)


# -- meet, split, complement, primed views -------------------------------------------------

def zeta_meet(p: ZetaName, q: ZetaName) -> ZetaName:
    """Two-sided name from a lower and an upper name of the same class; crossing bounds raise."""
    _same_space(p, q)
    lower_kind = _with_side(p.kind, "lower")
    if p.kind != lower_kind or q.kind != _with_side(p.kind, "upper"):
        raise PreconditionError(f"cannot meet {p.kind} with {q.kind}")
    both = _with_side(p.kind, "both")
    partition = p.partition or q.partition

    def bound(evs, key):
        mu = p.mu(key)
        return evs[0].bounds(key, mu)[0], evs[1].bounds(key, mu)[1]

    def check(evs, key):
        lo, hi = evs[0].lo.get(key), evs[1].hi.get(key)
        if lo is not None and hi is not None and lo >= hi:
            raise InconsistentNames(f"bounds {lo} and {hi} cross at {key!r}")

    return _translate(both, [p, q], bound, f"meet({p.stream.label},{q.stream.label})",
                      partition, check=check)


def zeta_split(r: ZetaName) -> tuple[ZetaName, ZetaName]:
    if r.info.side != "both":
        raise PreconditionError(f"split needs a two-sided name, got {r.kind}")
    lower, upper = _with_side(r.kind, "lower"), _with_side(r.kind, "upper")

    def view(kind):
        return _translate(kind, [r], lambda evs, key: evs[0].bounds(key, r.mu(key)), f"{kind}<{r.stream.label}",
                          r.partition)

    return view(lower), view(upper)


def weaken(r: ZetaName, side: str) -> ZetaName:
    return zeta_split(r)[0 if side == "lower" else 1]


def _flip(p: ZetaName, kind: str, label: str) -> ZetaName:
    def bound(evs, key):
        mu = p.mu(key)
        lo, hi = evs[0].bounds(key, mu)
        return mu - hi, mu - lo

    return _translate(kind, [p], bound, label, p.partition)


def complement(p: ZetaName) -> ZetaName:
    """Name of the complement class, with lower and upper sides exchanged (plus becomes minus)."""
    return _flip(p, _flip_kind(p.kind, True), f"complement({p.stream.label})")


def complement_plus_to_minus(p: ZetaName) -> ZetaName:
    if p.kind != "plus":
        raise PreconditionError(f"expected a plus name, got {p.kind}")
    return complement(p)


def complement_minus_to_plus(p: ZetaName) -> ZetaName:
    if p.kind != "minus":
        raise PreconditionError(f"expected a minus name, got {p.kind}")
    return complement(p)


def to_primed(p: ZetaName) -> ZetaName:
    """plus -> pplus, minus -> pminus, both -> pboth, using mu(R minus A) = mu(R) - mu(R n A)."""
    if p.info.diff or p.info.bar:
        raise PreconditionError(f"{p.kind} has no primed variant")
    return _flip(p, _flip_kind(p.kind, False), f"primed({p.stream.label})")


def from_primed(p: ZetaName) -> ZetaName:
    if not p.info.diff:
        raise PreconditionError(f"{p.kind} is not primed")
    return _flip(p, _flip_kind(p.kind, False), f"unprimed({p.stream.label})")


def primed_as_complement(p: ZetaName) -> ZetaName:
    """Read a primed name of A as an unprimed name of the complement, token by token.

    pminus tokens are literally plus tokens of the complement.  pplus tokens
    ``(u, R)`` become minus tokens ``(R, u)``: the same statement with the
    components in the other order.
    """
    if not p.info.diff:
        raise PreconditionError(f"{p.kind} is not primed")
    target = {"pminus": "plus", "pplus": "minus", "pboth": "both"}[p.kind]

    def machine():
        cur = p.stream.cursor()
        for t in count(1):
            out = []
            for tok in cur.take(t):
                key, lo, hi = token_view(p.kind, tok)
                out.append(make_token(target, key, lo, hi))
            yield out

    return ZetaName(target, NameStream(machine, f"as-complement({p.stream.label})"), p.measure, p.partition)


# -- restriction and totals -------------------------------------------------------------

def restrict(p: ZetaName, g: RingWord) -> ZetaName:
    """Name of [A n G] in the same kind."""
    space = p.space
    space.check(g)

    def inner(key):
        if isinstance(key, tuple):
            return (key[0], space.intersect(key[1], g))
        return space.intersect(key, g)

    def bound(evs, key):
        ik = inner(key)
        lo, hi = evs[0].bounds(ik, p.mu(ik))
        if p.info.diff:
            # mu(K minus (A n G)) = mu(K minus G) + mu((K n G) minus A)
            outside = p.measure.approx(space.diff(p.keyset(key), g))[0]
            return lo + outside, hi + outside
        return lo, hi

    return _translate(p.kind, [p], bound, f"restrict({p.stream.label},{space.show(g)})", p.partition, dep=inner)


def _sup_lister(p: ZetaName, value: Callable[[_Evidence, Any], Fraction | None], label: str) -> LowerRealName:
    def build():
        ev = _Evidence(p)
        best = [NEG_INF]

        def absorb(t: int):
            for key in ev.pull(t):
                v = value(ev, key)
                if v is not None and (best[0] == NEG_INF or v > best[0]):
                    best[0] = v
            return ALL

        return threshold_machine(side="lower", bound=lambda _k: (best[0], POS_INF),
                                 token=lambda u, _k=None: u, absorb=absorb)()

    return LowerRealName(NameStream(build, label))


def total_measure(p: ZetaName) -> LowerRealName:
    """Extended lower name of mu(A): the sup over ring elements of the listed lower bounds."""
    if p.kind != "plus":
        raise PreconditionError(f"expected a plus name, got {p.kind}")
    return _sup_lister(p, lambda ev, key: ev.lo.get(key), f"mu({p.stream.label})<")


def total_complement(p: ZetaName) -> LowerRealName:
    """Extended lower name of mu(complement of A) from a minus name."""
    if p.kind != "minus":
        raise PreconditionError(f"expected a minus name, got {p.kind}")

    def value(ev, key):
        hi = ev.hi.get(key)
        return None if hi is None else p.mu(key) - hi

    return _sup_lister(p, value, f"mu(~{p.stream.label})<")


def total_rho(p: ZetaName, total: RealName | None = None) -> RealName:
    """Two-sided name of mu(A) from a two-sided name, given a name of a finite mu(Omega)."""
    if p.kind != "both":
        raise PreconditionError(f"expected a two-sided name, got {p.kind}")
    if total is None:
        total = p.measure.total()  # raises UnsupportedOperation for infinite or unknown totals
    plus, minus = zeta_split(p)
    return meet(total_measure(plus), sub_known_minus_lower(total, total_complement(minus)))


# -- partitions -----------------------------------------------------------------------

def zeta_to_zetabar(p: ZetaName, partition: PartitionSpec) -> ZetaName:
    """Bar name: the value at (i, R) is the plain value at F_i n R."""
    if p.info.diff or p.info.bar:
        raise PreconditionError(f"{p.kind} has no bar variant")
    if partition.space is not p.space:
        raise PreconditionError("partition over another space")
    kind = "b" + p.kind
    space = p.space

    def inner(key):
        return space.intersect(partition.piece(key[0]), key[1])

    def bound(evs, key):
        ik = inner(key)
        return evs[0].bounds(ik, p.mu(ik))

    return _translate(kind, [p], bound, f"bar({p.stream.label})", partition, dep=inner)


def zetabar_to_zeta(p: ZetaName, partition: PartitionSpec | None = None) -> ZetaName:
    """Plain name from a bar name over a majorising partition.

    R lies inside the union of F_i for i <= g'(R), so mu(R n A) is the finite
    sum of the piece values.  Lower bounds add the listed piece bounds (0 for
    unlisted pieces); upper bounds start from mu(R) and subtract the gap
    mu(F_i n R) - hi_i that each listed piece upper bound proves.
    """
    partition = partition or p.partition
    if not p.info.bar:
        raise PreconditionError(f"{p.kind} is not a bar kind")
    if partition is None or not partition.majorising:
        raise UnsupportedOperation("the partition has no majorising witness")
    kind = p.kind[1:]
    by_key: dict[Any, dict[int, None]] = {}
    space = p.space

    def touch(_idx, key):
        i, r = key
        by_key.setdefault(r, {})[i] = None
        return r

    def bound(evs, r):
        ev = evs[0]
        n = partition.g_prime(r)
        mu = p.measure.approx(r)[0]
        lo, hi = Fraction(0), mu
        for i in by_key.get(r, ()):
            if i > n:
                continue
            a = ev.lo.get((i, r))
            if a is not None and a > 0:
                lo += a
            b = ev.hi.get((i, r))
            if b is not None:
                piece = p.measure.approx(space.intersect(partition.piece(i), r))[0]
                if piece > b:
                    hi -= piece - b
        return lo, max(hi, lo)

    return _translate(kind, [p], bound, f"unbar({p.stream.label})", None, touch=touch)


# -- enumerations of subsets of N ----------------------------------------------------------

def from_enumeration(e, m: ComputableMeasure) -> ZetaName:
    """plus name of A from an enumeration of A, using lower bounds mu(R n A_k) for the finite stages A_k."""
    from .degrees import EnReader

    if m.space.name != "natfin":
        raise PreconditionError("enumerations name subsets of N")

    def build():
        reader = EnReader(e)
        known: set[int] = set()

        def absorb(t: int):
            new = [n for n in reader.take(t) if n not in known]
            if not new:
                return ()
            known.update(new)
            fresh = set(new)
            return lambda r: any(n in fresh for n in r.form)

        def bound(r):
            return m.approx(m.space.make(n for n in r.form if n in known))[0], POS_INF

        return threshold_machine(side="lower", bound=bound, token=lambda u, r: (u, r), absorb=absorb,
                                 keys=m.space.key)()

    return ZetaName("plus", NameStream(build, f"plus(en:{getattr(e, 'label', '')})"), m)


def to_complement_enumeration(p: ZetaName, m: ComputableMeasure | None = None):
    """Enumeration of the complement of A from a minus name: n is out of A once mu({n} n A) < weight(n) is listed."""
    from .degrees import EnName, en_block

    m = m or p.measure
    if p.kind != "minus":
        raise PreconditionError(f"expected a minus name, got {p.kind}")
    weight = getattr(m, "weight", None)
    if weight is None or m.space.name != "natfin":
        raise UnsupportedOperation("needs a weighted measure on N with positive weights")

    def machine():
        cur = p.stream.cursor()
        found: set[int] = set()
        for t in count(1):
            out: list[str] = []
            for r, w in cur.take(t):
                if len(r.form) == 1:
                    n = r.form[0]
                    if n not in found and w <= weight(n):
                        found.add(n)
                        out.extend(en_block(n))
            yield out or ["0"]

    return EnName(NameStream(machine, f"en(~{p.stream.label})"))


# -- lower name plus upper bound of the total -------------------------------------------------

def _chunks(p: NameStream) -> NameStream:
    """Exactly one item per step: the tuple of tokens that step emitted."""

    def machine():
        for t in count(1):
            yield [tuple(p.slice(p.length_at(t - 1), p.length_at(t)))]

    return NameStream(machine, p.label)


def _unchunk(p: NameStream, side: int) -> NameStream:
    def machine():
        for t in count(1):
            # position 2(t-1)+side of the interleaving holds step t of the component
            have = p.length_at(2 * t)
            pos = 2 * (t - 1) + side
            yield list(p.slice(pos, pos + 1)[0]) if pos < have else []

    return NameStream(machine, f"{p.label}[{side}]")


@dataclass(frozen=True)
class Delta1Name:
    """A plus name of A paired with an upper name of mu(A)."""

    stream: NameStream
    measure: ComputableMeasure

    @property
    def zeta(self) -> ZetaName:
        return ZetaName("plus", _unchunk(self.stream, 0), self.measure)

    @property
    def upper(self) -> UpperRealName:
        return UpperRealName(_unchunk(self.stream, 1))


def delta1_pair(p: ZetaName, q: UpperRealName) -> Delta1Name:
    if p.kind != "plus":
        raise PreconditionError(f"expected a plus name, got {p.kind}")
    return Delta1Name(interleave(_chunks(p.stream), _chunks(q.stream)), p.measure)


def delta1_measure(d: Delta1Name) -> RealName:
    return meet(total_measure(d.zeta), d.upper)


def zeta_from_tokens(kind: str, tokens: Iterable[tuple], measure: ComputableMeasure,
                     partition: PartitionSpec | None = None) -> ZetaName:
    """Finite name prefix wrapped as a name (for replaying dumped tokens)."""
    data = tuple(tokens)
    return ZetaName(kind, NameStream(lambda: ([t] for t in data), "tokens"), measure, partition)
