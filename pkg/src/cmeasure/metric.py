"""Distances between measurable sets and the Cauchy names they induce.

Two metrics live here.  The Frechet distance mu(A sym B) is used on sets of
finite measure.  The weighted distance

    dbar(A, B) = sum_i e(mu(F_i n (A sym B))) 2^-i,   e(x) = x / (1 + x),

works for every measurable set, given a partition F.  A Cauchy name is a
sequence of ring elements v_0, v_1, ... with d(v_i, v_j) <= 2^-i for i < j.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count
from typing import Callable

from .algebra import PartitionSpec, RingSpace, RingWord
from .kernel import (
    BudgetExhausted,
    DomainError,
    NameStream,
    PreconditionError,
    UnsupportedOperation,
)
from .measure import ComputableMeasure
from .msets import ZetaName, _Evidence, _lister, make_zeta, zeta_split
from .oracles import ExactSet
from .reals import (
    ALL,
    NEG_INF,
    POS_INF,
    BestReader,
    LowerRealName,
    RealName,
    UpperRealName,
    exact_real,
    real_from_bounds,
    sub_known_minus_lower,
    threshold_machine,
)
from .msets import total_complement

# -- Frechet distance ---------------------------------------------------------------


def frechet_exact(m: ComputableMeasure, r: RingWord, s: RingWord) -> Fraction:
    return m.approx(m.space.sym_diff(m.space.check(r), m.space.check(s)))[0]


def frechet_d(m: ComputableMeasure, r: RingWord, s: RingWord) -> RealName:
    return exact_real(frechet_exact(m, r, s), "d")


# -- the weighted metric ------------------------------------------------------------------


def e_transfer(x: Fraction) -> Fraction:
    """x / (1 + x): maps [0, oo) onto [0, 1), increasing, e(x) <= x."""
    x = Fraction(x)
    if x < 0:
        raise DomainError(f"e is defined on [0, oo), got {x}")
    return x / (1 + x)


def e_inverse(y: Fraction) -> Fraction:
    """y / (1 - y); at most 2y for y <= 1/2."""
    y = Fraction(y)
    if not 0 <= y < 1:
        raise DomainError(f"inverse of e is defined on [0, 1), got {y}")
    return y / (1 - y)


EXACT_TERM_LIMIT = 100_000


@dataclass
class WeightedMetricSpec:
    """Partition, transfer function and truncation rule of dbar.  Term i is at most 2^-i."""

    partition: PartitionSpec
    measure: ComputableMeasure
    transfer: Callable[[Fraction], Fraction] = e_transfer

    def truncation(self, k: int) -> int:
        """Terms summed for precision 2^-k; the tail after term m is at most 2^-m."""
        return k

    def term(self, i: int, r: RingWord, s: RingWord) -> Fraction:
        sp = self.measure.space
        piece = sp.intersect(self.partition.piece(i), sp.sym_diff(r, s))
        return self.transfer(self.measure.approx(piece)[0]) / (1 << i)

    def bounds(self, r: RingWord, s: RingWord, k: int) -> tuple[Fraction, Fraction]:
        m = self.truncation(k)
        lo = sum((self.term(i, r, s) for i in range(m + 1)), Fraction(0))
        return lo, lo + Fraction(1, 1 << m)

    def exact(self, r: RingWord, s: RingWord) -> Fraction:
        """Finite sum over i <= g'(r sym s); needs a majorising partition with a small witness."""
        if not self.partition.majorising:
            raise UnsupportedOperation("exact dbar needs a majorising partition")
        diff = self.measure.space.sym_diff(r, s)
        if not diff.form:
            return Fraction(0)
        n = self.partition.g_prime(diff)
        if n > EXACT_TERM_LIMIT:
            raise UnsupportedOperation(f"majorising witness {n} too large for an exact sum")
        return sum((self.term(i, r, s) for i in range(n + 1)), Fraction(0))

    def distance(self, r: RingWord, s: RingWord, k: int = 64) -> tuple[Fraction, Fraction]:
        try:
            d = self.exact(r, s)
            return d, d
        except UnsupportedOperation:
            return self.bounds(r, s, k)


def natural_metric(m: ComputableMeasure) -> WeightedMetricSpec:
    return WeightedMetricSpec(m.space.natural_partition(), m)


def dbar(r: RingWord, s: RingWord, spec: WeightedMetricSpec) -> RealName:
    sp = spec.measure.space
    sp.check(r), sp.check(s)
    return real_from_bounds(lambda k: spec.bounds(r, s, k), "dbar")


def dbar_exact(r: RingWord, s: RingWord, spec: WeightedMetricSpec) -> Fraction:
    return spec.exact(r, s)


# -- Cauchy names -----------------------------------------------------------------------


@dataclass(frozen=True)
class CauchyName:
    """Stream of ring elements; ``metric`` is "frechet" or "dbar"."""

    stream: NameStream
    measure: ComputableMeasure
    metric: str = "frechet"
    spec: WeightedMetricSpec | None = None

    def words(self, n: int, budget: int = 1 << 20) -> list[RingWord]:
        b = 1
        while self.stream.length_at(b) < n:
            if b >= budget:
                raise BudgetExhausted(f"only {self.stream.length_at(b)} of {n} words within budget {budget}")
            b = min(2 * b, budget)
        return list(self.stream.slice(0, n))

    def distance(self, r: RingWord, s: RingWord) -> tuple[Fraction, Fraction]:
        if self.metric == "frechet":
            d = frechet_exact(self.measure, r, s)
            return d, d
        return self.spec.distance(r, s)  # type: ignore[union-attr]


def cauchy_from_words(words: list[RingWord], m: ComputableMeasure, metric: str = "frechet",
                      spec: WeightedMetricSpec | None = None) -> CauchyName:
    """Finite sequence, last word repeated forever."""
    if not words:
        raise DomainError("empty sequence")
    data = list(words)

    def machine():
        for w in data:
            yield [w]
        while True:
            yield [data[-1]]

    return CauchyName(NameStream(machine, "words"), m, metric, spec)


@dataclass
class ModulusReport:
    pairs: int = 0
    violations: list[tuple[int, int, Fraction]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_modulus(words: list[RingWord], m: ComputableMeasure, metric: str = "frechet",
                  spec: WeightedMetricSpec | None = None) -> ModulusReport:
    """d(v_i, v_j) <= 2^-i for all i < j, checked exactly (dbar: via certified bounds)."""
    rep = ModulusReport()
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            rep.pairs += 1
            if metric == "frechet":
                lo = hi = frechet_exact(m, words[i], words[j])
            else:
                lo, hi = spec.distance(words[i], words[j])  # type: ignore[union-attr]
            if hi > Fraction(1, 1 << i):
                rep.violations.append((i, j, lo))
    return rep


# -- finding close ring elements ----------------------------------------------------------


def _levels_visible(space: RingSpace, budget: int, position: Callable[[int], int]) -> int:
    """Finest cell level whose cells have all been visited by ``budget`` (-1 if none)."""
    level = -1
    while level < 40 and position(4 * space.last_cell(level + 1) + 3) < budget:
        level += 1
    return level


def _search(space: RingSpace, measure: ComputableMeasure, eps: Fraction, upper_total: Fraction,
            lower_cap: Callable[[RingWord], Fraction | None], budget: int,
            position: Callable[[int], int], region: RingWord | None = None) -> RingWord | None:
    """A ring element S with mu(B sym S) < eps, certified by mu(B) + mu(S) - 2 mu(B n S) < eps.

    ``lower_cap(S)`` bounds mu(B n S) from below when the evidence covers S.
    Candidates come in numbering order first, then as unions of the cells
    where the evidence shows B occupies more than half of the cell.
    """

    def clip(r: RingWord) -> RingWord:
        return r if region is None else space.intersect(r, region)

    def mu(r: RingWord) -> Fraction:
        return measure.approx(r)[0]

    if upper_total < eps:
        return space.empty
    j = 0
    while position(2 * j) < budget:
        s = space.key(2 * j)  # memoised numbering(j)
        lb = lower_cap(s)
        if lb is not None:
            cs = clip(s)
            if upper_total + mu(cs) - 2 * lb < eps:
                return cs
        j += 1
    for level in range(_levels_visible(space, budget, position), -1, -1):
        chosen, lb = [], Fraction(0)
        for c in space.cells(level):
            cc = clip(c)
            if not cc.form:
                continue
            a = lower_cap(c)
            if a is not None and a > mu(cc) / 2:
                chosen.append(cc)
                lb += a
        s = space.union_all(chosen)
        if upper_total + mu(s) - 2 * lb < eps:
            return s
    return None


def _powers_of_two(t: int) -> bool:
    return t & (t - 1) == 0


# -- xi names ---------------------------------------------------------------------------------


@dataclass(frozen=True)
class XiName:
    """kind plus: (plus name, upper name of mu(A)); minus: (minus name, lower name); both: (both name, real name)."""

    kind: str
    zeta: ZetaName
    real: LowerRealName | UpperRealName | RealName


def make_xi(a: ExactSet, kind: str = "both") -> XiName:
    tot = a.total()
    if tot is None or tot == POS_INF:
        raise PreconditionError(f"{a.label} has no finite reference measure")
    r = exact_real(Fraction(tot), f"mu({a.label})")
    o = a.oracle()
    if kind == "plus":
        return XiName("plus", make_zeta(o, "plus"), r.upper)
    if kind == "minus":
        return XiName("minus", make_zeta(o, "minus"), r.lower)
    return XiName("both", make_zeta(o, "both"), r)


def xi_to_xiplus(x: XiName) -> XiName:
    if x.kind != "both":
        raise PreconditionError("expected a two-sided xi name")
    return XiName("plus", zeta_split(x.zeta)[0], x.real.upper)  # type: ignore[union-attr]


def xi_to_ximinus(x: XiName) -> XiName:
    if x.kind != "both":
        raise PreconditionError("expected a two-sided xi name")
    return XiName("minus", zeta_split(x.zeta)[1], x.real.lower)  # type: ignore[union-attr]


def xiplus_to_xiC(x: XiName) -> CauchyName:
    """Cauchy name: v_i is a searched ring element with mu(A sym v_i) < 2^-i-1.

    The search runs at budgets 1, 2, 4, ... on the evidence read so far, so the
    emitted words depend only on the budget.
    """
    if x.kind != "plus":
        raise PreconditionError("expected a xi+ name")
    p = x.zeta
    space, m = p.space, p.measure

    def machine():
        ev = _Evidence(p)
        ub = BestReader(x.real)  # type: ignore[arg-type]
        stage = 0
        for t in count(1):
            ev.pull(t)
            top = ub.at(t)
            out = []
            if _powers_of_two(t) and top != POS_INF:
                while True:
                    eps = Fraction(1, 1 << (stage + 1))
                    s = _search(space, m, eps, Fraction(top), lambda r: _lower_cap(ev, r), t, lambda j: j)
                    if s is None:
                        break
                    out.append(s)
                    stage += 1
            yield out

    return CauchyName(NameStream(machine, f"xiC({p.stream.label})"), m, "frechet")


def _lower_cap(ev: _Evidence, r: RingWord) -> Fraction | None:
    if not r.form:
        return Fraction(0)
    got = ev.lo.get(r)
    return None if got is None else max(got, Fraction(0))


def ximinus_to_xiplus(x: XiName, total: RealName | None = None) -> XiName:
    """xi- to xi+ on N with a finite, two-sided computable mu(Omega).

    Lower bounds of mu(A n v) come from mu(A) - mu(A minus v), and
    mu(A minus v) <= mu(Omega) - mu(v) - sum over listed atoms {i} outside v of
    (w_i - upper bound of mu({i} n A)).  Without a finite total this direction
    is not available; see the notes on the counting measure.
    """
    if x.kind != "minus":
        raise PreconditionError("expected a xi- name")
    p = x.zeta
    m = p.measure
    if m.space.name != "natfin" or getattr(m, "weight", None) is None:
        raise UnsupportedOperation("xi- to xi+ is implemented for weighted measures on N only")
    if total is None:
        total = m.total()
    upper = sub_known_minus_lower(total, total_complement(p))

    def build():
        ev = _Evidence(p)
        lb_a = BestReader(x.real)  # type: ignore[arg-type]
        ub_omega = BestReader(total.upper)  # type: ignore[union-attr]
        savings: dict[int, Fraction] = {}
        state = {"lbA": NEG_INF, "ubO": POS_INF, "sum": Fraction(0)}

        def absorb(t: int):
            for key in ev.pull(t):
                if len(key.form) == 1 and key in ev.hi:
                    i = key.form[0]
                    s = max(Fraction(0), m.weight(i) - ev.hi[key])  # type: ignore[attr-defined]
                    if s > savings.get(i, Fraction(0)):
                        state["sum"] += s - savings.get(i, Fraction(0))
                        savings[i] = s
            state["lbA"] = lb_a.at(t)
            state["ubO"] = ub_omega.at(t)
            return ALL if _powers_of_two(t) else ()

        def bound(v: RingWord):
            if state["lbA"] == NEG_INF or state["ubO"] == POS_INF:
                return Fraction(0), POS_INF
            inside = sum((savings.get(i, Fraction(0)) for i in v.form), Fraction(0))
            outside = Fraction(state["ubO"]) - m.approx(v)[0] - (state["sum"] - inside)
            return max(Fraction(0), Fraction(state["lbA"]) - outside), POS_INF

        return _lister("plus", m.space, bound, absorb)

    return XiName("plus", ZetaName("plus", NameStream(build, f"plus({p.stream.label})"), m), upper)


def ximinus_to_xiC(x: XiName, total: RealName | None = None) -> CauchyName:
    return xiplus_to_xiC(ximinus_to_xiplus(x, total))


def measure_from_xiC(c: CauchyName) -> RealName:
    """mu(A) = d(empty, A), so mu(v_i) is within 2^-i of mu(A)."""
    if c.metric != "frechet":
        raise PreconditionError("needs a Frechet Cauchy name")
    return _real_from_words(c, lambda w: c.measure.approx(w)[0], "mu(xiC)")


def _real_from_words(c: CauchyName, value: Callable[[RingWord], Fraction], label: str) -> RealName:
    def side(upper: bool) -> NameStream:
        def build():
            cur = c.stream.cursor()
            state = {"i": 0, "best": POS_INF if upper else NEG_INF}

            def absorb(t: int):
                for w in cur.take(t):
                    eps = Fraction(1, 1 << state["i"])
                    v = value(w) + eps if upper else value(w) - eps
                    if (upper and v < state["best"]) or (not upper and v > state["best"]):
                        state["best"] = v
                    state["i"] += 1
                return ALL

            if upper:
                return threshold_machine(side="upper", bound=lambda _k: (NEG_INF, state["best"]),
                                         token=lambda _k, w: w, absorb=absorb)()
            return threshold_machine(side="lower", bound=lambda _k: (state["best"], POS_INF),
                                     token=lambda u, _k=None: u, absorb=absorb)()

        return NameStream(build, label + (">" if upper else "<"))

    return RealName(LowerRealName(side(False)), UpperRealName(side(True)))


def xiC_to_xi(c: CauchyName) -> XiName:
    """Two-sided xi name: |mu(R n v_i) - mu(R n A)| <= 2^-i for every ring element R."""
    if c.metric != "frechet":
        raise PreconditionError("needs a Frechet Cauchy name")
    m, space = c.measure, c.measure.space

    def build():
        cur = c.stream.cursor()
        words: list[RingWord] = []

        def absorb(t: int):
            new = cur.take(t)
            words.extend(new)
            return ALL if new else ()

        def bound(r: RingWord):
            if not words:
                return Fraction(0), m.approx(r)[0]
            i = len(words) - 1
            eps = Fraction(1, 1 << i)
            v = m.approx(space.intersect(r, words[-1]))[0]
            return max(Fraction(0), v - eps), min(m.approx(r)[0], v + eps)

        return _lister("both", space, bound, absorb)

    zeta = ZetaName("both", NameStream(build, "zeta(xiC)"), m)
    return XiName("both", zeta, measure_from_xiC(c))


# -- the weighted metric and bar names ------------------------------------------------------


def zetabar_to_xibarC(p: ZetaName, spec: WeightedMetricSpec | None = None) -> CauchyName:
    """dbar-Cauchy name from a two-sided bar name.

    Stage k finds, for each piece i <= k+1, a ring element S_i inside F_i with
    mu((F_i n A) sym S_i) < 2^-k-1 / (k+2), and emits the union of the S_i;
    its dbar distance to A is below 2^-k-1.
    """
    from .msets import bar_pair

    if p.kind != "bboth":
        raise PreconditionError("expected a two-sided bar name")
    spec = spec or WeightedMetricSpec(p.partition, p.measure)  # type: ignore[arg-type]
    part = spec.partition
    if part is not p.partition:
        raise PreconditionError("metric and name use different partitions")
    space, m = p.space, p.measure

    def machine():
        ev = _Evidence(p)
        piece_hi: dict[int, Fraction] = {}
        found: dict[tuple[int, int], RingWord] = {}
        stage = 0
        for t in count(1):
            for key in ev.pull(t):
                i, w = key
                if key in ev.hi and space.subset(part.piece(i), w):
                    if i not in piece_hi or ev.hi[key] < piece_hi[i]:
                        piece_hi[i] = ev.hi[key]
            out = []
            while _powers_of_two(t):
                k = stage
                eps = Fraction(1, 1 << (k + 1)) / (k + 2)
                pieces = []
                for i in range(k + 2):
                    got = found.get((k, i))
                    if got is None:
                        f = part.piece(i)
                        top = min(piece_hi.get(i, POS_INF), m.approx(f)[0])
                        got = _search(space, m, eps, Fraction(top),
                                      lambda r, i=i: _lower_cap_bar(ev, i, r, space, part),
                                      t, lambda j, i=i: bar_pair(i, j), region=f)
                        if got is None:
                            break
                        found[(k, i)] = got
                    pieces.append(got)
                else:
                    out.append(space.union_all(pieces))
                    stage += 1
                    continue
                break
            yield out

    return CauchyName(NameStream(machine, f"xibarC({p.stream.label})"), m, "dbar", spec)


def _lower_cap_bar(ev: _Evidence, i: int, r: RingWord, space: RingSpace, part: PartitionSpec) -> Fraction | None:
    if not space.intersect(part.piece(i), r).form:
        return Fraction(0)
    got = ev.lo.get((i, r))
    return None if got is None else max(got, Fraction(0))


def xibarC_to_zetabar(c: CauchyName) -> ZetaName:
    """Two-sided bar name from a dbar-Cauchy name.

    With S = v_j and dbar(A, S) <= 2^-j, term i of the series gives
    e(mu(F_i n (A sym S))) <= 2^(i-j), so mu(F_i n R n A) is within
    e^-1(2^(i-j)) of mu(F_i n R n S) whenever i < j.
    """
    if c.metric != "dbar" or c.spec is None:
        raise PreconditionError("needs a dbar Cauchy name")
    m, space, part = c.measure, c.measure.space, c.spec.partition

    def build():
        cur = c.stream.cursor()
        words: list[RingWord] = []

        def absorb(t: int):
            new = cur.take(t)
            words.extend(new)
            return ALL if new else ()

        def bound(key):
            i, r = key
            fr = space.intersect(part.piece(i), r)
            top = m.approx(fr)[0]
            j = len(words) - 1
            if j <= i:
                return Fraction(0), top
            eps = e_inverse(Fraction(1, 1 << (j - i)))
            v = m.approx(space.intersect(fr, words[j]))[0]
            return max(Fraction(0), v - eps), min(top, v + eps)

        return _lister("bboth", space, bound, absorb)

    return ZetaName("bboth", NameStream(build, "zetabar(xibarC)"), m, part)


# -- limits of Cauchy sequences -----------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    relation: str  # which inequality family
    claim: str
    m: int
    k: int
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs

    @property
    def margin(self) -> Fraction:
        return self.rhs - self.lhs


@dataclass
class LimitReport:
    n: int
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.holds]

    def min_margin(self, relation: str | None = None) -> Fraction | None:
        ms = [c.margin for c in self.checks if relation is None or c.relation == relation]
        return min(ms) if ms else None


def limit_bounds_suite(words: list[RingWord], m: ComputableMeasure) -> LimitReport:
    """Finite-stage checks of the bounds on B_mk (unions) and D_mk (intersections).

    The infinite objects are replaced by the last available stage: B_m by
    B_m,n, B by A_n (= B_n,n), and likewise for D.  Inclusions are recorded
    as checks with lhs 0 (holds) or 1 (fails) against rhs 0.
    """
    sp = m.space
    n = len(words) - 1
    if n < 0:
        raise DomainError("empty sequence")
    modulus = check_modulus(words, m)
    if not modulus.ok:
        i, j, d = modulus.violations[0]
        raise PreconditionError(f"d(A_{i}, A_{j}) = {d} exceeds 2^-{i}")

    def d(a, b):
        return frechet_exact(m, a, b)

    def incl(a, b):
        return Fraction(0 if sp.subset(a, b) else 1)

    def two(k):
        return Fraction(1, 1 << k)

    union = {}
    inter = {}
    for mm in range(n + 1):
        union[mm, mm] = inter[mm, mm] = words[mm]
        for k in range(mm + 1, n + 1):
            union[mm, k] = sp.union(union[mm, k - 1], words[k])
            inter[mm, k] = sp.intersect(inter[mm, k - 1], words[k])
    rep = LimitReport(n)
    add = rep.checks.append
    b_lim, d_lim = union[n, n], inter[n, n]
    for mm in range(n + 1):
        for k in range(mm, n):
            add(Check("unions in k", "B_mk in B_m,k+1", mm, k, incl(union[mm, k], union[mm, k + 1]), Fraction(0)))
            add(Check("unions in k", "d(B_mk, B_m,k+1) <= 2^-k", mm, k, d(union[mm, k], union[mm, k + 1]), two(k)))
            add(Check("intersections in k", "D_m,k+1 in D_mk", mm, k, incl(inter[mm, k + 1], inter[mm, k]), Fraction(0)))
            add(Check("intersections in k", "d(D_mk, D_m,k+1) <= 2^-k", mm, k, d(inter[mm, k], inter[mm, k + 1]), two(k)))
        for k in range(mm, n + 1):
            add(Check("unions in k", "d(B_mk, B_m) <= 2*2^-k", mm, k, d(union[mm, k], union[mm, n]), 2 * two(k)))
            add(Check("intersections in k", "d(D_mk, D_m) <= 2*2^-k", mm, k, d(inter[mm, k], inter[mm, n]), 2 * two(k)))
        if mm < n:
            add(Check("unions in m", "B_m+1 in B_m", mm, n, incl(union[mm + 1, n], union[mm, n]), Fraction(0)))
            add(Check("unions in m", "d(B_m, B_m+1) <= 2^-m", mm, n, d(union[mm, n], union[mm + 1, n]), two(mm)))
            add(Check("intersections in m", "D_m in D_m+1", mm, n, incl(inter[mm, n], inter[mm + 1, n]), Fraction(0)))
            add(Check("intersections in m", "d(D_m, D_m+1) <= 2^-m", mm, n, d(inter[mm, n], inter[mm + 1, n]), two(mm)))
        add(Check("unions in m", "d(B_m, B) <= 2*2^-m", mm, n, d(union[mm, n], b_lim), 2 * two(mm)))
        add(Check("intersections in m", "d(D_m, D) <= 2*2^-m", mm, n, d(inter[mm, n], d_lim), 2 * two(mm)))
        add(Check("words to union limit", "d(A_m, B) <= 4*2^-m", mm, n, d(words[mm], b_lim), 4 * two(mm)))
        add(Check("words to intersection limit", "d(A_m, D) <= 4*2^-m", mm, n, d(words[mm], d_lim), 4 * two(mm)))
    return rep


def random_cauchy_sequence(m: ComputableMeasure, length: int, rng: random.Random) -> list[RingWord]:
    """A_0 random; A_i+1 = A_i sym E_i with mu(E_i) <= 2^-i-1, so d(A_i, A_j) <= 2^-i."""
    sp = m.space
    if sp.name == "natfin":
        a = sp.make(n for n in range(8) if rng.random() < 0.5)
        out = [a]
        for i in range(length - 1):
            budget = Fraction(1, 1 << (i + 1))
            flips = [n for n in range(40) if rng.random() < 0.3]
            e, total = [], Fraction(0)
            for n in flips:
                w = m.approx(sp.make([n]))[0]
                if total + w <= budget:
                    e.append(n)
                    total += w
            a = sp.sym_diff(a, sp.make(e))
            out.append(a)
        return out
    denom = 64
    parts = []
    for _ in range(rng.randint(0, 3)):
        x = Fraction(rng.randrange(0, 3 * denom), denom)
        parts.append((x, x + Fraction(rng.randrange(1, denom), denom)))
    a = sp.make(parts)
    out = [a]
    for i in range(length - 1):
        scale = 1 << (i + 2)
        x = Fraction(rng.randrange(0, 3 * scale * 4), scale * 4)
        e = sp.make([(x, x + Fraction(rng.randrange(1, 3), scale * 4))])
        a = sp.sym_diff(a, e)
        out.append(a)
    return out
