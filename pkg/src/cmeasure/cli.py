"""Command line front end.

Output is tab-delimited text on stdout.  ``--report DIR`` additionally writes
the full table and a figure into DIR.  Exit codes: 0 ok, 1 a self test or
check failed, 2 parse or configuration error, 3 precondition error,
4 budget exhausted.
"""

from __future__ import annotations

import argparse
import configparser
import os
import random
import sys
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable

from . import msets, oracles
from .algebra import PartitionSpec, RingWord, build_majorising_partition
from .degrees import (
    EnName,
    ce_oracle_for_decidable,
    ce_tokens_box,
    ce_via_idpm,
    en_of_decidable,
    first_elements,
    idpm_oracle,
    idpm_via_ce,
)
from .kernel import (
    BudgetExhausted,
    ConfigError,
    DomainError,
    InconsistentNames,
    PreconditionError,
    wrap,
)
from .measure import ComputableMeasure, measure_by_name, mu_ring, total_measure_lower
from .metric import (
    WeightedMetricSpec,
    check_modulus,
    frechet_exact,
    limit_bounds_suite,
    make_xi,
    random_cauchy_sequence,
    xi_to_xiplus,
    xiplus_to_xiC,
)
from .oracles import ExactSet
from .reals import NEG_INF, POS_INF, best_lower, real_approx_budgeted, real_bounds
from .report import (
    LIMIT_HEADER,
    convergence_figure,
    fmt,
    limit_margins_figure,
    limit_rows,
    tsv,
    write_table,
)

SPACES = ("nat3", "nat3p", "natK", "lebesgue")
FORMATS = ("decoded", "raw", "both")


# -- configuration ----------------------------------------------------------------------------


@dataclass
class SessionConfig:
    space: str = "nat3"
    base: int = 3
    partition: str = "natural"  # natural | majorising
    budget: int = 2000
    precision: int = 10
    fmt: str = "decoded"
    _measure: ComputableMeasure | None = field(default=None, repr=False)

    def validate(self) -> "SessionConfig":
        if self.space not in SPACES:
            raise ConfigError(f"unknown space {self.space!r} (choose from {', '.join(SPACES)})")
        if self.base < 2:
            raise ConfigError("base must be at least 2")
        if self.partition not in ("natural", "majorising"):
            raise ConfigError(f"unknown partition mode {self.partition!r}")
        if self.budget < 1:
            raise ConfigError("budget must be positive")
        if self.precision < 0:
            raise ConfigError("precision must be non-negative")
        if self.fmt not in FORMATS:
            raise ConfigError(f"unknown output format {self.fmt!r}")
        return self

    @property
    def measure(self) -> ComputableMeasure:
        if self._measure is None:
            self._measure = measure_by_name(self.space, self.base)
        return self._measure

    def partition_spec(self) -> PartitionSpec:
        sp = self.measure.space
        return sp.natural_partition() if self.partition == "natural" else build_majorising_partition(sp)


_CONFIG_KEYS: dict[str, tuple[str, Callable[[str], Any]]] = {
    "space.name": ("space", str),
    "space.base": ("base", int),
    "space.partition": ("partition", str),
    "run.budget": ("budget", int),
    "run.precision": ("precision", int),
    "output.format": ("fmt", str),
}


def load_config(path: str | Path, cfg: SessionConfig | None = None) -> SessionConfig:
    """INI-style file: ``[space] name, base, partition``, ``[run] budget, precision``, ``[output] format``."""
    cfg = cfg or SessionConfig()
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for section in parser.sections():
        for key, value in parser.items(section):
            slot = _CONFIG_KEYS.get(f"{section}.{key}")
            if slot is None:
                raise ConfigError(f"{path}: unknown setting [{section}] {key}")
            attr, conv = slot
            try:
                setattr(cfg, attr, conv(value.strip()))
            except ValueError as exc:
                raise ConfigError(f"{path}: [{section}] {key} = {value!r}: {exc}") from exc
    return cfg.validate()


# -- set expressions --------------------------------------------------------------------------

_FUNCS = ("complement", "union", "intersect", "mod")


class _SetParser:
    """expr := literal | NAME | FUNC '(' expr {',' expr} ')'

    Literals are ring words in the space's own syntax: ``{0,2,5}`` or
    ``[0,1/3)+[1/2,2)``.  Names: empty, N (or all), evens, odds, accumulating,
    stripes.  ``mod(p, r, ...)`` is the residues r modulo p.
    """

    def __init__(self, text: str, m: ComputableMeasure):
        self.text = text
        self.pos = 0
        self.m = m
        self.space = m.space

    def error(self, msg: str) -> ConfigError:
        return ConfigError(f"set expression, position {self.pos}: {msg}\n  {self.text}\n  {' ' * self.pos}^")

    def skip(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> RingWord | ExactSet:
        got = self.expr()
        if self.peek():
            raise self.error("unexpected trailing text")
        return got

    def literal(self) -> RingWord:
        start = self.pos
        t = self.text
        if t[self.pos] == "{":
            end = t.find("}", self.pos)
            if end < 0:
                raise self.error("unclosed '{'")
            self.pos = end + 1
        else:
            while True:
                end = t.find(")", self.pos)
                if end < 0:
                    raise self.error("unclosed '['")
                self.pos = end + 1
                save = self.pos
                if self.peek() == "+":
                    self.pos += 1
                    if self.peek() == "[":
                        continue
                self.pos = save
                break
        try:
            return self.space.parse(t[start:self.pos])
        except (DomainError, ValueError) as exc:
            self.pos = start
            raise self.error(str(exc)) from exc

    def name(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isalnum() or self.text[self.pos] == "_"):
            self.pos += 1
        if start == self.pos:
            raise self.error("expected a set")
        return self.text[start:self.pos]

    def expr(self) -> RingWord | ExactSet:
        ch = self.peek()
        if ch in ("{", "["):
            return self.literal()
        start = self.pos
        word = self.name()
        if word in _FUNCS:
            self.expect("(")
            if word == "mod":
                nums = [self.number()]
                while self.peek() == ",":
                    self.pos += 1
                    nums.append(self.number())
                self.expect(")")
                return self.residues(nums, start)
            args = [self.expr()]
            while self.peek() == ",":
                self.pos += 1
                args.append(self.expr())
            self.expect(")")
            return self.apply(word, args, start)
        got = named_set(word, self.m)
        if got is None:
            self.pos = start
            raise self.error(f"unknown set {word!r}")
        return got

    def number(self) -> int:
        self.skip()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if start == self.pos:
            raise self.error("expected a natural number")
        return int(self.text[start:self.pos])

    def residues(self, nums: list[int], start: int) -> ExactSet:
        if self.space.name != "natfin":
            self.pos = start
            raise self.error("mod(...) needs a space over N")
        p, *rs = nums
        if p < 1 or not rs:
            self.pos = start
            raise self.error("mod(p, r, ...) needs p >= 1 and at least one residue")
        return oracles.nat_residues(self.m, p, {r % p for r in rs}, f"mod({', '.join(map(str, nums))})")

    def apply(self, func: str, args: list, start: int) -> ExactSet:
        sets = [as_exact_set(a, self.m) for a in args]
        try:
            if func == "complement":
                if len(sets) != 1:
                    raise PreconditionError("complement takes one argument")
                return oracles.complement(sets[0])
            if func == "union":
                return oracles.union_all(sets)
            acc = sets[0]
            for s in sets[1:]:
                acc = oracles.intersect(acc, s)
            return acc
        except (PreconditionError, NotImplementedError, TypeError) as exc:
            self.pos = start
            raise self.error(f"{func}: {exc}") from exc


def named_set(word: str, m: ComputableMeasure) -> ExactSet | None:
    nat = m.space.name == "natfin"
    if word == "empty":
        return oracles.nothing(m) if nat else oracles.interval_set(m, m.space.empty, "empty")
    if word in ("N", "all"):
        return oracles.everything(m) if nat else oracles.complement(oracles.interval_set(m, m.space.empty, "empty"))
    if nat and word == "evens":
        return oracles.evens(m)
    if nat and word == "odds":
        return oracles.odds(m)
    if not nat and word == "accumulating":
        return oracles.Accumulating(m)
    if not nat and word == "stripes":
        return oracles.standard_sets(m)["stripes"]
    return None


def parse_set_expr(text: str, m: ComputableMeasure) -> RingWord | ExactSet:
    """A ring word for a bare literal, otherwise a set with an exact oracle."""
    if not text.strip():
        raise ConfigError("empty set expression")
    return _SetParser(text, m).parse()


def as_exact_set(x: RingWord | ExactSet, m: ComputableMeasure) -> ExactSet:
    if isinstance(x, ExactSet):
        return x
    if m.space.name == "natfin":
        return oracles.nat_finite(m, list(x.form), m.space.show(x))
    return oracles.interval_set(m, x)


def parse_ring(text: str, m: ComputableMeasure) -> RingWord:
    got = parse_set_expr(text, m)
    if not isinstance(got, RingWord):
        raise ConfigError(f"{text!r} is not a ring element")
    return got


# -- pipelines --------------------------------------------------------------------------------


@dataclass
class Value:
    kind: str  # "set", "en", "lower", "real" or a name kind
    obj: Any


@dataclass
class Stage:
    out: Callable[[str], str | None]  # input kind -> output kind, None if not accepted
    run: Callable[[Value, SessionConfig, str | None], Any]


def _only(table: dict[str, str]) -> Callable[[str], str | None]:
    return table.get


def _plain(kind: str) -> bool:
    return kind in msets.KINDS and not msets.KINDS[kind].bar and not msets.KINDS[kind].diff


def _make_stage(kind: str) -> Stage:
    def run(v: Value, cfg: SessionConfig, arg):
        part = cfg.partition_spec() if msets.KINDS[kind].bar else None
        return msets.make_zeta(v.obj.oracle(), kind, part)

    return Stage(_only({"set": kind}), run)


def _split_out(side: str) -> Callable[[str], str | None]:
    def out(kind: str):
        if kind in msets.KINDS and msets.KINDS[kind].side == "both":
            return msets._with_side(kind, side)
        return None

    return out


def _complement_out(kind: str):
    if _plain(kind):
        return msets._flip_kind(kind, True)
    return None


def _primed_out(kind: str):
    return msets._flip_kind(kind, False) if _plain(kind) else None


def _unprimed_out(kind: str):
    info = msets.KINDS.get(kind)
    return msets._flip_kind(kind, False) if info and info.diff else None


def _bar_out(kind: str):
    if not _plain(kind):
        return None
    return {"plus": "bplus", "minus": "bminus", "both": "bboth"}[kind]


def _unbar_out(kind: str):
    return {"bplus": "plus", "bminus": "minus", "bboth": "both"}.get(kind)


def _restrict(v: Value, cfg: SessionConfig, arg):
    if arg is None:
        raise ConfigError("restrict needs a ring element: restrict=<ring>")
    return msets.restrict(v.obj, parse_ring(arg, cfg.measure))


def _enumerate(v: Value, cfg: SessionConfig, arg):
    s = v.obj
    if not isinstance(s, oracles.NatSet):
        raise PreconditionError("only sets of naturals with a decider can be enumerated")
    return en_of_decidable(s.decider(), s.label)


def _from_enumeration(v: Value, cfg: SessionConfig, arg):
    e = _enumerate(v, cfg, arg) if v.kind == "set" else v.obj
    return msets.from_enumeration(e, cfg.measure)


STAGES: dict[str, Stage] = {
    **{f"make_zeta_{k}": _make_stage(k) for k in msets.KINDS},
    "split_lower": Stage(_split_out("lower"), lambda v, c, a: msets.zeta_split(v.obj)[0]),
    "split_upper": Stage(_split_out("upper"), lambda v, c, a: msets.zeta_split(v.obj)[1]),
    "complement": Stage(_complement_out, lambda v, c, a: msets.complement(v.obj)),
    "complement_plus_to_minus": Stage(_only({"plus": "minus"}), lambda v, c, a: msets.complement_plus_to_minus(v.obj)),
    "complement_minus_to_plus": Stage(_only({"minus": "plus"}), lambda v, c, a: msets.complement_minus_to_plus(v.obj)),
    "to_primed": Stage(_primed_out, lambda v, c, a: msets.to_primed(v.obj)),
    "from_primed": Stage(_unprimed_out, lambda v, c, a: msets.from_primed(v.obj)),
    "primed_as_complement": Stage(_only({"pplus": "minus", "pminus": "plus", "pboth": "both"}),
                                  lambda v, c, a: msets.primed_as_complement(v.obj)),
    "restrict": Stage(lambda k: k if k in msets.KINDS and not msets.KINDS[k].bar else None, _restrict),
    "zeta_to_zetabar": Stage(_bar_out, lambda v, c, a: msets.zeta_to_zetabar(v.obj, c.partition_spec())),
    "zetabar_to_zeta": Stage(_unbar_out, lambda v, c, a: msets.zetabar_to_zeta(v.obj)),
    "total_measure": Stage(_only({"plus": "lower"}), lambda v, c, a: msets.total_measure(v.obj)),
    "total_complement": Stage(_only({"minus": "lower"}), lambda v, c, a: msets.total_complement(v.obj)),
    "total_rho": Stage(_only({"both": "real"}), lambda v, c, a: msets.total_rho(v.obj)),
    "enumerate": Stage(_only({"set": "en"}), _enumerate),
    "from_enumeration": Stage(_only({"set": "plus", "en": "plus"}), _from_enumeration),
    "to_complement_enumeration": Stage(_only({"minus": "en"}),
                                       lambda v, c, a: msets.to_complement_enumeration(v.obj, c.measure)),
}


def _split_stage(text: str) -> tuple[str, str | None]:
    name, _, arg = text.partition("=")
    return name.strip(), (arg.strip() or None) if _ else None


def plan_pipeline(stages: list[str], start: str) -> list[str]:
    """Kinds after each stage; a mismatch is reported before anything runs."""
    kinds = [start]
    for text in stages:
        name, _ = _split_stage(text)
        stage = STAGES.get(name)
        if stage is None:
            raise ConfigError(f"unknown stage {name!r}")
        nxt = stage.out(kinds[-1])
        if nxt is None:
            raise PreconditionError(f"stage {name} does not accept a {kinds[-1]} input")
        kinds.append(nxt)
    return kinds


@dataclass
class PipelineResult:
    kinds: list[str]
    lines: list[str]
    stats: dict[str, Any]


def serialize(v: Value, cfg: SessionConfig, budget: int) -> list[str]:
    sp = cfg.measure.space
    if v.kind == "set":
        s: ExactSet = v.obj
        return [f"SET\t{s.label}\t{fmt(s.total()) if s.total() is not None else '?'}"]
    if v.kind == "en":
        e: EnName = v.obj
        return [f"IN\t{n}" for n in e.elements(budget)]
    if v.kind == "lower":
        return [f"BELOW\t{fmt(q)}" for q in v.obj.stream.prefix(budget)]
    if v.kind == "real":
        lo, hi = real_bounds(v.obj, budget)
        return [f"LOWER\t{fmt(lo)}", f"UPPER\t{fmt(hi)}"]
    out = []
    for tok in v.obj.stream.prefix(budget):
        raw = wrap(msets.encode_token(v.kind, tok))
        dec = msets.show_token(v.kind, tok, sp)
        out.append(raw if cfg.fmt == "raw" else dec if cfg.fmt == "decoded" else f"{raw}\t{dec}")
    return out


def run_pipeline(cfg: SessionConfig, stages: list[str], source: Value, budget: int) -> PipelineResult:
    kinds = plan_pipeline(stages, source.kind)
    t0 = time.perf_counter()
    v = source
    for text, kind in zip(stages, kinds[1:]):
        name, arg = _split_stage(text)
        v = Value(kind, STAGES[name].run(v, cfg, arg))
    lines = serialize(v, cfg, budget)
    stats = {"stages": len(stages), "output_kind": v.kind, "items": len(lines), "steps": budget,
             "seconds": round(time.perf_counter() - t0, 3)}
    return PipelineResult(kinds, lines, stats)


# -- translation search ---------------------------------------------------------------------------

_EDGES = ("split_lower", "split_upper", "complement", "to_primed", "from_primed", "primed_as_complement",
          "zeta_to_zetabar", "zetabar_to_zeta")


def translation_path(src: str, dst: str, complement_ok: bool = False) -> list[str]:
    """Shortest stage list from one name kind to another of the same class (complements excluded)."""
    edges = [e for e in _EDGES if complement_ok or e not in ("complement", "primed_as_complement")]
    prev: dict[str, tuple[str, str] | None] = {src: None}
    todo = deque([src])
    while todo:
        k = todo.popleft()
        if k == dst:
            path = []
            while prev[k] is not None:
                k0, e = prev[k]  # type: ignore[misc]
                path.append(e)
                k = k0
            return path[::-1]
        for e in edges:
            nxt = STAGES[e].out(k)
            if nxt is not None and nxt not in prev:
                prev[nxt] = (k, e)
                todo.append(nxt)
    raise PreconditionError(f"no computable translation from {src} to {dst}")


# -- commands -----------------------------------------------------------------------------------


def _emit(lines: list[str]) -> None:
    for line in lines:
        print(line)


def _set_arg(args, cfg: SessionConfig) -> ExactSet:
    return as_exact_set(parse_set_expr(args.set, cfg.measure), cfg.measure)


def cmd_space(args, cfg: SessionConfig) -> int:
    m = cfg.measure
    sp = m.space
    if args.action == "parse":
        r = parse_ring(args.set, m)
        _emit([tsv(("canonical", "word", "index", "key_position"),
                   [(sp.show(r), wrap(r.word), sp.index(r), sp.key_position(r))]).rstrip("\n")])
        return 0
    if args.action == "op":
        a, b = parse_ring(args.a, m), parse_ring(args.b, m)
        f = {"union": sp.union, "diff": sp.diff, "intersect": sp.intersect, "symdiff": sp.sym_diff}[args.op]
        print(sp.show(f(a, b)))
        return 0
    rows = [(j, sp.show(sp.key(j))) for j in range(args.count)]
    _emit(tsv(("position", "ring_element"), rows).splitlines())
    return 0


def cmd_measure(args, cfg: SessionConfig) -> int:
    m = cfg.measure
    k = args.precision if args.precision is not None else cfg.precision
    if args.action == "ring":
        r = parse_ring(args.set, m)
        lo, hi = m.approx(r, k)
        _emit(tsv(("ring_element", "lower", "upper", "precision"), [(m.space.show(r), lo, hi, k)]).splitlines())
        return 0
    if args.action == "approx":
        r = parse_ring(args.set, m)
        q, used = real_approx_budgeted(mu_ring(m, r), k, budget=cfg.budget)
        _emit(tsv(("value", "precision", "budget_used"), [(q, k, used)]).splitlines())
        return 0
    # total
    low = total_measure_lower(m)
    exact = m.total_exact
    target = None if exact in (None, POS_INF) else Fraction(exact) - Fraction(1, 1 << k)
    b, best = 1, NEG_INF
    while True:
        best = best_lower(low, b)
        if target is not None and best != NEG_INF and best >= target:
            break
        if b >= cfg.budget:
            break
        b = min(2 * b, cfg.budget)
    reached = target is not None and best != NEG_INF and best >= target
    _emit(tsv(("space", "best_lower", "target", "reached", "budget_used"),
              [(m.label, best, target if target is not None else "none", reached, b)]).splitlines())
    if target is not None and not reached:
        raise BudgetExhausted(f"lower bounds of the total stayed below {fmt(target)} within budget {cfg.budget}")
    return 0


def cmd_name(args, cfg: SessionConfig) -> int:
    a = _set_arg(args, cfg)
    kind = msets.kind_named(args.kind)
    part = cfg.partition_spec() if msets.KINDS[kind].bar else None
    p = msets.make_zeta(a.oracle(), kind, part)
    budget = args.budget or cfg.budget
    if args.action == "dump":
        saved = cfg.fmt
        cfg.fmt = args.format or "both"
        _emit(serialize(Value(kind, p), cfg, budget))
        cfg.fmt = saved
    return 0


def cmd_mset(args, cfg: SessionConfig) -> int:
    budget = args.budget or cfg.budget
    a = _set_arg(args, cfg)
    if args.action == "translate":
        src, dst = msets.kind_named(args.source), msets.kind_named(args.target)
        path = translation_path(src, dst)
        res = run_pipeline(cfg, [f"make_zeta_{src}", *path], Value("set", a), budget)
        print(f"# stages\t{' > '.join(path) or '(none)'}")
        _emit(res.lines)
        return 0
    if args.action == "pipeline":
        stages = [s for s in (args.stages or "").split(",") if s.strip()]
        source = Value("set", a)
        if args.kind:
            kind = msets.kind_named(args.kind)
            stages = [f"make_zeta_{kind}", *stages]
        res = run_pipeline(cfg, stages, source, budget)
        print(f"# kinds\t{' > '.join(res.kinds)}")
        _emit(res.lines)
        print("# stats\t" + "\t".join(f"{k}={v}" for k, v in res.stats.items()))
        return 0
    # bound
    kind = msets.kind_named(args.kind)
    part = cfg.partition_spec() if msets.KINDS[kind].bar else None
    p = msets.make_zeta(a.oracle(), kind, part)
    r = parse_ring(args.ring_elem, cfg.measure)
    key = (args.piece, r) if msets.KINDS[kind].bar else r
    k = args.precision if args.precision is not None else cfg.precision
    if msets.KINDS[kind].side == "both":
        q, used = real_approx_budgeted(msets.measure_cap_real(p, key), k, budget=budget)
        _emit(tsv(("value", "precision", "budget_used"), [(q, k, used)]).splitlines())
    else:
        lo, hi = msets.best_bounds(p, key, budget)
        _emit(tsv(("lower", "upper", "budget"), [(lo, hi, budget)]).splitlines())
    return 0


def _words(text: str, m: ComputableMeasure) -> list[RingWord]:
    return [parse_ring(w, m) for w in text.split(";") if w.strip()]


def cmd_metric(args, cfg: SessionConfig) -> int:
    m = cfg.measure
    out_dir = Path(args.report) if getattr(args, "report", None) else None
    if args.action == "dist":
        a, b = parse_ring(args.a, m), parse_ring(args.b, m)
        k = args.precision if args.precision is not None else cfg.precision
        if args.kind == "frechet":
            d = frechet_exact(m, a, b)
            lo, hi = d, d
        else:
            lo, hi = WeightedMetricSpec(cfg.partition_spec(), m).distance(a, b, k)
        _emit(tsv(("metric", "lower", "upper", "precision"), [(args.kind, lo, hi, k)]).splitlines())
        return 0
    if args.action == "cauchy-check":
        ws = _words(args.words, m)
        spec = WeightedMetricSpec(cfg.partition_spec(), m) if args.kind == "dbar" else None
        rep = check_modulus(ws, m, args.kind, spec)
        rows = [(i, j, d, Fraction(1, 1 << i)) for i, j, d in rep.violations]
        print(f"# pairs\t{rep.pairs}\tok\t{rep.ok}")
        _emit(tsv(("i", "j", "distance", "bound"), rows).splitlines())
        return 0 if rep.ok else 1
    if args.action == "limits":
        if args.words:
            seqs = [_words(args.words, m)]
        else:
            rng = random.Random(args.seed)
            seqs = [random_cauchy_sequence(m, args.length, rng) for _ in range(args.random)]
        reports = [limit_bounds_suite(ws, m) for ws in seqs]
        fams: dict[str, list] = {}
        for rep in reports:
            for c in rep.checks:
                fams.setdefault(c.relation, []).append(c)
        rows = [(rel, len(cs), sum(not c.holds for c in cs), min(c.margin for c in cs)) for rel, cs in sorted(fams.items())]
        _emit(tsv(("relation", "checks", "failures", "min_margin"), rows).splitlines())
        if out_dir is not None:
            all_rows = [row for rep in reports for row in limit_rows(rep)]
            t = write_table(out_dir, "limit_bounds", LIMIT_HEADER, all_rows)
            f = limit_margins_figure(reports, out_dir / "limit_bounds.png", f"limit bounds on {m.label}")
            print(f"# wrote\t{t}\t{f}")
        return 0 if all(r.ok for r in reports) else 1
    # converge
    a = _set_arg(args, cfg)
    c = xiplus_to_xiC(xi_to_xiplus(make_xi(a)))
    ws = c.words(args.count, cfg.budget)
    dist = [a.total() + m.approx(w)[0] - 2 * a.cap(w) for w in ws]
    rows = [(i, m.space.show(w), d, Fraction(1, 1 << i)) for i, (w, d) in enumerate(zip(ws, dist))]
    _emit(tsv(("i", "word", "distance", "bound"), rows).splitlines())
    if out_dir is not None:
        t = write_table(out_dir, "convergence", ("i", "word", "distance", "bound"), rows)
        f = convergence_figure(dist, out_dir / "convergence.png", f"{a.label} on {m.label}")
        print(f"# wrote\t{t}\t{f}")
    return 0 if all(d <= Fraction(1, 1 << i) for i, d in enumerate(dist)) else 1


def cmd_degrees(args, cfg: SessionConfig) -> int:
    m = cfg.measure
    if m.space.name != "natfin":
        raise PreconditionError("the degrees demos run on spaces over N")
    a = _set_arg(args, cfg)
    if not isinstance(a, oracles.NatSet):
        raise PreconditionError("the degrees demos need a decidable set of naturals")
    budget = args.budget or cfg.budget
    d = a.decider()
    if args.pipeline == "idpm-via-ce":
        q = idpm_via_ce(ce_tokens_box(a), msets.make_zeta(a.oracle(), "plus"))
        rows = []
        for n in range(args.prefix):
            r = m.space.make(range(n + 1))
            lo, hi = msets.best_bounds(q, r, budget)
            rows.append((m.space.show(r), hi, a.cap(r)))
        _emit(tsv(("ring_element", "upper", "exact"), rows).splitlines())
        return 0
    if args.pipeline == "ce":
        e = ce_oracle_for_decidable(d)(en_of_decidable(d, a.label))
    else:
        e = ce_via_idpm(idpm_oracle(a.oracle()), en_of_decidable(d, a.label), m)
    got = first_elements(e, args.prefix, budget)
    _emit(tsv(("order", "element"), list(enumerate(got))).splitlines())
    return 0


def cmd_selftest(args, cfg: SessionConfig) -> int:
    from .selftest import run_selftest

    ok = True
    for name, passed, detail in run_selftest(quick=not args.full):
        print(f"{'PASS' if passed else 'FAIL'}\t{name}\t{detail}")
        ok &= passed
    return 0 if ok else 1


# -- argument parsing ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    # SUPPRESS keeps a subcommand from resetting flags given before it
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--space", choices=SPACES, help="nat3, nat3p (weights scaled to total 1), natK, lebesgue")
    common.add_argument("--base", type=int, help="weight base for natK")
    common.add_argument("--config", help="INI file with [space], [run], [output] sections")
    common.add_argument("--partition", choices=("natural", "majorising"))
    common.add_argument("--default-budget", type=int, dest="default_budget")

    p = argparse.ArgumentParser(prog="cmeasure", description="Computable measure theory on token streams.",
                                parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("space", parents=[common], help="ring elements")
    ssub = s.add_subparsers(dest="action", required=True)
    x = ssub.add_parser("parse", parents=[common])
    x.add_argument("--set", required=True)
    x = ssub.add_parser("op", parents=[common])
    x.add_argument("op", choices=("union", "diff", "intersect", "symdiff"))
    x.add_argument("a")
    x.add_argument("b")
    x = ssub.add_parser("keys", parents=[common], help="the order in which names visit ring elements")
    x.add_argument("--count", type=int, default=16)

    s = sub.add_parser("measure", parents=[common], help="measures of ring elements and of the space")
    ssub = s.add_subparsers(dest="action", required=True)
    for act in ("ring", "approx"):
        x = ssub.add_parser(act, parents=[common])
        x.add_argument("--set", required=True)
        x.add_argument("--precision", type=int)
    x = ssub.add_parser("total", parents=[common])
    x.add_argument("--precision", type=int)

    s = sub.add_parser("name", parents=[common], help="token streams")
    ssub = s.add_subparsers(dest="action", required=True)
    x = ssub.add_parser("dump", parents=[common])
    x.add_argument("--set", required=True)
    x.add_argument("--kind", default="plus")
    x.add_argument("--budget", type=int)
    x.add_argument("--format", choices=FORMATS)

    s = sub.add_parser("mset", parents=[common], help="names of measurable sets and translations")
    ssub = s.add_subparsers(dest="action", required=True)
    x = ssub.add_parser("translate", parents=[common])
    x.add_argument("--set", required=True)
    x.add_argument("--from", dest="source", required=True)
    x.add_argument("--to", dest="target", required=True)
    x.add_argument("--budget", type=int)
    x = ssub.add_parser("pipeline", parents=[common])
    x.add_argument("--set", required=True)
    x.add_argument("--kind", help="start from a name of this kind instead of the set")
    x.add_argument("--stages", default="", help="comma separated stage ids; restrict=<ring> takes an argument")
    x.add_argument("--budget", type=int)
    x = ssub.add_parser("bound", parents=[common])
    x.add_argument("--set", required=True)
    x.add_argument("--kind", default="both")
    x.add_argument("--ring-elem", dest="ring_elem", required=True)
    x.add_argument("--piece", type=int, default=0, help="partition piece for bar kinds")
    x.add_argument("--precision", type=int)
    x.add_argument("--budget", type=int)

    s = sub.add_parser("metric", parents=[common], help="distances and Cauchy names")
    ssub = s.add_subparsers(dest="action", required=True)
    x = ssub.add_parser("dist", parents=[common])
    x.add_argument("--kind", choices=("frechet", "dbar"), default="frechet")
    x.add_argument("--a", required=True)
    x.add_argument("--b", required=True)
    x.add_argument("--precision", type=int)
    x = ssub.add_parser("cauchy-check", parents=[common])
    x.add_argument("--kind", choices=("frechet", "dbar"), default="frechet")
    x.add_argument("--words", required=True, help="ring elements separated by ';'")
    x = ssub.add_parser("limits", parents=[common])
    x.add_argument("--words", help="ring elements separated by ';'")
    x.add_argument("--random", type=int, default=100, help="number of random sequences")
    x.add_argument("--length", type=int, default=8)
    x.add_argument("--seed", type=int, default=0)
    x.add_argument("--report", help="directory for the table and figure")
    x = ssub.add_parser("converge", parents=[common])
    x.add_argument("--set", required=True)
    x.add_argument("--count", type=int, default=8)
    x.add_argument("--report", help="directory for the table and figure")

    s = sub.add_parser("degrees", parents=[common], help="enumerations and complementation")
    ssub = s.add_subparsers(dest="action", required=True)
    x = ssub.add_parser("demo", parents=[common])
    x.add_argument("--pipeline", choices=("ce-via-idpm", "idpm-via-ce", "ce"), default="ce-via-idpm")
    x.add_argument("--set", required=True)
    x.add_argument("--prefix", type=int, default=20)
    x.add_argument("--budget", type=int)

    s = sub.add_parser("selftest", parents=[common], help="quick checks of the main invariants")
    s.add_argument("--full", action="store_true")
    return p


COMMANDS = {
    "space": cmd_space,
    "measure": cmd_measure,
    "name": cmd_name,
    "mset": cmd_mset,
    "metric": cmd_metric,
    "degrees": cmd_degrees,
    "selftest": cmd_selftest,
}


def session_from_args(args) -> SessionConfig:
    opts = vars(args)
    cfg = load_config(opts["config"]) if "config" in opts else SessionConfig()
    if "space" in opts:
        cfg.space = opts["space"]
    if "base" in opts:
        cfg.base = opts["base"]
        if "space" not in opts:
            cfg.space = "natK"
    if "partition" in opts:
        cfg.partition = opts["partition"]
    if "default_budget" in opts:
        cfg.budget = opts["default_budget"]
    return cfg.validate()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if hasattr(sys, "set_int_max_str_digits"):
        sys.set_int_max_str_digits(0)  # exact bounds at large budgets have huge denominators
    try:
        cfg = session_from_args(args)
        return COMMANDS[args.command](args, cfg)
    except BrokenPipeError:
        # reader went away (e.g. `| head`); silence the flush at exit
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        return 0
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PreconditionError, InconsistentNames, NotImplementedError) as exc:
        print(f"precondition: {exc}", file=sys.stderr)
        return 3
    except BudgetExhausted as exc:
        print(f"budget: {exc}", file=sys.stderr)
        return 4


__all__ = [
    "SessionConfig",
    "STAGES",
    "Value",
    "as_exact_set",
    "build_parser",
    "load_config",
    "main",
    "parse_set_expr",
    "plan_pipeline",
    "run_pipeline",
    "translation_path",
]
