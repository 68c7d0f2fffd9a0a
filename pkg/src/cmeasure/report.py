"""Tab-delimited tables and the figures that go with them.

Every report writes ``<stem>.tsv`` and, where a picture helps, ``<stem>.png``
into the same directory.  matplotlib is imported lazily with the Agg backend,
so the library itself never needs a display.
"""

from __future__ import annotations

import csv
import io
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .metric import LimitReport


def fmt(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


def tsv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) for x in row])
    return buf.getvalue()


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def write_table(out_dir: Path, stem: str, header: Sequence[str], rows: list[Sequence]) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{stem}.tsv"
    path.write_text(tsv(header, rows), encoding="utf-8")
    return path


def limit_rows(rep: LimitReport) -> list[tuple]:
    return [(c.relation, c.claim, c.m, c.k, c.lhs, c.rhs, c.margin, "ok" if c.holds else "FAIL")
            for c in rep.checks]


LIMIT_HEADER = ("relation", "claim", "m", "k", "lhs", "rhs", "margin", "status")


def limit_margins_figure(reports: list[LimitReport], path: Path, title: str = "") -> Path:
    """Share of each distance bound actually used (lhs / rhs), one column per family.

    Everything at or below the line at 1 holds.  Inclusion checks and zero
    distances are left out; the table has them.
    """
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    families: dict[str, list[float]] = {}
    for rep in reports:
        for c in rep.checks:
            if " in " in c.claim or c.lhs == 0:
                continue
            families.setdefault(c.relation, []).append(float(c.lhs / c.rhs))
    names = sorted(families)
    for x, rel in enumerate(names):
        ys = families[rel]
        xs = [x + 0.3 * ((i * 0.6180339) % 1 - 0.5) for i in range(len(ys))]  # deterministic jitter
        ax.scatter(xs, ys, s=5, alpha=0.4)
    ax.axhline(1.0, color="black", lw=0.8)
    ax.set_yscale("log")
    ax.set_ylim(top=3.0)
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names)
    ax.set_ylabel("distance / bound")
    ax.set_title(title or "limit bounds")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def convergence_figure(distances: list[Fraction], path: Path, title: str = "") -> Path:
    """d(A, v_i) against the target 2^-i."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5.5, 4))
    idx = list(range(len(distances)))
    pos = [(i, float(d)) for i, d in enumerate(distances) if d > 0]
    zero = [i for i, d in enumerate(distances) if d == 0]
    ax.semilogy(idx, [2.0**-i for i in idx], "--", color="gray", label="2^-i")
    if pos:
        ax.semilogy(*zip(*pos), "o-", label="d(A, v_i)")
    if zero:
        # log axes cannot show 0; mark exact hits along the bottom edge
        floor = min([2.0 ** -(len(distances) + 2)] + [d / 4 for _, d in pos])
        ax.semilogy(zero, [floor] * len(zero), "v", color="tab:green", label="d(A, v_i) = 0")
    ax.set_xlabel("i")
    ax.set_ylabel("distance")
    ax.set_title(title or "Cauchy name")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


__all__ = [
    "LIMIT_HEADER",
    "convergence_figure",
    "fmt",
    "limit_margins_figure",
    "limit_rows",
    "tsv",
    "write_table",
]
