"""Corpus evaluation: extract every interface and score exact tree matches."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Iterable, Sequence

from .clustering import DegenerateInputError, build_hierarchy
from .geometry import DEFAULT_TOLERANCE
from .ingestion import CorpusManifest, ManifestEntry, load_entry
from .query_model import family_diff, tree_equal

CSV_HEADER = ("collection", "interfaces", "mean_fields", "correct", "mistakes", "precision")


class EvaluationError(RuntimeError):
    pass


@dataclass(frozen=True)
class EntryOutcome:
    interface_id: str
    fields: int
    correct: bool
    missed: list[list[str]] = field(default_factory=list)
    spurious: list[list[str]] = field(default_factory=list)


@dataclass(frozen=True)
class CollectionResult:
    collection: str
    interfaces: int
    total_fields: int
    correct: int
    outcomes: tuple[EntryOutcome, ...] = ()

    @property
    def mistakes(self) -> int:
        return self.interfaces - self.correct

    @property
    def mean_fields(self) -> Fraction:
        return Fraction(self.total_fields, self.interfaces)

    @property
    def precision(self) -> Fraction:
        return Fraction(self.correct, self.interfaces)

    @classmethod
    def from_counts(
        cls, collection: str, correct: int, interfaces: int, total_fields: int = 0
    ) -> CollectionResult:
        if interfaces <= 0:
            raise DegenerateInputError(f"{collection}: no interfaces")
        if not 0 <= correct <= interfaces:
            raise ValueError(f"{collection}: correct={correct} outside [0, {interfaces}]")
        return cls(collection, interfaces, total_fields, correct)


@dataclass(frozen=True)
class EvalReport:
    collections: tuple[CollectionResult, ...]

    def __getitem__(self, name: str) -> CollectionResult:
        for c in self.collections:
            if c.collection == name:
                return c
        raise KeyError(name)


def truncate2(value: Fraction) -> Fraction:
    """Cut to two decimals, as the published tables do (14/19 shows 0.73)."""
    return Fraction(floor(value * 100), 100)


def format_precision(value: Fraction) -> str:
    return f"{float(truncate2(value)):.2f}"


def evaluate_entry(entry: ManifestEntry, tol: float, min_pts: int) -> EntryOutcome:
    layout, gold = load_entry(entry)
    trace = build_hierarchy(
        layout.fields, tol, min_pts, layout.interface_id, layout.decorations
    )
    ok = tree_equal(trace.result, gold)
    missed, spurious = ([], []) if ok else family_diff(trace.result, gold)
    return EntryOutcome(layout.interface_id, len(layout.fields), ok, missed, spurious)


def evaluate_manifest(
    manifest: CorpusManifest, tol: float = DEFAULT_TOLERANCE, min_pts: int = 1
) -> CollectionResult:
    if not manifest.entries:
        raise DegenerateInputError(f"collection {manifest.collection!r} has no entries")
    outcomes = []
    for entry in manifest.entries:
        try:
            outcomes.append(evaluate_entry(entry, tol, min_pts))
        except (OSError, ValueError) as exc:
            raise EvaluationError(f"{manifest.collection}: entry {entry.layout}: {exc}") from exc
    return CollectionResult(
        manifest.collection,
        len(outcomes),
        sum(o.fields for o in outcomes),
        sum(o.correct for o in outcomes),
        tuple(outcomes),
    )


def evaluate_corpus(
    manifests: CorpusManifest | Iterable[CorpusManifest],
    tol: float = DEFAULT_TOLERANCE,
    min_pts: int = 1,
) -> EvalReport:
    if isinstance(manifests, CorpusManifest):
        manifests = [manifests]
    manifests = list(manifests)
    if not manifests:
        raise DegenerateInputError("no manifests to evaluate")
    return EvalReport(tuple(evaluate_manifest(m, tol, min_pts) for m in manifests))


# -- rendering ---------------------------------------------------------------


def render_csv(report: EvalReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for c in report.collections:
        writer.writerow(
            [c.collection, c.interfaces, repr(float(c.mean_fields)), c.correct, c.mistakes, repr(float(c.precision))]
        )
    return buf.getvalue()


def render_table(report: EvalReport) -> str:
    names = [c.collection for c in report.collections]
    rows: list[tuple[str, list[str]]] = [
        ("#interfaces", [str(c.interfaces) for c in report.collections]),
        ("#fields", [f"{float(c.mean_fields):.2f}" for c in report.collections]),
        ("#correct query", [str(c.correct) for c in report.collections]),
        ("#mistakes", [str(c.mistakes) for c in report.collections]),
        ("Precision", [format_precision(c.precision) for c in report.collections]),
    ]
    label_w = max(len(label) for label, _ in rows)
    col_w = [max(len(n), *(len(vals[i]) for _, vals in rows)) for i, n in enumerate(names)]
    lines = [" " * label_w + "  " + "  ".join(n.rjust(w) for n, w in zip(names, col_w))]
    for label, vals in rows:
        lines.append(label.ljust(label_w) + "  " + "  ".join(v.rjust(w) for v, w in zip(vals, col_w)))
    return "\n".join(lines) + "\n"


def render_report(report: EvalReport, fmt: str = "table") -> str:
    if fmt == "csv":
        return render_csv(report)
    if fmt == "table":
        return render_table(report)
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report_csv(text: str) -> list[dict[str, object]]:
    """Read a CSV report back into plain rows (counts as int, ratios as float)."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    out: list[dict[str, object]] = []
    for row in reader:
        name, interfaces, mean_fields, correct, mistakes, precision = row
        out.append(
            {
                "collection": name,
                "interfaces": int(interfaces),
                "mean_fields": float(mean_fields),
                "correct": int(correct),
                "mistakes": int(mistakes),
                "precision": float(precision),
            }
        )
    return out


def report_from_counts(counts: Sequence[tuple[str, int, int]]) -> EvalReport:
    """Build a report from ``(collection, correct, interfaces)`` triples."""
    return EvalReport(tuple(CollectionResult.from_counts(n, c, i) for n, c, i in counts))
