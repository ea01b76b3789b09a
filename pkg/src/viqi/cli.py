"""Command-line entry point.

Exit status is 0 on success, 1 on data errors (unreadable or invalid
inputs) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .clustering import build_hierarchy, dumps_trace
from .evaluation import evaluate_corpus, render_report
from .geometry import DEFAULT_TOLERANCE
from .ingestion import (
    CorpusManifest,
    ManifestEntry,
    SyntheticSpec,
    dumps_layout,
    generate_synthetic,
    load_layout,
    load_manifest,
    manifest_to_document,
)
from .query_model import dumps_tree
from .svg import render_svg

EXIT_OK = 0
EXIT_DATA = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    align_tolerance: float = DEFAULT_TOLERANCE
    min_pts: int = 1
    trace: bool = False
    out: Path | None = None

    def __post_init__(self) -> None:
        if self.align_tolerance < 0:
            raise UsageError(f"--tolerance must be >= 0, got {self.align_tolerance}")
        if self.min_pts < 1:
            raise UsageError(f"--min-pts must be >= 1, got {self.min_pts}")


def _write(path: Path | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def trace_path_for(out: Path) -> Path:
    name = out.name[: -len(".json")] if out.name.endswith(".json") else out.name
    return out.with_name(name + ".trace.json")


def cmd_extract(layout_path: Path, config: RunConfig) -> None:
    if config.trace and config.out is None:
        raise UsageError("--trace needs --out (the trace is written beside the tree)")
    layout = load_layout(layout_path)
    trace = build_hierarchy(
        layout.fields, config.align_tolerance, config.min_pts, layout.interface_id, layout.decorations
    )
    _write(config.out, dumps_tree(trace.result))
    if config.trace:
        assert config.out is not None
        _write(trace_path_for(config.out), dumps_trace(trace, config.align_tolerance))


def cmd_evaluate(
    manifest_paths: Sequence[Path], config: RunConfig, fmt: str, csv_out: Path | None
) -> None:
    manifests = [load_manifest(p) for p in manifest_paths]
    report = evaluate_corpus(manifests, config.align_tolerance, config.min_pts)
    sys.stdout.write(render_report(report, fmt))
    if csv_out is not None:
        _write(csv_out, render_report(report, "csv"))


def cmd_generate(
    seed: int, spec: SyntheticSpec, out_dir: Path, count: int = 1, collection: str = "synthetic"
) -> list[ManifestEntry]:
    if count < 1:
        raise UsageError(f"--count must be >= 1, got {count}")
    # Generate everything first so an invalid spec writes no files.
    pairs = [generate_synthetic(seed + k, spec) for k in range(count)]
    out_dir.mkdir(parents=True, exist_ok=True)
    entries = []
    for layout, gold in pairs:
        lp = out_dir / f"{layout.interface_id}.layout.json"
        gp = out_dir / f"{layout.interface_id}.gold.json"
        lp.write_text(dumps_layout(layout), encoding="utf-8")
        gp.write_text(dumps_tree(gold), encoding="utf-8")
        entries.append(ManifestEntry(lp, gp))
    manifest = CorpusManifest(collection, tuple(entries))
    doc = manifest_to_document(manifest, relative_to=out_dir)
    (out_dir / "manifest.json").write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
    return entries


def cmd_render_svg(layout_path: Path, trace_path: Path, out: Path | None) -> None:
    layout = load_layout(layout_path)
    try:
        trace = json.loads(trace_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValueError(f"{trace_path}: cannot read ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise ValueError(f"{trace_path}: invalid JSON: {exc}") from None
    _write(out, render_svg(layout, trace))


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("-")
    try:
        return (int(lo), int(hi)) if sep else (int(lo), int(lo))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected N or N-M, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="viqi", description="Extract hierarchical queries from query-interface layouts."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def tunables(p: argparse.ArgumentParser) -> None:
        p.add_argument("--tolerance", type=float, default=DEFAULT_TOLERANCE, help="edge alignment tolerance in px")
        p.add_argument("--min-pts", type=int, default=1, help="neighbours needed to seed a cluster")

    p = sub.add_parser("extract", help="extract the query tree of one layout")
    p.add_argument("layout", type=Path)
    tunables(p)
    p.add_argument("--out", type=Path, help="tree output path (default: stdout)")
    p.add_argument("--trace", action="store_true", help="also write <out>.trace.json")

    p = sub.add_parser("evaluate", help="score extraction against gold trees")
    p.add_argument("manifests", type=Path, nargs="+")
    tunables(p)
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.add_argument("--out", type=Path, help="also write the CSV report here")

    p = sub.add_parser("generate", help="write synthetic layouts with gold trees")
    p.add_argument("out_dir", type=Path)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--collection", default="synthetic")
    p.add_argument("--groups", type=int, default=3)
    p.add_argument("--fields-per-group", type=_range, default=(2, 3))
    p.add_argument("--sections", type=int, default=1)
    p.add_argument("--decorations", type=int, default=0)
    p.add_argument("--jitter", type=float, default=0.0)

    p = sub.add_parser("render-svg", help="draw the first clustering round of a trace")
    p.add_argument("layout", type=Path)
    p.add_argument("trace", type=Path)
    p.add_argument("--out", type=Path, help="SVG output path (default: stdout)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "extract":
            cfg = RunConfig(args.tolerance, args.min_pts, args.trace, args.out)
            cmd_extract(args.layout, cfg)
        elif args.command == "evaluate":
            cfg = RunConfig(args.tolerance, args.min_pts)
            cmd_evaluate(args.manifests, cfg, args.format, args.out)
        elif args.command == "generate":
            spec = SyntheticSpec(
                groups=args.groups,
                fields_per_group=args.fields_per_group,
                jitter=args.jitter,
                sections=args.sections,
                decorations=args.decorations,
            )
            cmd_generate(args.seed, spec, args.out_dir, args.count, args.collection)
        elif args.command == "render-svg":
            cmd_render_svg(args.layout, args.trace, args.out)
    except UsageError as exc:
        print(f"viqi: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"viqi: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
