"""Layout documents, corpus manifests and synthetic interface generation."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .geometry import Rect
from .query_model import (
    CONTROL_KINDS,
    Collection,
    DecorationElement,
    Field,
    FieldElement,
    Group,
    NotRendered,
    QueryNode,
    QueryTree,
    canonicalize,
    load_tree,
)


class LayoutError(ValueError):
    """Malformed or invalid layout document."""


class ManifestError(ValueError):
    pass


class GenerationError(ValueError):
    pass


@dataclass(frozen=True)
class InterfaceLayout:
    interface_id: str
    page_width: float
    page_height: float
    elements: tuple[FieldElement | DecorationElement, ...]

    @property
    def fields(self) -> list[FieldElement]:
        return [e for e in self.elements if isinstance(e, FieldElement)]

    @property
    def decorations(self) -> list[DecorationElement]:
        return [e for e in self.elements if isinstance(e, DecorationElement)]

    def field_map(self) -> dict[str, FieldElement]:
        return {f.id: f for f in self.fields}


def _number(value: Any, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise LayoutError(f"{what} must be a number, got {value!r}")
    return float(value)


def parse_layout(doc: Any) -> InterfaceLayout:
    """Validate a layout document and build the layout value."""
    if not isinstance(doc, dict):
        raise LayoutError("layout document must be an object")
    interface_id = doc.get("interface_id")
    if not isinstance(interface_id, str) or not interface_id:
        raise LayoutError("missing non-empty string 'interface_id'")
    page = doc.get("page")
    if not isinstance(page, dict):
        raise LayoutError("missing 'page' object")
    width = _number(page.get("width"), "page.width")
    height = _number(page.get("height"), "page.height")
    if width <= 0 or height <= 0:
        raise LayoutError(f"page size must be positive, got {width}x{height}")

    raw = doc.get("elements")
    if not isinstance(raw, list):
        raise LayoutError("missing 'elements' list")

    elements: list[FieldElement | DecorationElement] = []
    seen: set[str] = set()
    for idx, el in enumerate(raw):
        if not isinstance(el, dict):
            raise LayoutError(f"elements[{idx}] must be an object")
        eid = el.get("id")
        if not isinstance(eid, str) or not eid:
            raise LayoutError(f"elements[{idx}] needs a non-empty string id")
        if eid in seen:
            raise LayoutError(f"duplicate element id {eid!r}")
        seen.add(eid)

        bbox_raw = el.get("bbox")
        if not isinstance(bbox_raw, list) or len(bbox_raw) != 4:
            raise LayoutError(f"element {eid!r}: bbox must be [x_min, y_min, x_max, y_max]")
        coords = [_number(v, f"element {eid!r} bbox") for v in bbox_raw]
        try:
            bbox = Rect(*coords)
        except ValueError as exc:
            raise LayoutError(f"element {eid!r}: {exc}") from None
        if bbox.x_min < 0 or bbox.y_min < 0 or bbox.x_max > width or bbox.y_max > height:
            raise LayoutError(f"element {eid!r}: bbox {coords} outside page {width}x{height}")

        label = el.get("label", "")
        if not isinstance(label, str):
            raise LayoutError(f"element {eid!r}: label must be a string")
        kind = el.get("kind")
        try:
            if kind == "field":
                elements.append(FieldElement(eid, label, el.get("control", "other"), bbox))
            elif kind == "decoration":
                elements.append(DecorationElement(eid, el.get("control", "other"), bbox, label))
            else:
                raise LayoutError(f"element {eid!r}: kind must be 'field' or 'decoration', got {kind!r}")
        except LayoutError:
            raise
        except ValueError as exc:
            raise LayoutError(str(exc)) from None

    layout = InterfaceLayout(interface_id, width, height, tuple(elements))
    if not layout.fields:
        raise LayoutError(f"interface {interface_id!r} has no field elements")
    return layout


def layout_to_document(layout: InterfaceLayout) -> dict[str, Any]:
    elements = []
    for e in layout.elements:
        if isinstance(e, FieldElement):
            elements.append(
                {"id": e.id, "kind": "field", "label": e.label, "control": e.control, "bbox": e.bbox.as_list()}
            )
        else:
            elements.append(
                {"id": e.id, "kind": "decoration", "label": e.label, "control": e.kind, "bbox": e.bbox.as_list()}
            )
    return {
        "interface_id": layout.interface_id,
        "page": {"width": layout.page_width, "height": layout.page_height},
        "elements": elements,
    }


def dumps_layout(layout: InterfaceLayout) -> str:
    return json.dumps(layout_to_document(layout), indent=2, ensure_ascii=False) + "\n"


def loads_layout(text: str) -> InterfaceLayout:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LayoutError(f"invalid JSON: {exc}") from None
    return parse_layout(doc)


def load_layout(path: str | Path) -> InterfaceLayout:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise LayoutError(f"{path}: cannot read ({exc.strerror})") from None
    try:
        return loads_layout(text)
    except LayoutError as exc:
        raise LayoutError(f"{path}: {exc}") from None


# -- corpus manifests --------------------------------------------------------


@dataclass(frozen=True)
class ManifestEntry:
    layout: Path
    gold: Path


@dataclass(frozen=True)
class CorpusManifest:
    collection: str
    entries: tuple[ManifestEntry, ...]


def load_manifest(path: str | Path) -> CorpusManifest:
    """Read a manifest; entry paths are resolved relative to its directory."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ManifestError(f"{path}: cannot read ({exc.strerror})") from None
    except json.JSONDecodeError as exc:
        raise ManifestError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("collection"), str):
        raise ManifestError(f"{path}: manifest needs a string 'collection'")
    raw = doc.get("entries")
    if not isinstance(raw, list):
        raise ManifestError(f"{path}: manifest needs an 'entries' list")
    base = path.parent
    entries = []
    for i, e in enumerate(raw):
        if not isinstance(e, dict) or not isinstance(e.get("layout"), str) or not isinstance(e.get("gold"), str):
            raise ManifestError(f"{path}: entries[{i}] needs string 'layout' and 'gold'")
        entries.append(ManifestEntry(base / e["layout"], base / e["gold"]))
    return CorpusManifest(doc["collection"], tuple(entries))


def manifest_to_document(manifest: CorpusManifest, relative_to: Path | None = None) -> dict[str, Any]:
    def rel(p: Path) -> str:
        return str(p.relative_to(relative_to)) if relative_to else str(p)

    return {
        "collection": manifest.collection,
        "entries": [{"layout": rel(e.layout), "gold": rel(e.gold)} for e in manifest.entries],
    }


def load_entry(entry: ManifestEntry) -> tuple[InterfaceLayout, QueryTree]:
    layout = load_layout(entry.layout)
    gold = load_tree(entry.gold, layout.field_map())
    return layout, gold


# -- synthetic corpora -------------------------------------------------------


@dataclass(frozen=True)
class SyntheticSpec:
    """Shape of a generated interface.

    Fields of one group sit on one row with a small gap between them. Rows
    are stacked and left/right flush; ``sections > 1`` splits the rows into
    sections separated by a wider gap, which adds one level of nesting.
    """

    groups: int = 3
    fields_per_group: tuple[int, int] = (2, 3)
    jitter: float = 0.0
    sections: int = 1
    decorations: int = 0
    page_width: float = 800.0
    page_height: float = 600.0

    def validate(self) -> None:
        lo, hi = self.fields_per_group
        if self.groups < 1:
            raise GenerationError(f"groups must be positive, got {self.groups}")
        if lo < 1 or hi < lo:
            raise GenerationError(f"bad fields_per_group range {self.fields_per_group}")
        if self.jitter < 0:
            raise GenerationError(f"jitter must be non-negative, got {self.jitter}")
        if not 1 <= self.sections <= self.groups:
            raise GenerationError(f"sections must be in [1, groups], got {self.sections}")
        if self.decorations < 0:
            raise GenerationError(f"decorations must be non-negative, got {self.decorations}")


_MARGIN = 20
_FIELD_GAP = (4, 10)
_ROW_GAP = (24, 36)
_SECTION_GAP = (60, 80)
_ROW_HEIGHT = (18, 26)
_FIELD_WIDTH = (40, 160)
_DECORATION_HEIGHT = 30


def generate_synthetic(
    seed: int, spec: SyntheticSpec | None = None, interface_id: str | None = None
) -> tuple[InterfaceLayout, QueryTree]:
    """Generate a layout and the gold tree its placement encodes.

    The gaps are chosen so that, without jitter, field gaps inside a row
    give the smallest proximity, row gaps the next, and section gaps the
    largest, with exact ties at each tier. Jitter shifts every field by
    whole pixels, at most ``jitter`` in x and in y.
    """
    spec = spec or SyntheticSpec()
    spec.validate()
    rng = random.Random(seed)
    interface_id = interface_id or f"synthetic-{seed}"

    field_gap = rng.randint(*_FIELD_GAP)
    row_gap = rng.randint(*_ROW_GAP)
    section_gap = rng.randint(*_SECTION_GAP)
    row_h = rng.randint(*_ROW_HEIGHT)

    sizes = [rng.randint(*spec.fields_per_group) for _ in range(spec.groups)]
    widths = [[rng.randint(*_FIELD_WIDTH) for _ in range(n)] for n in sizes]
    # Every row is padded to the same width so rows align left and right.
    row_w = max(sum(ws) + field_gap * (len(ws) - 1) for ws in widths)

    # Split rows into contiguous sections, each non-empty.
    cuts = sorted(rng.sample(range(1, spec.groups), spec.sections - 1)) if spec.sections > 1 else []
    bounds = [0, *cuts, spec.groups]
    section_of = [0] * spec.groups
    for s in range(spec.sections):
        for g in range(bounds[s], bounds[s + 1]):
            section_of[g] = s

    top = _MARGIN
    if spec.decorations:
        top += _DECORATION_HEIGHT + section_gap
    height_needed = top + row_h * spec.groups + row_gap * (spec.groups - spec.sections)
    height_needed += section_gap * (spec.sections - 1) + _MARGIN
    width_needed = 2 * _MARGIN + row_w
    if width_needed > spec.page_width or height_needed > spec.page_height:
        raise GenerationError(
            f"layout needs {width_needed}x{height_needed} px, page is {spec.page_width}x{spec.page_height}"
        )

    jit = int(spec.jitter)

    def shake() -> int:
        return rng.randint(-jit, jit) if jit else 0

    elements: list[FieldElement | DecorationElement] = []
    decorations: list[DecorationElement] = []
    for d in range(spec.decorations):
        w = rng.randint(60, 120)
        x0 = _MARGIN + d * (w + 10)
        if x0 + w > spec.page_width - _MARGIN:
            raise GenerationError("decorations do not fit on the page")
        deco = DecorationElement(
            f"deco{d}", rng.choice(("image", "hyperlink")), Rect(x0, _MARGIN, x0 + w, _MARGIN + _DECORATION_HEIGHT)
        )
        decorations.append(deco)

    sections: list[list[QueryNode]] = [[] for _ in range(spec.sections)]
    y = top
    counter = 0
    for g, ws in enumerate(widths):
        if g > 0:
            y += section_gap if section_of[g] != section_of[g - 1] else row_gap
        # Stretch the last field to fill the common row width.
        ws = ws[:-1] + [row_w - sum(ws[:-1]) - field_gap * (len(ws) - 1)]
        x = _MARGIN
        leaves: list[QueryNode] = []
        for w in ws:
            fid = f"f{counter}"
            counter += 1
            dx, dy = shake(), shake()
            x0 = min(max(x + dx, 0), spec.page_width - w)
            y0 = min(max(y + dy, 0), spec.page_height - row_h)
            box = Rect(x0, y0, x0 + w, y0 + row_h)
            elements.append(FieldElement(fid, f"Field {counter}", rng.choice(CONTROL_KINDS), box))
            leaves.append(Field(fid))
            x += w + field_gap
        node = Group(tuple(leaves), f"group {g}") if len(leaves) > 1 else leaves[0]
        sections[section_of[g]].append(node)
        y += row_h

    top_level = [Group(tuple(s), f"section {i}") if len(s) > 1 else s[0] for i, s in enumerate(sections)]
    if len(top_level) == 1 and isinstance(top_level[0], Group):
        top_level = list(top_level[0].children)

    layout = InterfaceLayout(
        interface_id, spec.page_width, spec.page_height, tuple(decorations) + tuple(elements)
    )
    gold = QueryTree(
        interface_id,
        Collection(tuple(top_level)),
        NotRendered(tuple(decorations)) if decorations else None,
        layout.field_map(),
    )
    return layout, canonicalize(gold)
