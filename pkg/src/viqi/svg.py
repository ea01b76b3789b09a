"""Static SVG picture of the first clustering round.

Each field is drawn as its box plus a circle for its scope of density.
Circles of one cluster share a stroke colour; noise fields get a dashed
grey circle.
"""

from __future__ import annotations

import math
from statistics import mean
from typing import Any
from xml.sax.saxutils import escape, quoteattr

from .geometry import DEFAULT_TOLERANCE, align_score
from .ingestion import InterfaceLayout

PALETTE = ("#1f77b4", "#2ca02c", "#d62728", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2")
NOISE_COLOUR = "#888888"


class TraceMismatchError(ValueError):
    pass


def _num(v: float) -> str:
    text = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


def scope_radius(layout: InterfaceLayout, field_id: str, eps: float, tol: float) -> float | None:
    """Circle radius in pixels for one field, or None if it aligns with nothing.

    Proximity is distance per alignment point, so the pixel reach of a
    field is ``eps`` times the alignment score of its partners, averaged
    over partners it aligns with at all.
    """
    fields = layout.field_map()
    me = fields[field_id].bbox
    scores = [align_score(me, f.bbox, tol) for fid, f in fields.items() if fid != field_id]
    scores = [s for s in scores if s > 0]
    if not scores:
        return None
    return eps * mean(scores)


def render_svg(layout: InterfaceLayout, trace: dict[str, Any] | None) -> str:
    fields = layout.field_map()
    levels = (trace or {}).get("levels") or []
    tol = float((trace or {}).get("tolerance", DEFAULT_TOLERANCE))

    colour: dict[str, str] = {}
    eps: float | None = None
    if levels:
        level0 = levels[0]
        item_ids = [i["id"] for i in level0["items"]]
        if set(item_ids) != set(fields) or len(item_ids) != len(fields):
            extra = sorted(set(item_ids) - set(fields))
            missing = sorted(set(fields) - set(item_ids))
            raise TraceMismatchError(
                f"trace and layout disagree on field ids (trace only: {extra}, layout only: {missing})"
            )
        raw_eps = level0["epsilon"]
        eps = math.inf if raw_eps == "unreachable" else float(raw_eps)
        for k, cluster in enumerate(level0["clusters"]):
            for fid in cluster:
                colour[fid] = PALETTE[k % len(PALETTE)]

    w, h = _num(layout.page_width), _num(layout.page_height)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">',
        "<!-- scope circle radius = level-0 epsilon x mean alignment score of the field's"
        " aligned partners (proximity is pixels per alignment point) -->",
        f"<title>{escape(layout.interface_id)}</title>",
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>',
    ]
    for d in layout.decorations:
        b = d.bbox
        out.append(
            f'<rect class="decoration" id={quoteattr(d.id)} x="{_num(b.x_min)}" y="{_num(b.y_min)}" '
            f'width="{_num(b.width)}" height="{_num(b.height)}" fill="none" stroke="#cccccc" '
            'stroke-dasharray="2,2"/>'
        )
    for f in layout.fields:
        b = f.bbox
        out.append(
            f'<rect class="field" id={quoteattr(f.id)} x="{_num(b.x_min)}" y="{_num(b.y_min)}" '
            f'width="{_num(b.width)}" height="{_num(b.height)}" fill="#f4f4f4" stroke="#333333"/>'
        )
        out.append(
            f'<text x="{_num(b.x_min + 2)}" y="{_num(b.y_max - 4)}" font-size="10" '
            f'font-family="sans-serif">{escape(f.label or f.id)}</text>'
        )
    if eps is not None and math.isfinite(eps):
        for f in layout.fields:
            r = scope_radius(layout, f.id, eps, tol)
            if r is None:
                continue
            c = f.bbox.center
            if f.id in colour:
                style = f'class="scope" stroke="{colour[f.id]}"'
            else:
                style = f'class="scope noise" stroke="{NOISE_COLOUR}" stroke-dasharray="4,3"'
            out.append(
                f'<circle {style} data-field={quoteattr(f.id)} cx="{_num(c.x)}" cy="{_num(c.y)}" '
                f'r="{_num(r)}" fill="none" stroke-width="1.5"/>'
            )
    out.append("</svg>")
    return "\n".join(out) + "\n"
