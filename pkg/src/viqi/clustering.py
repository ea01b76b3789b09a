"""Density clustering of fields by visual proximity, applied recursively.

Each round picks epsilon as the smallest proximity among the current
items, clusters with DBSCAN, and turns every cluster into a super-item
(its members' bounding box) for the next round. Rounds repeat until a
single item is left or a round merges nothing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Iterable, Sequence

from .geometry import DEFAULT_TOLERANCE, UNREACHABLE, Rect, bounding_box, proximity
from .query_model import (
    Collection,
    Field,
    FieldElement,
    Group,
    NotRendered,
    QueryNode,
    QueryTree,
    canonicalize,
    tree_to_document,
)


class DegenerateInputError(ValueError):
    pass


@dataclass(frozen=True)
class ClusterItem:
    """A field, or a group of fields acting as one box at the next level."""

    id: str
    bbox: Rect
    members: frozenset[str]
    node: QueryNode = field(compare=False, repr=False)

    @classmethod
    def from_field(cls, f: FieldElement) -> ClusterItem:
        return cls(f.id, f.bbox, frozenset((f.id,)), Field(f.id))


@dataclass
class ClusterLevel:
    epsilon: float
    min_pts: int
    items: list[ClusterItem]
    clusters: list[list[ClusterItem]]
    noise: list[ClusterItem]
    # Pairwise proximities keyed by (id, id) in item order; filled by build_hierarchy.
    proximities: dict[tuple[str, str], float] = field(default_factory=dict, repr=False)


@dataclass
class HierarchyTrace:
    levels: list[ClusterLevel]
    result: QueryTree


def reading_order(item: ClusterItem) -> tuple[float, float, str]:
    return (item.bbox.y_min, item.bbox.x_min, item.id)


def scope_density(
    item: ClusterItem,
    items: Iterable[ClusterItem],
    eps: float,
    tol: float = DEFAULT_TOLERANCE,
) -> list[ClusterItem]:
    """Items other than ``item`` whose proximity to it is at most ``eps``."""
    return [
        other
        for other in items
        if other.id != item.id and proximity(item.bbox, other.bbox, tol) <= eps
    ]


def select_eps(items: Sequence[ClusterItem], tol: float = DEFAULT_TOLERANCE) -> float:
    """Smallest proximity over all item pairs; ``UNREACHABLE`` if none is aligned."""
    if len(items) < 2:
        raise DegenerateInputError(f"epsilon needs at least 2 items, got {len(items)}")
    return min(proximity(a.bbox, b.bbox, tol) for a, b in combinations(items, 2))


def dbscan(
    items: Sequence[ClusterItem],
    eps: float,
    min_pts: int = 1,
    tol: float = DEFAULT_TOLERANCE,
) -> ClusterLevel:
    """One DBSCAN pass over ``items``.

    Items are visited in reading order. An item whose scope holds fewer
    than ``min_pts`` other items is noise; otherwise it seeds a cluster
    that grows through every reachable unvisited neighbour. A neighbour
    reached during expansion that is itself below ``min_pts`` is marked
    noise rather than kept as a border point.
    """
    if min_pts < 1:
        raise ValueError(f"min_pts must be >= 1, got {min_pts}")
    ordered = sorted(items, key=reading_order)
    visited: set[str] = set()
    noise_ids: set[str] = set()
    clusters: list[list[ClusterItem]] = []

    for f in ordered:
        if f.id in visited:
            continue
        scope = scope_density(f, ordered, eps, tol)
        if len(scope) < min_pts:
            noise_ids.add(f.id)
            continue
        cluster = [f]
        visited.add(f.id)
        stack = [n for n in reversed(scope) if n.id not in visited]
        while stack:
            g = stack.pop()
            if g.id in visited:
                continue
            g_scope = scope_density(g, ordered, eps, tol)
            if len(g_scope) < min_pts:
                noise_ids.add(g.id)
                continue
            visited.add(g.id)
            noise_ids.discard(g.id)
            cluster.append(g)
            stack.extend(n for n in reversed(g_scope) if n.id not in visited)
        cluster.sort(key=reading_order)
        clusters.append(cluster)

    noise = [f for f in ordered if f.id in noise_ids and f.id not in visited]
    return ClusterLevel(eps, min_pts, ordered, clusters, noise)


def _fresh_id(base: str, taken: set[str]) -> str:
    candidate = base
    while candidate in taken:
        candidate += "'"
    taken.add(candidate)
    return candidate


def build_hierarchy(
    fields: Sequence[FieldElement],
    tol: float = DEFAULT_TOLERANCE,
    min_pts: int = 1,
    interface_id: str = "",
    decorations: Sequence[Any] = (),
) -> HierarchyTrace:
    """Cluster ``fields`` recursively into a query tree.

    Noise items pass unchanged to the next round. When only one item is
    left its subtree becomes the root's content; when a round cannot
    merge anything, the remaining items all become root children.
    """
    if not fields:
        raise DegenerateInputError("cannot build a hierarchy from zero fields")
    taken = {f.id for f in fields}
    items = sorted((ClusterItem.from_field(f) for f in fields), key=reading_order)
    levels: list[ClusterLevel] = []

    while len(items) > 1:
        eps = select_eps(items, tol)
        if eps == UNREACHABLE:
            break
        level = dbscan(items, eps, min_pts, tol)
        level.proximities = {
            (a.id, b.id): proximity(a.bbox, b.bbox, tol) for a, b in combinations(level.items, 2)
        }
        levels.append(level)
        if all(len(c) < 2 for c in level.clusters):
            break
        depth = len(levels)
        merged = [
            ClusterItem(
                _fresh_id(f"#{depth}.{k}", taken),
                bounding_box(i.bbox for i in cluster),
                frozenset().union(*(i.members for i in cluster)),
                Group(tuple(i.node for i in cluster)),
            )
            for k, cluster in enumerate(level.clusters)
        ]
        items = sorted(merged + level.noise, key=reading_order)

    if len(items) == 1:
        only = items[0].node
        children = only.children if isinstance(only, Group) else (only,)
    else:
        children = tuple(i.node for i in items)

    not_rendered = NotRendered(tuple(decorations)) if decorations else None
    tree = QueryTree(interface_id, Collection(children), not_rendered, {f.id: f for f in fields})
    return HierarchyTrace(levels, canonicalize(tree))


# -- trace documents ---------------------------------------------------------


def _prox_value(p: float) -> float | str:
    return "unreachable" if math.isinf(p) else p


def trace_to_document(trace: HierarchyTrace, tol: float) -> dict[str, Any]:
    levels = []
    for depth, level in enumerate(trace.levels):
        ids = [i.id for i in level.items]
        matrix: list[list[float | str]] = []
        for a in ids:
            row: list[float | str] = []
            for b in ids:
                if a == b:
                    row.append(0.0)
                else:
                    p = level.proximities.get((a, b), level.proximities.get((b, a)))
                    row.append(_prox_value(p) if p is not None else "unreachable")
            matrix.append(row)
        levels.append(
            {
                "level": depth,
                "epsilon": _prox_value(level.epsilon),
                "min_pts": level.min_pts,
                "items": [
                    {"id": i.id, "bbox": i.bbox.as_list(), "members": sorted(i.members)}
                    for i in level.items
                ],
                "proximity": matrix,
                "clusters": [[i.id for i in c] for c in level.clusters],
                "noise": [i.id for i in level.noise],
            }
        )
    return {
        "interface_id": trace.result.interface_id,
        "tolerance": tol,
        "levels": levels,
        "result": tree_to_document(trace.result),
    }


def dumps_trace(trace: HierarchyTrace, tol: float) -> str:
    return json.dumps(trace_to_document(trace, tol), indent=2, ensure_ascii=False) + "\n"
