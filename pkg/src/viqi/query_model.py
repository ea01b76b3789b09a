"""Hierarchical query representation.

A query is a tree: a single :class:`Collection` root whose subtree holds
:class:`Group` nodes (one per concept) and :class:`Field` leaves (one per
input control). Page decorations that carry no query meaning sit beside
the root in a :class:`NotRendered` node.

Two trees describe the same query when their *laminar families* agree:
the set of leaf-id sets spanned by the internal nodes. Labels and sibling
order are presentation only.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterator, Mapping, Union

from .geometry import Rect

CONTROL_KINDS = ("text", "select", "radio", "checkbox", "date", "other")
DECORATION_KINDS = ("image", "hyperlink", "text", "other")


class MalformedTreeError(ValueError):
    pass


class TreeParseError(MalformedTreeError):
    pass


class NotComparableError(ValueError):
    """Raised when two trees are built over different field sets."""


@dataclass(frozen=True)
class FieldElement:
    id: str
    label: str
    control: str
    bbox: Rect

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("field id must be non-empty")
        if self.control not in CONTROL_KINDS:
            raise ValueError(f"field {self.id!r}: unknown control {self.control!r}")


@dataclass(frozen=True)
class DecorationElement:
    id: str
    kind: str
    bbox: Rect
    label: str = ""

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("decoration id must be non-empty")
        if self.kind not in DECORATION_KINDS:
            raise ValueError(f"decoration {self.id!r}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class Field:
    id: str


@dataclass(frozen=True)
class Group:
    children: tuple[QueryNode, ...]
    label: str | None = None


@dataclass(frozen=True)
class Collection:
    children: tuple[QueryNode, ...]
    label: str | None = None


@dataclass(frozen=True)
class NotRendered:
    members: tuple[DecorationElement, ...]


QueryNode = Union[Field, Group, Collection]


@dataclass(frozen=True)
class QueryTree:
    interface_id: str
    root: Collection
    not_rendered: NotRendered | None = None
    # Geometry of the leaves, used only for reading-order sorting.
    fields: Mapping[str, FieldElement] = field(default_factory=dict, compare=False, repr=False)


def iter_leaves(node: QueryNode) -> Iterator[str]:
    if isinstance(node, Field):
        yield node.id
        return
    for child in node.children:
        yield from iter_leaves(child)


def leaf_ids(tree: QueryTree) -> list[str]:
    return list(iter_leaves(tree.root))


def _validate(tree: QueryTree) -> None:
    if not isinstance(tree.root, Collection):
        raise MalformedTreeError("root must be a Collection")
    seen: set[str] = set()

    def walk(node: QueryNode, is_root: bool) -> None:
        if isinstance(node, Field):
            if node.id in seen:
                raise MalformedTreeError(f"duplicate leaf {node.id!r}")
            seen.add(node.id)
            return
        if isinstance(node, Collection) and not is_root:
            raise MalformedTreeError("Collection may only appear as the root")
        if not isinstance(node, (Group, Collection)):
            raise MalformedTreeError(f"unexpected node {type(node).__name__} in query subtree")
        if not node.children:
            raise MalformedTreeError(f"empty {type(node).__name__.lower()}")
        for child in node.children:
            walk(child, False)

    walk(tree.root, True)


def canonicalize(tree: QueryTree) -> QueryTree:
    """Collapse single-child groups and sort siblings into reading order.

    Siblings are ordered by their top-most, then left-most leaf
    ``(y_min, x_min, id)``. Leaves without known geometry sort after
    those with geometry, by id.
    """
    _validate(tree)
    fields = tree.fields

    def leaf_key(fid: str) -> tuple[float, float, str]:
        elem = fields.get(fid)
        if elem is None:
            return (math.inf, math.inf, fid)
        return (elem.bbox.y_min, elem.bbox.x_min, fid)

    def canon(node: QueryNode) -> tuple[QueryNode, tuple[float, float, str]]:
        if isinstance(node, Field):
            return node, leaf_key(node.id)
        done = sorted((canon(c) for c in node.children), key=lambda pair: pair[1])
        if isinstance(node, Group) and len(done) == 1:
            return done[0]
        children = tuple(c for c, _ in done)
        return type(node)(children, node.label), done[0][1]

    root, _ = canon(tree.root)
    return QueryTree(tree.interface_id, root, tree.not_rendered, tree.fields)


def laminar_family(tree: QueryTree) -> frozenset[frozenset[str]]:
    """Leaf-id sets of all internal nodes, ignoring single-leaf groups."""
    _validate(tree)
    family: set[frozenset[str]] = set()

    def walk(node: QueryNode) -> frozenset[str]:
        if isinstance(node, Field):
            return frozenset((node.id,))
        leaves = frozenset().union(*(walk(c) for c in node.children))
        if len(leaves) > 1 or isinstance(node, Collection):
            family.add(leaves)
        return leaves

    walk(tree.root)
    return frozenset(family)


def _check_comparable(a: QueryTree, b: QueryTree) -> None:
    la, lb = set(leaf_ids(a)), set(leaf_ids(b))
    if la != lb:
        only_a = sorted(la - lb)
        only_b = sorted(lb - la)
        raise NotComparableError(
            f"trees cover different fields (only in first: {only_a}, only in second: {only_b})"
        )


def tree_equal(a: QueryTree, b: QueryTree) -> bool:
    """True when both trees group the same fields the same way."""
    _check_comparable(a, b)
    return laminar_family(a) == laminar_family(b)


def family_diff(
    extracted: QueryTree, gold: QueryTree
) -> tuple[list[list[str]], list[list[str]]]:
    """Gold groups the extraction missed, and extracted groups absent from gold."""
    _check_comparable(extracted, gold)
    fe, fg = laminar_family(extracted), laminar_family(gold)
    missed = sorted(sorted(s) for s in fg - fe)
    spurious = sorted(sorted(s) for s in fe - fg)
    return missed, spurious


# -- documents ---------------------------------------------------------------


def _node_to_doc(node: QueryNode) -> dict[str, Any]:
    if isinstance(node, Field):
        return {"type": "field", "id": node.id}
    doc: dict[str, Any] = {"type": "collection" if isinstance(node, Collection) else "group"}
    if node.label is not None:
        doc["label"] = node.label
    doc["children"] = [_node_to_doc(c) for c in node.children]
    return doc


def tree_to_document(tree: QueryTree) -> dict[str, Any]:
    doc: dict[str, Any] = {"interface_id": tree.interface_id, "root": _node_to_doc(tree.root)}
    if tree.not_rendered is not None:
        doc["not_rendered"] = [
            {"id": d.id, "kind": d.kind, "label": d.label, "bbox": d.bbox.as_list()}
            for d in tree.not_rendered.members
        ]
    return doc


def _node_from_doc(doc: Any, path: str, is_root: bool) -> QueryNode:
    if not isinstance(doc, dict):
        raise TreeParseError(f"{path}: node must be an object")
    kind = doc.get("type")
    if kind == "field":
        fid = doc.get("id")
        if not isinstance(fid, str) or not fid:
            raise TreeParseError(f"{path}: field needs a non-empty string id")
        return Field(fid)
    if kind not in ("group", "collection"):
        raise TreeParseError(f"{path}: unknown node type {kind!r}")
    if kind == "collection" and not is_root:
        raise TreeParseError(f"{path}: collection is only allowed as the root")
    if kind == "group" and is_root:
        raise TreeParseError(f"{path}: root must be a collection")
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise TreeParseError(f"{path}: label must be a string")
    children = doc.get("children")
    if not isinstance(children, list) or not children:
        raise TreeParseError(f"{path}: {kind} needs a non-empty children list")
    nodes = tuple(
        _node_from_doc(c, f"{path}.children[{i}]", False) for i, c in enumerate(children)
    )
    return (Collection if kind == "collection" else Group)(nodes, label)


def tree_from_document(
    doc: Any, fields: Mapping[str, FieldElement] | None = None
) -> QueryTree:
    """Parse a tree document. ``fields`` attaches leaf geometry if known."""
    if not isinstance(doc, dict):
        raise TreeParseError("tree document must be an object")
    interface_id = doc.get("interface_id")
    if not isinstance(interface_id, str):
        raise TreeParseError("missing string 'interface_id'")
    if "root" not in doc:
        raise TreeParseError("missing 'root'")
    root = _node_from_doc(doc["root"], "root", True)
    assert isinstance(root, Collection)

    not_rendered = None
    if doc.get("not_rendered") is not None:
        members = []
        try:
            for d in doc["not_rendered"]:
                members.append(
                    DecorationElement(d["id"], d["kind"], Rect.from_list(d["bbox"]), d.get("label", ""))
                )
        except (KeyError, TypeError, ValueError) as exc:
            raise TreeParseError(f"bad not_rendered entry: {exc}") from None
        not_rendered = NotRendered(tuple(members))

    tree = QueryTree(interface_id, root, not_rendered, dict(fields or {}))
    try:
        _validate(tree)
    except MalformedTreeError as exc:
        raise TreeParseError(str(exc)) from None
    return tree


def dumps_tree(tree: QueryTree) -> str:
    return json.dumps(tree_to_document(tree), indent=2, ensure_ascii=False) + "\n"


def loads_tree(text: str, fields: Mapping[str, FieldElement] | None = None) -> QueryTree:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise TreeParseError(f"invalid JSON: {exc}") from None
    return tree_from_document(doc, fields)


def load_tree(path: str | Path, fields: Mapping[str, FieldElement] | None = None) -> QueryTree:
    path = Path(path)
    try:
        return loads_tree(path.read_text(encoding="utf-8"), fields)
    except TreeParseError as exc:
        raise TreeParseError(f"{path}: {exc}") from None


def save_tree(tree: QueryTree, path: str | Path) -> None:
    Path(path).write_text(dumps_tree(tree), encoding="utf-8")
