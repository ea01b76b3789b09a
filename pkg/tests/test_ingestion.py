from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from viqi.clustering import build_hierarchy
from viqi.ingestion import (
    GenerationError,
    LayoutError,
    ManifestError,
    SyntheticSpec,
    dumps_layout,
    generate_synthetic,
    load_layout,
    load_manifest,
    loads_layout,
    parse_layout,
)
from viqi.query_model import dumps_tree, tree_equal


def doc(*elements, width=100, height=100):
    return {"interface_id": "x", "page": {"width": width, "height": height}, "elements": list(elements)}


def fld(eid, bbox, **kw):
    return {"id": eid, "kind": "field", "label": eid, "control": "text", "bbox": bbox, **kw}


def test_flight_search_layout_has_ten_fields(flight_search_layout):
    assert len(flight_search_layout.fields) == 10
    assert {d.kind for d in flight_search_layout.decorations} == {"image", "hyperlink"}


def test_duplicate_id_named():
    with pytest.raises(LayoutError, match="'a'"):
        parse_layout(doc(fld("a", [0, 0, 1, 1]), fld("a", [2, 2, 3, 3])))


def test_inverted_bbox_rejected():
    with pytest.raises(LayoutError, match="'a'.*inverted"):
        parse_layout(doc(fld("a", [10, 0, 5, 1])))


def test_out_of_page_rejected():
    with pytest.raises(LayoutError, match="outside page"):
        parse_layout(doc(fld("a", [90, 0, 110, 10])))


def test_zero_fields_rejected():
    deco = {"id": "logo", "kind": "decoration", "control": "image", "bbox": [0, 0, 5, 5]}
    with pytest.raises(LayoutError, match="no field"):
        parse_layout(doc(deco))


@pytest.mark.parametrize(
    "bad, match",
    [
        ([fld("a", [0, 0, 1])], "bbox"),
        ([fld("a", [0, 0, 1, "2"])], "number"),
        ([fld("a", [0, 0, 1, 1], kind="widget")], "kind"),
        ([fld("a", [0, 0, 1, 1], control="slider")], "control"),
        ([{"kind": "field", "bbox": [0, 0, 1, 1]}], "id"),
    ],
)
def test_element_errors(bad, match):
    with pytest.raises(LayoutError, match=match):
        parse_layout(doc(*bad))


def test_page_must_be_positive():
    with pytest.raises(LayoutError, match="positive"):
        parse_layout(doc(fld("a", [0, 0, 0, 0]), width=0))


def test_load_layout_names_path(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text("{oops")
    with pytest.raises(LayoutError, match="broken.json"):
        load_layout(p)
    with pytest.raises(LayoutError, match="missing.json"):
        load_layout(tmp_path / "missing.json")


def test_layout_round_trip(flight_search_layout):
    assert loads_layout(dumps_layout(flight_search_layout)) == flight_search_layout


def test_manifest_resolves_relative_paths(tmp_path):
    (tmp_path / "m.json").write_text(json.dumps({"collection": "Books", "entries": [{"layout": "a.json", "gold": "b.json"}]}))
    m = load_manifest(tmp_path / "m.json")
    assert m.collection == "Books"
    assert m.entries[0].layout == tmp_path / "a.json"


def test_manifest_errors(tmp_path):
    (tmp_path / "m.json").write_text(json.dumps({"collection": "Books", "entries": [{"layout": "a.json"}]}))
    with pytest.raises(ManifestError, match=r"entries\[0\]"):
        load_manifest(tmp_path / "m.json")
    with pytest.raises(ManifestError):
        load_manifest(tmp_path / "nope.json")


# synthetic generation --------------------------------------------------------


def test_seed1_recovered_exactly():
    layout, gold = generate_synthetic(1, SyntheticSpec(groups=3, fields_per_group=(2, 3), jitter=0))
    assert len(layout.fields) >= 6
    assert tree_equal(build_hierarchy(layout.fields).result, gold)


def test_generation_deterministic():
    spec = SyntheticSpec(groups=4, sections=2, decorations=1, jitter=3)
    a = generate_synthetic(7, spec)
    b = generate_synthetic(7, spec)
    assert dumps_layout(a[0]) == dumps_layout(b[0])
    assert dumps_tree(a[1]) == dumps_tree(b[1])


@pytest.mark.parametrize("seed", range(100))
def test_closed_loop_without_jitter(seed):
    spec = SyntheticSpec(
        groups=1 + seed % 5,
        fields_per_group=(1, 4),
        sections=1 + seed % 2 if seed % 5 else 1,
        decorations=seed % 3,
    )
    layout, gold = generate_synthetic(seed, spec)
    assert loads_layout(dumps_layout(layout)) == layout
    result = build_hierarchy(layout.fields, 2.0, 1, layout.interface_id, layout.decorations).result
    assert tree_equal(result, gold)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.floats(0, 200))
def test_heavy_jitter_still_valid(seed, jitter):
    layout, gold = generate_synthetic(seed, SyntheticSpec(groups=3, jitter=jitter))
    again = loads_layout(dumps_layout(layout))
    assert again == layout
    assert sorted(f.id for f in layout.fields) == sorted(gold.fields)


def test_jitter_bounds_displacement():
    base, _ = generate_synthetic(5, SyntheticSpec(groups=4, jitter=0))
    shaken, _ = generate_synthetic(5, SyntheticSpec(groups=4, jitter=3))
    for a, b in zip(base.fields, shaken.fields):
        assert abs(a.bbox.x_min - b.bbox.x_min) <= 3
        assert abs(a.bbox.y_min - b.bbox.y_min) <= 3
        assert a.bbox.width == b.bbox.width


@pytest.mark.parametrize(
    "spec",
    [
        SyntheticSpec(groups=0),
        SyntheticSpec(fields_per_group=(3, 2)),
        SyntheticSpec(jitter=-1),
        SyntheticSpec(groups=2, sections=3),
        SyntheticSpec(groups=30),
        SyntheticSpec(fields_per_group=(9, 9)),
    ],
)
def test_bad_specs(spec):
    with pytest.raises(GenerationError):
        generate_synthetic(0, spec)
