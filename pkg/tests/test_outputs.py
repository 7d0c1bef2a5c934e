import csv
import io
import json

import pytest
from hypothesis import given, strategies as st

from astcg.model import CallGraph, ReceiverKind
from astcg.outputs import (
    CSV_HEADER, SCHEMA_VERSION, SchemaMismatch, census, emit_csv, emit_dot, emit_json, load_json, overlap,
    render, unresolved_report,
)
from helpers import build, fixture_forest, graph_of


@pytest.fixture(scope="module")
def dispatch():
    _, p = build(fixture_forest("dispatch"))
    return graph_of(p, "scha", entry="name=foo")


@pytest.fixture(scope="module")
def field_new():
    _, p = build(fixture_forest("field_new"))
    return graph_of(p, "nr")


def test_empty_graph_dot_is_minimal():
    assert emit_dot(CallGraph()) == "digraph astcg {}\n"


def test_dot_keeps_dispatch_classes(dispatch):
    assert emit_dot(dispatch) == (
        "digraph astcg {\n"
        '  "A#method/0";\n  "B#method/0@A";\n  "Bar#foo/1";\n  "C#method/0@A";\n'
        '  "Bar#foo/1" -> "A#method/0";\n  "Bar#foo/1" -> "B#method/0@A";\n  "Bar#foo/1" -> "C#method/0@A";\n'
        "}\n"
    )


def test_dot_collapse_merges_inherited_targets(dispatch):
    text = emit_dot(dispatch, "collapse-inherited", {"a": 1})
    assert text.splitlines()[1] == '  comment="{\\"a\\": 1}";'
    assert text.count("->") == 1
    with pytest.raises(ValueError):
        emit_dot(dispatch, "sideways")


def test_json_layout(field_new):
    doc = json.loads(emit_json(field_new, {"z": 1, "a": 2}))
    assert list(doc) == ["schema_version", "config", "nodes", "edges", "unresolved"]
    assert doc["schema_version"] == SCHEMA_VERSION
    assert list(doc["config"]) == ["a", "z"]
    assert [n["id"] for n in doc["nodes"]] == ["Bar#bar/0", "Foo#method1/1"]
    assert doc["edges"] == [{"src": "Foo#method1/1", "dst": "Bar#bar/0", "defined_in": "Bar#bar/0",
                             "file": "Foo.java", "row": 7, "col": 7}]
    assert doc["unresolved"] == [{"file": "Foo.java", "row": 5, "col": 13, "name": "Bar", "arity": 0,
                                  "reason": "implicit-default-constructor"}]


def test_json_marks_inherited_nodes_synthetic(dispatch):
    nodes = {n["id"]: n for n in json.loads(emit_json(dispatch))["nodes"]}
    assert nodes["B#method/0@A"]["synthetic"] and nodes["B#method/0@A"]["class_path"] == ["B"]
    assert not nodes["A#method/0"]["synthetic"]


def test_json_class_level_nodes():
    _, p = build({"F.java": "class F { int v = calc(); int calc() { return 1; } }"})
    nodes = {n["id"]: n for n in json.loads(emit_json(graph_of(p)))["nodes"]}
    assert nodes["F#<fields>"] == {"id": "F#<fields>", "package": "", "class_path": ["F"],
                                   "name": "<fields>", "arity": None, "synthetic": True}


def test_csv(dispatch):
    rows = list(csv.reader(io.StringIO(emit_csv(dispatch))))
    assert tuple(rows[0]) == CSV_HEADER
    assert rows[1:] == [["Bar#foo/1", d, "A#method/0", "Bar.java", "7", "7"]
                        for d in ("A#method/0", "B#method/0@A", "C#method/0@A")]
    assert emit_csv(CallGraph()) == ",".join(CSV_HEADER) + "\n"


def test_render_dispatch(field_new):
    assert render(field_new, "csv") == emit_csv(field_new)
    assert render(field_new, "dot", None) == emit_dot(field_new)
    with pytest.raises(ValueError):
        render(field_new, "xml")


def test_load_json_round_trip(dispatch):
    doc = load_json(emit_json(dispatch))
    assert doc.projected_edges() == dispatch.edge_ids() == {("Bar#foo/1", "A#method/0")}


@pytest.mark.parametrize("text", [
    "not json",
    "[]",
    '{"schema_version": "astcg-graph/0", "nodes": [], "edges": [], "unresolved": []}',
    '{"schema_version": "astcg-graph/1", "nodes": [], "unresolved": []}',
    '{"schema_version": "astcg-graph/1", "nodes": [], "edges": [{"src": "x"}], "unresolved": []}',
])
def test_load_json_rejects(text):
    with pytest.raises(SchemaMismatch):
        load_json(text)


def test_overlap_format():
    m = overlap([("a", {("x", "y"), ("x", "z")}), ("b", {("x", "y")})])
    assert m.diagonal == [2, 1]
    assert m.cells[0][1] == 0.5 and m.cells[1][0] == 1.0
    assert m.format() == "        a      b\na       2  50.0%\nb  100.0%      1\n"


def test_overlap_empty_row_is_zero():
    assert overlap([("e", set()), ("f", {("a", "b")})]).cells[0] == [0.0, 0.0]
    with pytest.raises(ValueError):
        overlap([])


edges = st.sets(st.tuples(st.sampled_from("abc"), st.sampled_from("xyz")), max_size=9)


@given(edges, edges)
def test_overlap_cells_bounded_and_diagonal_full(a, b):
    m = overlap([("a", a), ("b", b)])
    for i in range(2):
        assert all(0.0 <= c <= 1.0 for c in m.cells[i])
        assert m.cells[i][i] == (1.0 if [a, b][i] else 0.0)
    if a <= b and a:
        assert m.cells[0][1] == 1.0


def test_census_hand_count():
    c = census(fixture_forest("census"))
    assert c.counts == {
        ReceiverKind.IMPLICIT: 2, ReceiverKind.EXPLICIT_THIS: 1, ReceiverKind.IDENTIFIER: 1,
        ReceiverKind.FIELD_ACCESS: 1, ReceiverKind.METHOD_INVOCATION: 1, ReceiverKind.OTHER: 1,
    }
    assert c.total == 7
    assert c.format().splitlines()[1] == "Implicit          2 (28.6%)"
    assert c.format().endswith("total             7\n")


def test_unresolved_report(field_new):
    assert unresolved_report(field_new) == "UNRESOLVED Foo.java 5:13 Bar/0 implicit-default-constructor\n"
    assert unresolved_report(CallGraph()) == ""
