import json

import pytest

from astcg.frontend import parse_sources
from astcg.java.cache import CACHE_SCHEMA, CacheMismatch, dump_cache, load_cache
from helpers import FIXTURES, SMALL_FIXTURES, build, edge_pairs, graph_of, products_fingerprint


@pytest.mark.parametrize("name", SMALL_FIXTURES)
def test_round_trip_preserves_products(name):
    forest, products = build(parse_sources(FIXTURES / name))
    text = dump_cache(products, forest)
    loaded, forest2 = load_cache(text)
    assert products_fingerprint(loaded) == products_fingerprint(products)
    assert [f.path for f, _ in forest2] == [f.path for f, _ in forest]
    # a second dump is byte-identical
    assert dump_cache(loaded, forest2) == text


def test_cached_products_generate_same_graph():
    forest, products = build(parse_sources(FIXTURES / "features"))
    loaded, _ = load_cache(dump_cache(products, forest))
    for algo in ("nr", "scha"):
        assert edge_pairs(graph_of(loaded, algo)) == edge_pairs(graph_of(products, algo))


@pytest.fixture
def copied(tmp_path):
    (tmp_path / "A.java").write_text("class A { void f() { g(); } void g() {} }")
    forest, products = build(parse_sources(tmp_path))
    return tmp_path, dump_cache(products, forest)


def test_document_header(copied):
    root, text = copied
    doc = json.loads(text)
    assert doc["schema"] == CACHE_SCHEMA and doc["language"] == "java"
    assert doc["source_root"] == root.resolve().as_posix()
    assert [f["path"] for f in doc["files"]] == ["A.java"]


def test_source_root_override(copied, tmp_path_factory):
    root, text = copied
    moved = tmp_path_factory.mktemp("moved")
    (moved / "A.java").write_bytes((root / "A.java").read_bytes())
    (root / "A.java").unlink()
    with pytest.raises(CacheMismatch, match="unavailable"):
        load_cache(text)
    products, forest = load_cache(text, moved)
    assert forest.root_dir == moved
    assert edge_pairs(graph_of(products)) == {("A#f/0", "A#g/0")}


def test_edited_source_is_rejected(copied):
    root, text = copied
    (root / "A.java").write_text("class A { void f() {} }")
    with pytest.raises(CacheMismatch, match="changed"):
        load_cache(text)


@pytest.mark.parametrize("edit", [
    lambda d: d.update(schema="astcg-preprocess/0"),
    lambda d: d.update(grammar_version="java-0.0.0"),
    lambda d: d.update(language="cobol"),
    lambda d: d.pop("methods"),
])
def test_header_mismatches(copied, edit):
    _, text = copied
    doc = json.loads(text)
    edit(doc)
    with pytest.raises(CacheMismatch):
        load_cache(json.dumps(doc))


def test_garbage_is_rejected():
    with pytest.raises(CacheMismatch):
        load_cache("{not json")
    with pytest.raises(CacheMismatch):
        load_cache("[1, 2]")
