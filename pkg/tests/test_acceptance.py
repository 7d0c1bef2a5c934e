"""Acceptance criteria, one test each.

Every test carries a ``criterion`` marker; the summary at the end of the
run prints one PASS or FAIL line per criterion.
"""

import gc
import time

import pytest
from tree_sitter import Query, QueryCursor

from astcg.cli import main
from astcg.framework import class_level_containers
from astcg.frontend import forest_from_sources, load_grammar, parse_sources
from astcg.java.preprocess import merge_products, preprocess_file, preprocess_parallel
from astcg.java.resolve import NRGenerator
from astcg.model import ReceiverKind
from astcg.outputs import census, overlap
from astcg.synth import PERF_SHAPE, CorpusShape, generate_corpus, write_corpus
from helpers import FIXTURES, SMALL_FIXTURES, build, edge_pairs, fixture_forest, graph_of, products_fingerprint
from oracle import oracle_nr_edges

RANDOM_SEEDS = range(50)


@pytest.mark.criterion("1. field_new: one edge, one unresolved creation, two sites, under 1 s")
def test_field_initializer_creation_exact():
    t0 = time.perf_counter()
    _, products = build(fixture_forest("field_new"))
    graph = graph_of(products, "nr")
    elapsed = time.perf_counter() - t0

    gen = NRGenerator(products)
    containers = set(products.method_dict)
    containers.update(c for k in products.method_dict for c in class_level_containers(k.owner))
    sites = [s for c in sorted(containers, key=str) for s in gen.seek_call_sites(c)]

    assert edge_pairs(graph) == {("Foo#method1/1", "Bar#bar/0")}
    assert [(s.callee_name, r) for s, r in graph.unresolved] == [("Bar", "implicit-default-constructor")]
    assert sorted(s.callee_name for s in sites) == ["Bar", "bar"]
    assert elapsed < 1.0


@pytest.mark.criterion("2. dispatch: three dispatch edges with subtypes, one without")
def test_inherited_dispatch_exact():
    _, products = build(fixture_forest("dispatch"))
    entry = "regex=^Bar#foo/1$"
    assert edge_pairs(graph_of(products, "scha", entry)) == {
        ("Bar#foo/1", "A#method/0"), ("Bar#foo/1", "B#method/0@A"), ("Bar#foo/1", "C#method/0@A"),
    }
    assert edge_pairs(graph_of(products, "scha", entry, scha_expand_subtypes=False)) == {
        ("Bar#foo/1", "A#method/0"),
    }


@pytest.mark.criterion("3. overloads: the add site resolves to both overloads")
def test_overload_pair_exact():
    _, products = build(fixture_forest("overloads"))
    graph = graph_of(products, "nr")
    add_edges = {(str(e.source), str(e.target)) for e in graph.edges if e.target.defined_in.name == "add"}
    assert add_edges == {("Bar#foo/2", "Bar#add/2(float,float)"), ("Bar#foo/2", "Bar#add/2(int,int)")}
    assert len({e.site for e in graph.edges if e.target.defined_in.name == "add"}) == 1


@pytest.mark.criterion("4. SCHA edges within NR edges on 50 random corpora")
def test_containment():
    violations = {}
    for seed in RANDOM_SEEDS:
        _, products = build(generate_corpus(seed))
        scha, nr = graph_of(products, "scha"), graph_of(products, "nr")
        matrix = overlap([("SCHA", scha), ("NR", nr)])
        outside = scha.edge_ids() - nr.edge_ids()
        if outside or matrix.format().splitlines()[1].split()[2] != "100.0%":
            violations[seed] = sorted(outside)[:3]
        assert len(products.class_cache) >= 200
    assert violations == {}


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("det")
    write_corpus(root, generate_corpus(1234, CorpusShape(classes=200)))
    return root


@pytest.mark.criterion("5. byte-identical JSON across thread counts")
def test_determinism(capsys, corpus_dir, tmp_path):
    outputs = {}
    for threads in (1, 4, 2):
        cache = tmp_path / f"cache{threads}.json"
        assert main(["preprocess", "--src", str(corpus_dir), "--out", str(cache), "--threads", str(threads)]) == 0
        for algo in ("nr", "scha"):
            out = tmp_path / f"{algo}{threads}.json"
            assert main(["generate", "--cache", str(cache), "--algo", algo, "--out", str(out),
                         "--threads", str(threads)]) == 0
            outputs.setdefault(algo, set()).add(out.read_bytes())
    capsys.readouterr()
    assert {algo: len(v) for algo, v in outputs.items()} == {"nr": 1, "scha": 1}


@pytest.mark.criterion("6. per-file merge equals whole-forest preprocessing")
def test_merge_equivalence():
    cases = [parse_sources(FIXTURES / name) for name in SMALL_FIXTURES]
    cases += [forest_from_sources(generate_corpus(seed, CorpusShape(classes=60)).items()) for seed in range(5)]
    for forest in cases:
        _, whole = build(forest)
        merged = merge_products([preprocess_file(forest, i) for i in range(len(forest))])
        assert products_fingerprint(merged) == products_fingerprint(whole)


def _small_cases():
    for name in SMALL_FIXTURES:
        yield name, fixture_forest(name)
    for seed in range(40):
        yield f"synth-{seed}", forest_from_sources(generate_corpus(seed, CorpusShape(classes=6, packages=2, interfaces=2)).items())


@pytest.mark.criterion("7. worklist NR equals the brute-force oracle on small inputs")
def test_oracle_equivalence():
    checked, mismatched = 0, []
    for name, forest in _small_cases():
        _, products = build(forest)
        if len(products.method_dict) > 50:
            continue
        checked += 1
        if {(a, b.split("@")[0]) for a, b in edge_pairs(graph_of(products, "nr"))} != oracle_nr_edges([r for _, r in forest]):
            mismatched.append(name)
    assert checked >= len(SMALL_FIXTURES) + 20
    assert mismatched == []


@pytest.mark.criterion("8. census: hand count exact, totals equal a direct tree query")
def test_census():
    counts = census(fixture_forest("census")).counts
    assert counts == {kind: (2 if kind is ReceiverKind.IMPLICIT else 1) for kind in ReceiverKind}

    query = Query(load_grammar("java").language, "(method_invocation) @call")
    for seed in range(10):
        forest = forest_from_sources(generate_corpus(seed).items())
        direct = sum(len(QueryCursor(query).captures(root).get("call", [])) for _, root in forest)
        assert census(forest).total == direct > 0


def _preprocess_seconds(root, threads: int) -> float:
    gc.collect()
    t0 = time.perf_counter()
    products = preprocess_parallel(parse_sources(root, threads=threads), threads)
    elapsed = time.perf_counter() - t0
    del products
    return elapsed


@pytest.mark.slow
@pytest.mark.criterion("9. 1000-file corpus under 60 s; 4 threads no slower than 1")
def test_performance(tmp_path):
    files = generate_corpus(2024, PERF_SHAPE)
    write_corpus(tmp_path, files)
    assert len(files) >= 1000
    assert sum(text.count("\n") for text in files.values()) >= 90_000

    t0 = time.perf_counter()
    forest = parse_sources(tmp_path, threads=4)
    products = preprocess_parallel(forest, 4)
    graph_of(products, "nr")
    assert time.perf_counter() - t0 < 60.0
    del forest, products

    # interleaved best-of-5, alternating which goes first, damps scheduler
    # noise; 10% allows for timer jitter
    one, four = [], []
    for rep in range(5):
        for threads in ((1, 4) if rep % 2 == 0 else (4, 1)):
            (one if threads == 1 else four).append(_preprocess_seconds(tmp_path, threads))
    print(f"preprocess best of 5: 1 thread {min(one):.2f}s, 4 threads {min(four):.2f}s")
    assert min(four) <= 1.10 * min(one)
