"""Shared builders for the test suite."""

from __future__ import annotations

from pathlib import Path

from astcg.framework import generate, parse_entry_filter, select_entry_points
from astcg.frontend import Forest, forest_from_sources, parse_sources
from astcg.java.preprocess import JavaPreprocessor, JavaProducts
from astcg.java.resolve import GENERATORS, ResolutionConfig
from astcg.model import CallGraph

FIXTURES = Path(__file__).parent / "fixtures"
SMALL_FIXTURES = ("field_new", "dispatch", "overloads", "census", "mainless", "features")


def fixture_forest(name: str) -> Forest:
    return parse_sources(FIXTURES / name)


def fixture_sources(name: str) -> dict[str, str]:
    root = FIXTURES / name
    return {p.relative_to(root).as_posix(): p.read_text() for p in sorted(root.rglob("*.java"))}


def build(sources: dict[str, str] | Forest) -> tuple[Forest, JavaProducts]:
    forest = sources if isinstance(sources, Forest) else forest_from_sources(sources.items())
    return forest, JavaPreprocessor().run(forest)


def graph_of(products: JavaProducts, algo: str = "nr", entry: str = "all", **config) -> CallGraph:
    entries = select_entry_points(products.method_dict, parse_entry_filter(entry))
    return generate(GENERATORS[algo](products, ResolutionConfig(**config)), entries, products.method_dict)


def edge_pairs(graph: CallGraph) -> set[tuple[str, str]]:
    """Edges as ``(source id, target id)`` with the dispatch class kept."""
    return {(str(e.source), str(e.target)) for e in graph.edges}


def _span(node) -> tuple | None:
    return None if node is None else (node.start_byte, node.end_byte, node.type)


def products_fingerprint(p: JavaProducts) -> dict:
    """Every product in comparable form; syntax nodes become byte spans."""
    return {
        "method_dict": sorted((str(k), _span(v)) for k, v in p.method_dict.items()),
        "unique_dict": sorted((repr(k), sorted(map(str, v))) for k, v in p.unique_dict.items()),
        "method_info": sorted(
            (str(k), d.file, d.param_types, d.varargs, str(d.owner), d.name) for k, d in p.method_info.items()
        ),
        "class_cache": sorted(
            (str(n), r.kind, r.supertype_aliases, sorted(r.fields.items()), sorted(r.method_sigs),
             sorted(map(str, r.subclasses)), r.is_abstract, r.file)
            for n, r in p.class_cache.items()
        ),
        "package_importables": sorted(
            (pkg, sorted((a, str(c)) for a, c in ex.items())) for pkg, ex in p.package_importables.items()
        ),
        "import_tables": sorted(
            (path, t.own_package, sorted(t.explicit.items()), t.wildcard_packages) for path, t in p.import_tables.items()
        ),
        "class_nodes": sorted((str(n), path, _span(node)) for n, (path, node) in p.class_nodes.items()),
        "diagnostics": sorted(p.diagnostics),
    }
