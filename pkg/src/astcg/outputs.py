"""Graph emitters for DOT, JSON and CSV; overlap matrices and the receiver census live here too."""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .frontend import Forest
from .java.syntax import classify_receiver, collect
from .model import CallGraph, ClassLevelKey, ReceiverKind, TargetKey

SCHEMA_VERSION = "astcg-graph/1"
DOT_MODES = ("keep-dispatch", "collapse-inherited")


class SchemaMismatch(ValueError):
    pass


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _dst(target: TargetKey, mode: str) -> str:
    if mode == "collapse-inherited":
        return str(target.defined_in)
    if mode == "keep-dispatch":
        return str(target)
    raise ValueError(f"unknown DOT mode {mode!r}")


def emit_dot(graph: CallGraph, mode: str = "keep-dispatch", config: Mapping[str, Any] | None = None) -> str:
    pairs = sorted({(str(e.source), _dst(e.target, mode)) for e in graph.edges})
    if not pairs and config is None:
        return "digraph astcg {}\n"
    nodes = sorted({n for pair in pairs for n in pair})
    lines = ["digraph astcg {"]
    if config is not None:
        lines.append(f"  comment={_quote(json.dumps(config, sort_keys=True))};")
    lines += [f"  {_quote(n)};" for n in nodes]
    lines += [f"  {_quote(a)} -> {_quote(b)};" for a, b in pairs]
    lines.append("}")
    return "\n".join(lines) + "\n"


def _node_row(key) -> dict[str, Any]:
    if isinstance(key, ClassLevelKey):
        owner = key.owner
        return {"id": str(key), "package": owner.package, "class_path": list(owner.class_path),
                "name": f"<{key.region.value}>", "arity": None, "synthetic": True}
    if isinstance(key, TargetKey):
        owner, method = key.dispatch_class, key.defined_in
        synthetic = key.inherited
    else:
        owner, method, synthetic = key.owner, key, False
    return {"id": str(key), "package": owner.package, "class_path": list(owner.class_path),
            "name": method.name, "arity": method.arity, "synthetic": synthetic}


def node_rows(graph: CallGraph) -> list[dict[str, Any]]:
    rows: dict[str, dict[str, Any]] = {}
    for key in graph.vertices:
        row = _node_row(key)
        # a method seen both as a source and a direct target is one vertex
        rows.setdefault(row["id"], row)
    return [rows[k] for k in sorted(rows)]


def edge_rows(graph: CallGraph) -> list[dict[str, Any]]:
    rows = []
    for e in graph.edges:
        row, col = graph.positions.get(e.site, (0, 0))
        rows.append({"src": str(e.source), "dst": str(e.target), "defined_in": str(e.target.defined_in),
                     "file": e.site.file, "row": row, "col": col})
    rows.sort(key=lambda r: (r["src"], r["dst"], r["file"], r["row"], r["col"]))
    return rows


def unresolved_rows(graph: CallGraph) -> list[dict[str, Any]]:
    rows = [{"file": s.site_id.file, "row": s.row, "col": s.col, "name": s.callee_name,
             "arity": s.arg_count, "reason": reason} for s, reason in graph.unresolved]
    rows.sort(key=lambda r: (r["file"], r["row"], r["col"], r["name"], r["reason"]))
    return rows


def emit_json(graph: CallGraph, config: Mapping[str, Any] | None = None) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": dict(sorted((config or {}).items())),
        "nodes": node_rows(graph),
        "edges": edge_rows(graph),
        "unresolved": unresolved_rows(graph),
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


CSV_HEADER = ("src", "dst", "defined_in", "file", "row", "col")


def emit_csv(graph: CallGraph) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    writer.writerows(edge_rows(graph))
    return buf.getvalue()


@dataclass
class GraphDocument:
    """A graph read back from its JSON form."""

    schema_version: str
    config: dict[str, Any]
    nodes: list[dict[str, Any]]
    edges: list[dict[str, Any]]
    unresolved: list[dict[str, Any]]

    def projected_edges(self) -> set[tuple[str, str]]:
        return {(e["src"], e["defined_in"]) for e in self.edges}


def load_json(text: str) -> GraphDocument:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaMismatch(f"not a graph document: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema_version") != SCHEMA_VERSION:
        found = doc.get("schema_version") if isinstance(doc, dict) else None
        raise SchemaMismatch(f"expected schema {SCHEMA_VERSION}, found {found!r}")
    for k in ("nodes", "edges", "unresolved"):
        if not isinstance(doc.get(k), list):
            raise SchemaMismatch(f"missing {k} array")
    for e in doc["edges"]:
        if not isinstance(e, dict) or not {"src", "defined_in"} <= e.keys():
            raise SchemaMismatch("edge rows need src and defined_in")
    return GraphDocument(doc["schema_version"], doc.get("config", {}), doc["nodes"], doc["edges"], doc["unresolved"])


# -- overlap ---------------------------------------------------------------


@dataclass
class OverlapMatrix:
    labels: list[str]
    diagonal: list[int]
    cells: list[list[float]]

    def format(self) -> str:
        """Render as a table: counts on the diagonal, row-in-column percentages elsewhere."""
        n = len(self.labels)
        grid = [[""] + self.labels]
        for i in range(n):
            row = [self.labels[i]]
            for j in range(n):
                row.append(str(self.diagonal[i]) if i == j else f"{100 * self.cells[i][j]:.1f}%")
            grid.append(row)
        widths = [max(len(r[c]) for r in grid) for c in range(n + 1)]
        lines = []
        for r in grid:
            cells = [r[0].ljust(widths[0])] + [r[c].rjust(widths[c]) for c in range(1, n + 1)]
            lines.append("  ".join(cells).rstrip())
        return "\n".join(lines) + "\n"


def _projection(g) -> set[tuple[str, str]]:
    if isinstance(g, GraphDocument):
        return g.projected_edges()
    if isinstance(g, CallGraph):
        return g.edge_ids()
    return set(g)


def overlap(graphs: Sequence[tuple[str, Any]]) -> OverlapMatrix:
    """Pairwise share of each row graph's ``(source, defining method)`` edges found by each column graph."""
    if not graphs:
        raise ValueError("need at least one graph")
    labels = [name for name, _ in graphs]
    sets = [_projection(g) for _, g in graphs]
    cells = []
    for a in sets:
        if not a:
            cells.append([0.0] * len(sets))
        else:
            cells.append([len(a & b) / len(a) for b in sets])
    return OverlapMatrix(labels, [len(s) for s in sets], cells)


# -- census ----------------------------------------------------------------


@dataclass
class ReceiverCensus:
    counts: dict[ReceiverKind, int] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def fractions(self) -> dict[ReceiverKind, float]:
        total = self.total
        if not total:
            return {}
        return {k: v / total for k, v in self.counts.items()}

    def format(self) -> str:
        rows = [("receiver", "count")]
        fractions = self.fractions
        for kind in ReceiverKind:
            n = self.counts.get(kind, 0)
            if n:
                rows.append((kind.value, f"{n} ({100 * fractions[kind]:.1f}%)"))
        rows.append(("total", str(self.total)))
        width = max(len(r[0]) for r in rows)
        return "\n".join(f"{a.ljust(width)}  {b}" for a, b in rows) + "\n"


def census(forest: Forest) -> ReceiverCensus:
    """Classify the receiver of every method invocation in the forest."""
    counts: Counter = Counter()
    for _, root in forest:
        for node in collect(root, frozenset({"method_invocation"})):
            counts[classify_receiver(node).kind] += 1
    return ReceiverCensus({k: counts[k] for k in ReceiverKind if counts[k]})


def unresolved_report(graph: CallGraph) -> str:
    return "".join(
        f"UNRESOLVED {r['file']} {r['row']}:{r['col']} {r['name']}/{r['arity']} {r['reason']}\n"
        for r in unresolved_rows(graph)
    )


def render(graph: CallGraph, fmt: str, config: Mapping[str, Any] | None = None, dot_mode: str = "keep-dispatch") -> str:
    if fmt == "json":
        return emit_json(graph, config)
    if fmt == "dot":
        return emit_dot(graph, dot_mode, config)
    if fmt == "csv":
        return emit_csv(graph)
    raise ValueError(f"unknown format {fmt!r}")
