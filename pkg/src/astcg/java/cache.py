"""Versioned JSON cache of the Java preprocess products.

Syntax nodes are stored as ``(file, start byte, end byte, kind)`` and located
again after re-parsing the recorded sources; file digests guard against a
cache outliving its sources.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from ..framework import AliasNameArity, NameArity
from ..frontend import Forest, forest_from_sources, load_grammar, locate
from ..model import ClassName, MethodKey
from .preprocess import ClassRecord, ImportTable, JavaProducts, MethodDecl

CACHE_SCHEMA = "astcg-preprocess/1"


class CacheMismatch(ValueError):
    """The cache was written by another schema or grammar, or its sources changed."""


def _cls(c: ClassName) -> dict[str, Any]:
    return {"package": c.package, "class_path": list(c.class_path)}


def _uncls(d: dict) -> ClassName:
    return ClassName(d["package"], tuple(d["class_path"]))


def _key(k: MethodKey) -> dict[str, Any]:
    return {"package": k.package, "class_path": list(k.class_path), "name": k.name, "arity": k.arity,
            "param_types": list(k.param_type_aliases) if k.param_type_aliases is not None else None}


def _unkey(d: dict) -> MethodKey:
    types = tuple(d["param_types"]) if d["param_types"] is not None else None
    return MethodKey(d["package"], tuple(d["class_path"]), d["name"], d["arity"], types)


def _loc(file: str, node) -> dict[str, Any]:
    return {"file": file, "start": node.start_byte, "end": node.end_byte, "kind": node.type}


def digest(content: bytes) -> str:
    return hashlib.sha256(content).hexdigest()


def dump_cache(products: JavaProducts, forest: Forest) -> str:
    methods = []
    for key in sorted(products.method_info, key=str):
        d = products.method_info[key]
        methods.append({"key": _key(key), "varargs": d.varargs, "param_types": list(d.param_types),
                        "body": _loc(d.file, d.body)})
    unique = []
    for nk in sorted(products.unique_dict, key=lambda k: (type(k).__name__, tuple(map(str, vars(k).values())))):
        row: dict[str, Any] = {"index": "name_arity" if isinstance(nk, NameArity) else "alias_name_arity"}
        row.update(vars(nk))
        row["keys"] = sorted(str(k) for k in products.unique_dict[nk])
        unique.append(row)
    classes = []
    for name in sorted(products.class_cache, key=str):
        r = products.class_cache[name]
        classes.append({
            "qualified_name": _cls(name), "kind": r.kind, "supertype_aliases": list(r.supertype_aliases),
            "fields": dict(sorted(r.fields.items())), "method_sigs": sorted([n, a] for n, a in r.method_sigs),
            "subclasses": sorted(str(s) for s in r.subclasses), "is_abstract": r.is_abstract, "file": r.file,
        })
    doc = {
        "schema": CACHE_SCHEMA,
        "language": forest.grammar.tag,
        "grammar_version": forest.grammar.version,
        "source_root": Path(forest.root_dir).resolve().as_posix() if forest.root_dir else None,
        "files": [{"path": f.path, "sha256": digest(f.content)} for f in forest.files],
        "methods": methods,
        "unique_dict": unique,
        "class_cache": classes,
        "package_importables": {
            pkg: {n: _cls(c) for n, c in sorted(exports.items())}
            for pkg, exports in sorted(products.package_importables.items())
        },
        "import_tables": {
            path: {"own_package": t.own_package, "explicit": dict(sorted(t.explicit.items())),
                   "wildcard_packages": list(t.wildcard_packages)}
            for path, t in sorted(products.import_tables.items())
        },
        "class_nodes": [
            {"name": _cls(n), **_loc(path, node)}
            for n, (path, node) in sorted(products.class_nodes.items(), key=lambda kv: str(kv[0]))
        ],
        "diagnostics": list(products.diagnostics),
    }
    return json.dumps(doc, indent=1, ensure_ascii=False) + "\n"


def load_cache(text: str, source_root: str | Path | None = None) -> tuple[JavaProducts, Forest]:
    """Rebuild products and the parsed forest from a cache document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CacheMismatch(f"unreadable cache: {exc}") from exc
    if not isinstance(doc, dict) or doc.get("schema") != CACHE_SCHEMA:
        raise CacheMismatch(f"cache schema {doc.get('schema') if isinstance(doc, dict) else None!r}, expected {CACHE_SCHEMA}")
    try:
        return _rebuild(doc, source_root)
    except (LookupError, TypeError, ValueError) as exc:
        if isinstance(exc, CacheMismatch):
            raise
        raise CacheMismatch(f"malformed cache: {exc!r}") from exc


def _rebuild(doc: dict, source_root: str | Path | None) -> tuple[JavaProducts, Forest]:
    grammar = load_grammar(doc["language"])
    if doc["grammar_version"] != grammar.version:
        raise CacheMismatch(f"cache built with {doc['grammar_version']}, running {grammar.version}")
    root = Path(source_root or doc["source_root"] or ".")
    sources = []
    for entry in doc["files"]:
        try:
            content = (root / entry["path"]).read_bytes()
        except OSError as exc:
            raise CacheMismatch(f"source {entry['path']} unavailable: {exc}") from exc
        if digest(content) != entry["sha256"]:
            raise CacheMismatch(f"source {entry['path']} changed since preprocessing")
        sources.append((entry["path"], content))
    forest = forest_from_sources(sources, doc["language"])
    forest.root_dir = root
    roots = {f.path: r for f, r in forest}

    def node(loc: dict):
        return locate(roots[loc["file"]], loc["start"], loc["end"], loc["kind"])

    info: dict[MethodKey, MethodDecl] = {}
    for m in doc["methods"]:
        key = _unkey(m["key"])
        info[key] = MethodDecl(key.owner, key.name, tuple(m["param_types"]), m["varargs"],
                               node(m["body"]), m["body"]["file"])
    by_id = {str(k): k for k in info}
    unique = {}
    for row in doc["unique_dict"]:
        nk = (NameArity(row["name"], row["arity"]) if row["index"] == "name_arity"
              else AliasNameArity(row["alias"], row["name"], row["arity"]))
        unique[nk] = frozenset(by_id[i] for i in row["keys"])
    records: dict[ClassName, ClassRecord] = {}
    for c in doc["class_cache"]:
        name = _uncls(c["qualified_name"])
        records[name] = ClassRecord(
            name, c["kind"], tuple(c["supertype_aliases"]), dict(c["fields"]),
            frozenset((n, a) for n, a in c["method_sigs"]), frozenset(), c["is_abstract"], c["file"],
        )
    by_cls = {str(n): n for n in records}
    for c in doc["class_cache"]:
        name = _uncls(c["qualified_name"])
        records[name].subclasses = frozenset(by_cls[s] for s in c["subclasses"])
    products = JavaProducts(
        {k: d.body for k, d in info.items()},
        unique,
        decls=list(info.values()),
        method_info=info,
        class_cache=records,
        package_importables={
            pkg: {n: _uncls(c) for n, c in exports.items()} for pkg, exports in doc["package_importables"].items()
        },
        import_tables={
            path: ImportTable(t["own_package"], dict(t["explicit"]), tuple(t["wildcard_packages"]))
            for path, t in doc["import_tables"].items()
        },
        class_nodes={_uncls(c["name"]): (c["file"], node(c)) for c in doc["class_nodes"]},
        diagnostics=list(doc["diagnostics"]),
    )
    return products, forest
