"""Java lookup structures built ahead of generation.

Everything here is a per-file map followed by a merge.  :class:`JavaPreprocessor`
builds the products for a whole forest in one go; :func:`preprocess_file` and
:func:`merge_products` build the same thing file by file, which is how
:func:`preprocess_parallel` spreads the work over threads.
"""

from __future__ import annotations

import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from tree_sitter import Node

from ..framework import AliasNameArity, NameArity, NonUniqueKey, Preprocessor, PreprocessResult
from ..frontend import Forest, node_text
from ..model import ClassName, MethodKey
from .syntax import (
    CLASS_DECL_KINDS,
    METHOD_DECL_KINDS,
    TYPE_KIND,
    FileContext,
    body_members,
    class_body,
    collect,
    decl_name,
    declared_fields,
    is_anon_body,
    is_anonymous,
    package_of,
    parameter_nodes,
    parameter_type,
    supertype_aliases,
)

log = logging.getLogger(__name__)

_TYPE_BODIES = frozenset({"class_body", "interface_body", "enum_body", "annotation_type_body"})


class DuplicateKey(UserWarning):
    pass


@dataclass(frozen=True)
class MethodDecl:
    owner: ClassName
    name: str
    param_types: tuple[str, ...]
    varargs: bool
    body: Node = field(compare=False, repr=False)
    file: str = ""

    @property
    def arity(self) -> int:
        return len(self.param_types)

    def key(self, typed: bool) -> MethodKey:
        return MethodKey(
            self.owner.package, self.owner.class_path, self.name, self.arity,
            self.param_types if typed else None,
        )


@dataclass
class ClassRecord:
    qualified_name: ClassName
    kind: str  # class | interface | enum
    supertype_aliases: tuple[str, ...] = ()
    fields: dict[str, str] = field(default_factory=dict)
    method_sigs: frozenset[tuple[str, int]] = frozenset()
    subclasses: frozenset[ClassName] = frozenset()
    is_abstract: bool = False
    file: str = ""

    @property
    def alias(self) -> str:
        return self.qualified_name.alias


@dataclass
class ImportTable:
    own_package: str = ""
    explicit: dict[str, str] = field(default_factory=dict)  # alias -> dotted name
    wildcard_packages: tuple[str, ...] = ()


PackageImportables = dict[str, dict[str, ClassName]]


@dataclass
class JavaProducts(PreprocessResult):
    decls: list[MethodDecl] = field(default_factory=list)
    method_info: dict[MethodKey, MethodDecl] = field(default_factory=dict)
    class_cache: dict[ClassName, ClassRecord] = field(default_factory=dict)
    package_importables: PackageImportables = field(default_factory=dict)
    import_tables: dict[str, ImportTable] = field(default_factory=dict)
    class_nodes: dict[ClassName, tuple[str, Node]] = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)


# -- declarations ----------------------------------------------------------


def _contexts(forest: Forest) -> list[FileContext]:
    return [FileContext.of(f.path, root) for f, root in forest]


def method_decls(forest: Forest, contexts: Sequence[FileContext] | None = None) -> list[MethodDecl]:
    """Every method/constructor declaration with a body, in path then document order."""
    out: list[MethodDecl] = []
    for ctx in contexts or _contexts(forest):
        for node in collect(ctx.root, METHOD_DECL_KINDS):
            body = node.child_by_field_name("body")
            owner = ctx.class_name(node)
            if body is None or owner is None:
                continue
            params = parameter_nodes(node)
            name = "<init>" if node.type == "constructor_declaration" else decl_name(node)
            out.append(MethodDecl(
                owner, name, tuple(parameter_type(p) for p in params),
                bool(params) and params[-1].type == "spread_parameter", body, ctx.path,
            ))
    return out


def finalize_methods(decls: Iterable[MethodDecl], diagnostics: list[str] | None = None) -> dict[MethodKey, MethodDecl]:
    """Assign unique keys.

    Overloads that share owner, name and arity get their parameter types in
    the key.  Declarations that still collide (the same class declared twice
    in the default package, say) keep the later one.
    """
    decls = list(decls)
    groups: dict[tuple, set[tuple[str, ...]]] = defaultdict(set)
    for d in decls:
        groups[(d.owner, d.name, d.arity)].add(d.param_types)
    out: dict[MethodKey, MethodDecl] = {}
    for d in decls:
        typed = len(groups[(d.owner, d.name, d.arity)]) > 1
        key = d.key(typed)
        if key in out:
            msg = f"DuplicateKey {key}: {out[key].file} superseded by {d.file}"
            log.warning(msg)
            if diagnostics is not None:
                diagnostics.append(msg)
        out[key] = d
    if diagnostics is not None:
        for (owner, name, arity), sigs in sorted(groups.items(), key=lambda kv: str(kv[0][0])):
            if len(sigs) > 1:
                diagnostics.append(
                    f"DuplicateKey {owner}#{name}/{arity}: {len(sigs)} overloads share the arity; keyed by parameter types"
                )
    return out


def build_method_dict(forest: Forest) -> dict[MethodKey, Node]:
    return {k: d.body for k, d in finalize_methods(method_decls(forest)).items()}


def build_unique_dict(method_dict: Mapping[MethodKey, object]) -> dict[NonUniqueKey, frozenset[MethodKey]]:
    index: dict[NonUniqueKey, set[MethodKey]] = defaultdict(set)
    for key in method_dict:
        owner = key.owner
        # anonymous classes are containers only, never resolution targets
        if is_anonymous(owner):
            continue
        index[NameArity(key.name, key.arity)].add(key)
        index[AliasNameArity(owner.alias, key.name, key.arity)].add(key)
    return {k: frozenset(v) for k, v in index.items()}


# -- types -----------------------------------------------------------------


def _type_decls(ctx: FileContext) -> list[Node]:
    return collect(ctx.root, CLASS_DECL_KINDS)


def _is_member_type(node: Node) -> bool:
    """Top-level types and members of member types; local and anonymous ones are not exported."""
    parent = node.parent
    if parent is None or parent.type == "program":
        return True
    if parent.type == "enum_body_declarations":
        parent = parent.parent
    if parent is None or parent.type not in _TYPE_BODIES or is_anon_body(parent):
        return False
    owner = parent.parent
    return owner is not None and owner.type in CLASS_DECL_KINDS and _is_member_type(owner)


def build_package_importables(forest: Forest, contexts: Sequence[FileContext] | None = None) -> PackageImportables:
    out: PackageImportables = {}
    for ctx in contexts or _contexts(forest):
        exports = out.setdefault(ctx.package, {})
        for node in _type_decls(ctx):
            name = ctx.class_name(node)
            if name is None or is_anonymous(name) or not _is_member_type(node):
                continue
            exports[".".join(name.class_path)] = name
    return out


def _method_sigs(decl: Node) -> frozenset[tuple[str, int]]:
    body = class_body(decl)
    if body is None:
        return frozenset()
    sigs = set()
    for member in body_members(body):
        if member.type == "method_declaration":
            sigs.add((decl_name(member), len(parameter_nodes(member))))
        elif member.type == "constructor_declaration":
            sigs.add(("<init>", len(parameter_nodes(member))))
    return frozenset(sigs)


def _is_abstract(decl: Node) -> bool:
    if decl.type in ("interface_declaration", "annotation_type_declaration"):
        return True
    for child in decl.children:
        if child.type == "modifiers":
            return any(m.type == "abstract" for m in child.children)
    return False


def _class_records(ctx: FileContext) -> Iterable[tuple[ClassRecord, Node]]:
    for node in _type_decls(ctx):
        name = ctx.class_name(node)
        if name is None or is_anonymous(name):
            continue
        record = ClassRecord(
            name, TYPE_KIND[node.type], tuple(supertype_aliases(node)), declared_fields(node),
            _method_sigs(node), frozenset(), _is_abstract(node), ctx.path,
        )
        yield record, node


def link_subclasses(records: Mapping[ClassName, ClassRecord]) -> dict[ClassName, ClassRecord]:
    """Fill ``subclasses`` by inverting alias-matched supertype links."""
    by_alias: dict[str, list[ClassName]] = defaultdict(list)
    for name in records:
        by_alias[name.alias].append(name)
    subs: dict[ClassName, set[ClassName]] = defaultdict(set)
    for name, rec in records.items():
        for alias in rec.supertype_aliases:
            for parent in by_alias.get(alias, ()):
                if parent != name:
                    subs[parent].add(name)
    out = {}
    for name, rec in records.items():
        out[name] = ClassRecord(
            rec.qualified_name, rec.kind, rec.supertype_aliases, rec.fields, rec.method_sigs,
            frozenset(subs.get(name, ())), rec.is_abstract, rec.file,
        )
    return out


def build_class_cache(forest: Forest, contexts: Sequence[FileContext] | None = None) -> dict[ClassName, ClassRecord]:
    records: dict[ClassName, ClassRecord] = {}
    for ctx in contexts or _contexts(forest):
        for record, _ in _class_records(ctx):
            records[record.qualified_name] = record
    return link_subclasses(records)


def class_nodes(forest: Forest, contexts: Sequence[FileContext] | None = None) -> dict[ClassName, tuple[str, Node]]:
    """Every class-like scope (anonymous bodies included) by name."""
    out: dict[ClassName, tuple[str, Node]] = {}
    for ctx in contexts or _contexts(forest):
        for node in collect(ctx.root, CLASS_DECL_KINDS | {"class_body"}):
            if node.type == "class_body" and not is_anon_body(node):
                continue
            name = ctx.class_name(node)
            if name is not None:
                out[name] = (ctx.path, node)
    return out


def build_import_table(root: Node) -> ImportTable:
    table = ImportTable(package_of(root))
    wildcards: list[str] = []
    for child in root.named_children:
        if child.type != "import_declaration":
            continue
        if any(c.type == "static" for c in child.children):
            continue
        target = next((c for c in child.named_children if c.type in ("scoped_identifier", "identifier")), None)
        if target is None:
            continue
        dotted = "".join(node_text(target).split())
        if any(c.type == "asterisk" for c in child.children):
            if dotted not in wildcards:
                wildcards.append(dotted)
        else:
            table.explicit[dotted.rpartition(".")[2]] = dotted
    table.wildcard_packages = tuple(wildcards)
    return table


def subtypes(class_cache: Mapping[ClassName, ClassRecord], name: ClassName) -> list[ClassName]:
    """Transitive subclasses of ``name`` (excluding itself), sorted."""
    seen: set[ClassName] = set()
    stack = [name]
    while stack:
        rec = class_cache.get(stack.pop())
        if rec is None:
            continue
        for sub in rec.subclasses:
            if sub not in seen and sub != name:
                seen.add(sub)
                stack.append(sub)
    return sorted(seen, key=str)


# -- assembly --------------------------------------------------------------


class JavaPreprocessor(Preprocessor):
    def build_method_dict(self, forest: Forest) -> dict[MethodKey, Node]:
        return build_method_dict(forest)

    def build_unique_dict(self, method_dict):
        return build_unique_dict(method_dict)

    def run(self, forest: Forest) -> JavaProducts:
        contexts = _contexts(forest)
        diagnostics: list[str] = []
        decls = method_decls(forest, contexts)
        info = finalize_methods(decls, diagnostics)
        method_dict = {k: d.body for k, d in info.items()}
        return JavaProducts(
            method_dict,
            build_unique_dict(method_dict),
            decls=decls,
            method_info=info,
            class_cache=build_class_cache(forest, contexts),
            package_importables=build_package_importables(forest, contexts),
            import_tables={ctx.path: build_import_table(ctx.root) for ctx in contexts},
            class_nodes=class_nodes(forest, contexts),
            diagnostics=diagnostics,
        )


def preprocess_file(forest: Forest, index: int) -> JavaProducts:
    return JavaPreprocessor().run(forest.subset(index))


def merge_products(parts: Sequence[JavaProducts]) -> JavaProducts:
    """Merge per-file products given in path order.

    Method keys are re-finalized over the concatenated declarations, so
    overload collisions that span files are handled exactly as in a whole
    forest build; subclass links are recomputed over the union of records.
    """
    decls: list[MethodDecl] = []
    records: dict[ClassName, ClassRecord] = {}
    importables: PackageImportables = {}
    tables: dict[str, ImportTable] = {}
    nodes: dict[ClassName, tuple[str, Node]] = {}
    for part in parts:
        decls.extend(part.decls)
        records.update(part.class_cache)
        for pkg, exports in part.package_importables.items():
            importables.setdefault(pkg, {}).update(exports)
        tables.update(part.import_tables)
        nodes.update(part.class_nodes)
    diagnostics: list[str] = []
    info = finalize_methods(decls, diagnostics)
    method_dict = {k: d.body for k, d in info.items()}
    return JavaProducts(
        method_dict,
        build_unique_dict(method_dict),
        decls=decls,
        method_info=info,
        class_cache=link_subclasses(records),
        package_importables=importables,
        import_tables=tables,
        class_nodes=nodes,
        diagnostics=diagnostics,
    )


def preprocess_parallel(forest: Forest, threads: int = 1) -> JavaProducts:
    indices = range(len(forest))
    if threads > 1 and len(forest) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(lambda i: preprocess_file(forest, i), indices))
    else:
        parts = [preprocess_file(forest, i) for i in indices]
    return merge_products(parts)
