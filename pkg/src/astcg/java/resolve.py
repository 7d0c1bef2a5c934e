"""Call-site resolution for Java: name-based (NR) and simple class hierarchy (SCHA)."""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import asdict, dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from tree_sitter import Node

from ..framework import UNIT, Generator, NameArity, NonUniqueKey, Resolution, class_level_containers
from ..model import (
    CallSite,
    ClassName,
    ContainerKey,
    MethodKey,
    ReceiverKind,
    SiteKind,
    TargetKey,
)
from .preprocess import ClassRecord, ImportTable, JavaProducts, PackageImportables, subtypes
from .syntax import (
    CLASS_DECL_KINDS,
    created_type_alias,
    decl_name,
    declared_fields,
    is_anon_body,
    is_anonymous,
    parameter_name,
    parameter_type,
    seek_call_sites_java,
    seek_class_level_sites,
    supertype_aliases,
    type_alias,
)

NR_NO_MATCH = "nr-no-name-match"
IMPLICIT_CTOR = "implicit-default-constructor"
SCHA_COMPLEX = "scha-complex-receiver"
SCHA_UNKNOWN = "scha-unknown-alias"
SCHA_NO_METHOD = "scha-no-method-match"


@dataclass(frozen=True)
class ResolutionConfig:
    nr_use_arity: bool = True
    scha_expand_subtypes: bool = True
    scha_qualify_with_imports: bool = False

    def as_dict(self) -> dict[str, bool]:
        return asdict(self)


class DeclKind(str, enum.Enum):
    LOCAL = "LocalVar"
    PARAM = "Param"
    FIELD = "Field"
    NOT_FOUND = "NotFound"


@dataclass(frozen=True)
class DeclarationSite:
    kind: DeclKind
    type_alias: str = ""
    owner: ClassName | None = None  # owning class, fields only

    @property
    def found(self) -> bool:
        return self.kind is not DeclKind.NOT_FOUND


NOT_FOUND = DeclarationSite(DeclKind.NOT_FOUND)


class MethodIndex:
    """Lookup tables derived once from the preprocess products."""

    def __init__(self, products: JavaProducts) -> None:
        self.products = products
        self.unique_dict: Mapping[NonUniqueKey, frozenset[MethodKey]] = products.unique_dict
        self.class_cache: Mapping[ClassName, ClassRecord] = products.class_cache
        self.by_alias: dict[str, list[ClassName]] = defaultdict(list)
        for name in sorted(self.class_cache, key=str):
            self.by_alias[name.alias].append(name)
        self.varargs = frozenset(k for k, d in products.method_info.items() if d.varargs)
        self.by_name: dict[str, list[MethodKey]] = defaultdict(list)
        self.declared: dict[ClassName, dict[str, list[MethodKey]]] = defaultdict(lambda: defaultdict(list))
        self._varargs_by_name: dict[str, list[MethodKey]] = defaultdict(list)
        for key in sorted(products.method_dict, key=str):
            if is_anonymous(key.owner):
                continue
            self.by_name[key.name].append(key)
            self.declared[key.owner][key.name].append(key)
            if key in self.varargs:
                self._varargs_by_name[key.name].append(key)

    def arity_matches(self, key: MethodKey, n: int) -> bool:
        if key.arity == n:
            return True
        return key in self.varargs and n >= key.arity - 1

    def name_arity(self, name: str, n: int) -> list[MethodKey]:
        keys = set(self.unique_dict.get(NameArity(name, n), ()))
        keys.update(k for k in self._varargs_by_name.get(name, ()) if self.arity_matches(k, n))
        return sorted(keys, key=str)

    def constructors(self, alias: str, n: int | None) -> list[MethodKey]:
        keys: set[MethodKey] = set()
        for owner in self.by_alias.get(alias, ()):
            for k in self.declared.get(owner, {}).get("<init>", ()):
                if n is None or self.arity_matches(k, n):
                    keys.add(k)
        return sorted(keys, key=str)

    def declares(self, owner: ClassName, name: str, n: int) -> list[MethodKey]:
        return [k for k in self.declared.get(owner, {}).get(name, ()) if self.arity_matches(k, n)]

    def supertypes_of(self, owner: ClassName) -> list[ClassName]:
        rec = self.class_cache.get(owner)
        aliases = rec.supertype_aliases if rec else self._anon_supertypes(owner)
        out = []
        for alias in aliases:
            out.extend(c for c in self.by_alias.get(alias, ()) if c != owner)
        return out

    def _anon_supertypes(self, owner: ClassName) -> tuple[str, ...]:
        entry = self.products.class_nodes.get(owner)
        if entry is None:
            return ()
        node = entry[1]
        if is_anon_body(node):
            parent = node.parent
            if parent.type == "object_creation_expression":
                return (created_type_alias(parent),)
            while parent is not None and parent.type != "enum_declaration":
                parent = parent.parent
            return (decl_name(parent),) if parent is not None else ()
        return tuple(supertype_aliases(node))

    def ancestors(self, owner: ClassName) -> list[ClassName]:
        """Alias-matched supertypes, transitively, breadth first."""
        seen = {owner}
        order: list[ClassName] = []
        frontier = [owner]
        while frontier:
            nxt = []
            for c in frontier:
                for s in self.supertypes_of(c):
                    if s not in seen:
                        seen.add(s)
                        order.append(s)
                        nxt.append(s)
            frontier = nxt
        return order

    def lookup(self, candidate: ClassName, name: str, n: int) -> list[TargetKey]:
        """Targets for dispatching ``name``/``n`` on ``candidate``: its own body or the nearest inherited one."""
        own = self.declares(candidate, name, n)
        if own:
            return [TargetKey(candidate, k) for k in own]
        seen = {candidate}
        frontier = [candidate]
        while frontier:
            level: list[ClassName] = []
            for c in frontier:
                for s in self.supertypes_of(c):
                    if s not in seen:
                        seen.add(s)
                        level.append(s)
            found = [k for s in level for k in self.declares(s, name, n)]
            if found:
                # anonymous classes are never dispatch targets in their own right
                dispatch = candidate if not is_anonymous(candidate) else None
                return [TargetKey(dispatch or k.owner, k) for k in found]
            frontier = level
        return []


def _unique_targets(targets: Iterable[TargetKey]) -> list[tuple[Hashable, TargetKey]]:
    return [(UNIT, t) for t in sorted(set(targets), key=str)]


def _no_ctor_reason(index: MethodIndex, alias: str) -> str | None:
    owners = index.by_alias.get(alias, ())
    if owners and not any(any(n == "<init>" for n, _ in index.class_cache[o].method_sigs) for o in owners):
        return IMPLICIT_CTOR
    return None


def resolve_nr(site: CallSite, index: MethodIndex, config: ResolutionConfig = ResolutionConfig()) -> Resolution:
    """Match by callee name (and arity unless disabled); the receiver is ignored."""
    arity = site.arg_count if config.nr_use_arity else None
    if site.kind is SiteKind.OBJECT_CREATION:
        keys = index.constructors(site.callee_name, arity)
        if not keys:
            return Resolution(reason=_no_ctor_reason(index, site.callee_name) or NR_NO_MATCH)
    elif arity is None:
        keys = index.by_name.get(site.callee_name, [])
    else:
        keys = index.name_arity(site.callee_name, arity)
    if not keys:
        return Resolution(reason=NR_NO_MATCH)
    return Resolution(_unique_targets(TargetKey(k.owner, k) for k in keys))


# -- declarations ----------------------------------------------------------


def _declarators(decl: Node) -> Iterable[tuple[str, str]]:
    alias = type_alias(decl.child_by_field_name("type"))
    for d in decl.children_by_field_name("declarator"):
        t = alias
        if t == "var":
            value = d.child_by_field_name("value")
            t = created_type_alias(value) if value is not None and value.type == "object_creation_expression" else ""
        yield decl_name(d), t


def _declared_before(child: Node, name: str) -> DeclarationSite | None:
    """Look through the siblings preceding ``child`` for a declaration of ``name``."""
    parent = child.parent
    sib = child.prev_sibling
    while sib is not None:
        t = sib.type
        if t == "local_variable_declaration":
            for n, alias in _declarators(sib):
                if n == name:
                    return DeclarationSite(DeclKind.LOCAL, alias)
        elif t == "formal_parameters":
            kind = DeclKind.PARAM
            for p in sib.named_children:
                if p.type in ("formal_parameter", "spread_parameter") and parameter_name(p) == name:
                    return DeclarationSite(kind, parameter_type(p).removesuffix("..."))
                if p.type == "identifier" and p.text.decode() == name:
                    return DeclarationSite(DeclKind.LOCAL, "")
        elif t in ("inferred_parameters",):
            if any(p.text.decode() == name for p in sib.named_children):
                return DeclarationSite(DeclKind.LOCAL, "")
        elif t == "identifier" and parent.type == "lambda_expression" and sib.text.decode() == name:
            return DeclarationSite(DeclKind.LOCAL, "")
        elif t == "catch_formal_parameter":
            if decl_name(sib) == name:
                ctype = next((c for c in sib.named_children if c.type == "catch_type"), None)
                first = ctype.named_children[0] if ctype is not None and ctype.named_children else None
                return DeclarationSite(DeclKind.LOCAL, type_alias(first))
        elif t == "resource_specification":
            for r in reversed(sib.named_children):
                if r.type == "resource" and decl_name(r) == name:
                    return DeclarationSite(DeclKind.LOCAL, type_alias(r.child_by_field_name("type")))
        sib = sib.prev_sibling
    if parent is not None and parent.type == "enhanced_for_statement" and decl_name(parent) == name:
        if child == parent.child_by_field_name("body"):
            return DeclarationSite(DeclKind.LOCAL, type_alias(parent.child_by_field_name("type")))
    return None


def _field_in_hierarchy(index: MethodIndex, owner: ClassName, name: str) -> DeclarationSite | None:
    for cls in index.ancestors(owner):
        rec = index.class_cache.get(cls)
        if rec is not None and name in rec.fields:
            return DeclarationSite(DeclKind.FIELD, rec.fields[name], cls)
    return None


def find_declaration(name: str, site_node: Node, owner: ClassName | None, index: MethodIndex) -> DeclarationSite:
    """Walk outward from the site to the nearest declaration of ``name``.

    Locals and parameters come first, then fields of each enclosing class
    (inherited ones included), innermost class first.  ``owner`` is the
    class of the site's container.
    """
    child = site_node
    node = site_node.parent
    while node is not None:
        found = _declared_before(child, name)
        if found is not None:
            return found
        if node.type in CLASS_DECL_KINDS or is_anon_body(node):
            fields = declared_fields(node)
            if name in fields:
                return DeclarationSite(DeclKind.FIELD, fields[name], owner)
            if owner is not None:
                inherited = _field_in_hierarchy(index, owner, name)
                if inherited is not None:
                    return inherited
                owner = owner.outer
        child, node = node, node.parent
    return NOT_FOUND


def resolve_alias(alias: str, table: ImportTable, importables: PackageImportables) -> list[ClassName]:
    """Application classes an alias may denote in one file, most specific first.

    An explicit single-type import shadows everything else; a same-package
    type shadows on-demand imports.  An empty result means the alias is
    library-defined.
    """
    if alias in table.explicit:
        parts = table.explicit[alias].split(".")
        for i in range(len(parts) - 1, -1, -1):
            found = importables.get(".".join(parts[:i]), {}).get(".".join(parts[i:]))
            if found is not None:
                return [found]
        return []
    own = importables.get(table.own_package, {})
    if alias in own:
        return [own[alias]]
    out = [c for exported, c in sorted(own.items()) if exported.endswith("." + alias)]
    for pkg in table.wildcard_packages:
        found = importables.get(pkg, {}).get(alias)
        if found is not None and found not in out:
            out.append(found)
    return out


# -- SCHA ------------------------------------------------------------------


def _owner_of(container: ContainerKey) -> ClassName:
    return container.owner


def _candidates_for_alias(site: CallSite, alias: str, index: MethodIndex, config: ResolutionConfig) -> list[ClassName]:
    if config.scha_qualify_with_imports:
        table = index.products.import_tables.get(site.site_id.file, ImportTable())
        return [c for c in resolve_alias(alias, table, index.products.package_importables) if c in index.class_cache]
    return list(index.by_alias.get(alias, ()))


def _dispatch(candidates: Sequence[ClassName], site: CallSite, index: MethodIndex, expand: bool) -> list[TargetKey]:
    pool: list[ClassName] = list(candidates)
    if expand:
        for c in candidates:
            pool.extend(subtypes(index.class_cache, c))
    out: list[TargetKey] = []
    for c in dict.fromkeys(pool):
        out.extend(index.lookup(c, site.callee_name, site.arg_count))
    return out


def resolve_scha(site: CallSite, index: MethodIndex, config: ResolutionConfig = ResolutionConfig()) -> Resolution:
    """Resolve identifier and implicit/``this`` receivers through the alias-keyed hierarchy."""
    if site.kind is SiteKind.OBJECT_CREATION:
        owners = _candidates_for_alias(site, site.callee_name, index, config)
        keys = [k for o in owners for k in index.declares(o, "<init>", site.arg_count)]
        if keys:
            return Resolution(_unique_targets(TargetKey(k.owner, k) for k in keys))
        if not owners:
            return Resolution(reason=SCHA_UNKNOWN)
        return Resolution(reason=_no_ctor_reason(index, site.callee_name) or SCHA_NO_METHOD)

    kind = site.receiver.kind
    owner = _owner_of(site.container)
    if kind is ReceiverKind.IDENTIFIER:
        name = site.receiver.detail
        decl = find_declaration(name, site.node, owner, index)
        if decl.found:
            if not decl.type_alias:
                return Resolution(reason=SCHA_UNKNOWN)
            candidates = _candidates_for_alias(site, decl.type_alias, index, config)
            expand = config.scha_expand_subtypes
        else:
            # no variable by that name: treat it as a class reference (static call)
            candidates = _candidates_for_alias(site, name, index, config)
            expand = False
        if not candidates:
            return Resolution(reason=SCHA_UNKNOWN)
        targets = _dispatch(candidates, site, index, expand)
    elif kind in (ReceiverKind.IMPLICIT, ReceiverKind.EXPLICIT_THIS):
        targets = []
        scope: ClassName | None = owner
        while scope is not None and not targets:
            candidates = [scope, *index.ancestors(scope)]
            if is_anonymous(scope):
                candidates = candidates[1:]
            targets = _dispatch(candidates, site, index, False)
            if config.scha_expand_subtypes and not is_anonymous(scope):
                targets += _dispatch(subtypes(index.class_cache, scope), site, index, False)
            if kind is ReceiverKind.EXPLICIT_THIS:
                break
            # an unqualified call may target a lexically enclosing class
            scope = scope.outer
    else:
        return Resolution(reason=SCHA_COMPLEX)
    if not targets:
        return Resolution(reason=SCHA_NO_METHOD)
    return Resolution(_unique_targets(targets))


# -- generators ------------------------------------------------------------


class JavaGenerator(Generator):
    def __init__(self, products: JavaProducts, config: ResolutionConfig = ResolutionConfig()) -> None:
        self.products = products
        self.config = config
        self.index = MethodIndex(products)
        self._class_level: dict[ClassName, list[CallSite]] = {}

    def seek_call_sites(self, container: ContainerKey) -> list[CallSite]:
        if isinstance(container, MethodKey):
            decl = self.products.method_info.get(container)
            if decl is None:
                return []
            return seek_call_sites_java(decl.file, decl.body, container)
        owner = container.owner
        if owner not in self._class_level:
            entry = self.products.class_nodes.get(owner)
            self._class_level[owner] = seek_class_level_sites(entry[0], entry[1], owner) if entry else []
        return [s for s in self._class_level[owner] if s.container == container]

    def containers_of(self, method: MethodKey) -> list[ContainerKey]:
        # using any member of a class runs its initializers
        return [method, *class_level_containers(method.owner)]


class NRGenerator(JavaGenerator):
    algorithm = "nr"

    def __init__(self, products: JavaProducts, config: ResolutionConfig = ResolutionConfig()) -> None:
        super().__init__(products, config)
        # NR looks only at (kind, name, argument count), so equal shapes share one answer
        self._memo: dict[tuple, Resolution] = {}

    def resolve(self, context: Hashable, site: CallSite) -> Resolution:
        shape = (site.kind, site.callee_name, site.arg_count)
        if shape not in self._memo:
            self._memo[shape] = resolve_nr(site, self.index, self.config)
        return self._memo[shape]


class SCHAGenerator(JavaGenerator):
    algorithm = "scha"

    def resolve(self, context: Hashable, site: CallSite) -> Resolution:
        return resolve_scha(site, self.index, self.config)


GENERATORS = {"nr": NRGenerator, "scha": SCHAGenerator}
