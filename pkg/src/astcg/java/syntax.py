"""Java syntax helpers shared by the preprocessor and the resolvers."""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from tree_sitter import Node

from .. import _kernels
from ..frontend import load_grammar, node_text
from ..model import (
    NO_RECEIVER,
    CallSite,
    ClassLevelKey,
    ClassName,
    ContainerKey,
    Receiver,
    ReceiverKind,
    Region,
    SiteId,
    SiteKind,
)

CLASS_DECL_KINDS = frozenset(
    {"class_declaration", "interface_declaration", "enum_declaration", "record_declaration",
     "annotation_type_declaration"}
)
METHOD_DECL_KINDS = frozenset({"method_declaration", "constructor_declaration"})
SITE_KINDS = frozenset({"method_invocation", "object_creation_expression"})
ANON_PARENTS = frozenset({"object_creation_expression", "enum_constant"})
TYPE_KIND = {
    "class_declaration": "class",
    "record_declaration": "class",
    "interface_declaration": "interface",
    "annotation_type_declaration": "interface",
    "enum_declaration": "enum",
}

_SEEK_KINDS = SITE_KINDS | CLASS_DECL_KINDS | {"class_body"}
_LANGUAGE = None


def _language():
    global _LANGUAGE
    if _LANGUAGE is None:
        _LANGUAGE = load_grammar("java").language
    return _LANGUAGE


def collect(node: Node, kinds: frozenset) -> list[Node]:
    return _kernels.collect(node, kinds, _language())


def is_anon_body(node: Node) -> bool:
    if node.type != "class_body":
        return False
    parent = node.parent
    return parent is not None and parent.type in ANON_PARENTS


def anon_alias(n: int) -> str:
    return f"anon${n}"


def is_anonymous(name: ClassName) -> bool:
    return any(seg.startswith("anon$") for seg in name.class_path)


@dataclass
class FileContext:
    """Per-file facts needed to name declarations."""

    path: str
    root: Node
    package: str = ""
    anon_index: dict[int, int] = field(default_factory=dict)  # class_body start byte -> N

    @classmethod
    def of(cls, path: str, root: Node) -> "FileContext":
        ctx = cls(path, root, package_of(root))
        bodies = [b for b in collect(root, frozenset({"class_body"})) if is_anon_body(b)]
        ctx.anon_index = {b.start_byte: i for i, b in enumerate(bodies, start=1)}
        return ctx

    def class_path(self, node: Node) -> tuple[str, ...]:
        """Names of the class-like scopes enclosing ``node`` (itself included), outermost first."""
        names: list[str] = []
        n: Node | None = node
        while n is not None:
            if n.type in CLASS_DECL_KINDS:
                names.append(decl_name(n))
            elif n.type == "class_body" and is_anon_body(n):
                names.append(anon_alias(self.anon_index[n.start_byte]))
            n = n.parent
        names.reverse()
        return tuple(names)

    def class_name(self, node: Node) -> ClassName | None:
        path = self.class_path(node)
        return ClassName(self.package, path) if path else None


def package_of(root: Node) -> str:
    for child in root.named_children:
        if child.type == "package_declaration":
            for part in child.named_children:
                if part.type in ("scoped_identifier", "identifier"):
                    return re.sub(r"\s+", "", node_text(part))
    return ""


def decl_name(node: Node) -> str:
    name = node.child_by_field_name("name")
    return node_text(name) if name is not None else "_unnamed"


_GENERIC_ARGS = re.compile(r"<[^<>]*>")
_ANNOTATION = re.compile(r"@[\w.]+(\([^()]*\))?")


def type_alias(node: Node | None) -> str:
    """Shorthand type name as written, without type arguments or annotations."""
    if node is None:
        return ""
    t = node.type
    if t == "generic_type":
        return type_alias(node.named_children[0])
    if t == "scoped_type_identifier":
        # Outer.Inner resolves by its rightmost name
        return type_alias(node.named_children[-1])
    if t == "annotated_type":
        return type_alias(node.named_children[-1])
    text = _ANNOTATION.sub("", node_text(node))
    while True:
        stripped = _GENERIC_ARGS.sub("", text)
        if stripped == text:
            break
        text = stripped
    text = re.sub(r"\s+", "", text)
    if "." in text and not text.endswith("..."):
        head, _, last = text.rpartition(".")
        text = last
    return text


def parameter_nodes(decl: Node) -> list[Node]:
    params = decl.child_by_field_name("parameters")
    if params is None:
        return []
    return [p for p in params.named_children if p.type in ("formal_parameter", "spread_parameter")]


def parameter_type(param: Node) -> str:
    if param.type == "spread_parameter":
        for child in param.named_children:
            if child.type not in ("modifiers", "variable_declarator", "annotation", "marker_annotation"):
                return type_alias(child) + "..."
        return "..."
    return type_alias(param.child_by_field_name("type"))


def parameter_name(param: Node) -> str:
    if param.type == "spread_parameter":
        for child in param.named_children:
            if child.type == "variable_declarator":
                return decl_name(child)
        return ""
    return decl_name(param)


def class_body(decl: Node) -> Node | None:
    if decl.type == "class_body":
        return decl
    return decl.child_by_field_name("body")


def body_members(body: Node) -> list[Node]:
    members = []
    for child in body.named_children:
        if child.type == "enum_body_declarations":
            members.extend(child.named_children)
        else:
            members.append(child)
    return members


def supertype_aliases(decl: Node) -> list[str]:
    out: list[str] = []
    for fname in ("superclass", "interfaces"):
        clause = decl.child_by_field_name(fname)
        if clause is not None:
            out.extend(_types_in(clause))
    # interfaces list their parents in an extends_interfaces clause
    for child in decl.named_children:
        if child.type == "extends_interfaces":
            out.extend(_types_in(child))
    seen: set[str] = set()
    return [a for a in out if not (a in seen or seen.add(a))]


def _types_in(clause: Node) -> list[str]:
    out = []
    for child in clause.named_children:
        if child.type == "type_list":
            out.extend(type_alias(t) for t in child.named_children)
        else:
            out.append(type_alias(child))
    return out


def declared_fields(decl: Node) -> dict[str, str]:
    """Field name -> declared type alias for one class-like node (anonymous bodies too)."""
    fields: dict[str, str] = {}
    if decl.type == "record_declaration":
        for p in parameter_nodes(decl):
            fields[decl_name(p)] = type_alias(p.child_by_field_name("type"))
    body = class_body(decl)
    if body is None:
        return fields
    enum_alias = decl_name(decl) if decl.type == "enum_declaration" else None
    for member in body_members(body):
        if member.type in ("field_declaration", "constant_declaration"):
            alias = type_alias(member.child_by_field_name("type"))
            for declarator in member.children_by_field_name("declarator"):
                fields[decl_name(declarator)] = alias
        elif member.type == "enum_constant" and enum_alias:
            fields[decl_name(member)] = enum_alias
    return fields


def argument_count(node: Node) -> int:
    args = node.child_by_field_name("arguments")
    if args is None:
        return 0
    return sum(1 for c in args.named_children if not c.is_extra)


def classify_receiver(invocation: Node) -> Receiver:
    obj = invocation.child_by_field_name("object")
    if obj is None:
        return Receiver(ReceiverKind.IMPLICIT)
    kind = obj.type
    if kind == "this":
        return Receiver(ReceiverKind.EXPLICIT_THIS)
    if kind == "identifier":
        return Receiver(ReceiverKind.IDENTIFIER, node_text(obj))
    if kind == "field_access":
        return Receiver(ReceiverKind.FIELD_ACCESS)
    if kind == "method_invocation":
        return Receiver(ReceiverKind.METHOD_INVOCATION)
    return Receiver(ReceiverKind.OTHER, kind)


def created_type_alias(creation: Node) -> str:
    return type_alias(creation.child_by_field_name("type"))


def make_site(path: str, node: Node, container: ContainerKey) -> CallSite:
    row, col = node.start_point
    if node.type == "object_creation_expression":
        return CallSite(
            SiteId(path, node.start_byte, node.end_byte), SiteKind.OBJECT_CREATION, created_type_alias(node),
            argument_count(node), NO_RECEIVER, container, row + 1, col + 1, node,
        )
    return CallSite(
        SiteId(path, node.start_byte, node.end_byte), SiteKind.METHOD_INVOCATION,
        node_text(node.child_by_field_name("name")), argument_count(node),
        classify_receiver(node), container, row + 1, col + 1, node,
    )


def site_nodes(region: Node) -> list[Node]:
    """Invocation/creation nodes in ``region``, not descending into nested class bodies."""
    found = collect(region, _SEEK_KINDS)
    out: list[Node] = []
    fence_end = -1
    for n in found:
        if n.start_byte < fence_end:
            continue
        if n.type in SITE_KINDS:
            out.append(n)
        elif n != region and (n.type in CLASS_DECL_KINDS or is_anon_body(n)):
            fence_end = n.end_byte
    return out


def seek_call_sites_java(path: str, body: Node | None, container: ContainerKey) -> list[CallSite]:
    if body is None:
        return []
    return [make_site(path, n, container) for n in site_nodes(body)]


_REGION_OF = {
    "field_declaration": Region.FIELDS,
    "constant_declaration": Region.FIELDS,
    "enum_constant": Region.FIELDS,
    "static_initializer": Region.STATIC_INIT,
    "block": Region.INSTANCE_INIT,
}


def seek_class_level_sites(path: str, class_node: Node, owner: ClassName) -> list[CallSite]:
    """Call sites in field initializers and initializer blocks of one class.

    Method and constructor bodies and nested types are excluded; they are
    containers of their own.
    """
    body = class_body(class_node)
    if body is None:
        return []
    out: list[CallSite] = []
    for member in body_members(body):
        region = _REGION_OF.get(member.type)
        if region is None:
            continue
        container = ClassLevelKey(owner, region)
        out.extend(make_site(path, n, container) for n in site_nodes(member))
    return out
