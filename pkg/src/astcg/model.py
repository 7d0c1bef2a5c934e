"""Shared vocabulary: method identity, call sites, containers, and the call graph.

Canonical id grammar::

    class id   := [package "."] class_path joined by "$"
    method id  := class id "#" name "/" arity ["(" type "," ... ")"]
    class-level:= class id "#<" region ">"          region: fields | static_init | instance_init
    target id  := dispatch class id "#" name "/" arity [types] ["@" defining class id]

Nested classes join with ``$`` (as in JVM binary names) so the package/class
boundary is always the last ``.`` before the first ``$`` or ``#``.  Parameter
types only appear when two overloads of one class share name and arity.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Union


@dataclass(frozen=True, order=True)
class ClassName:
    package: str
    class_path: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.class_path:
            raise ValueError("class_path must be non-empty")

    @property
    def alias(self) -> str:
        return self.class_path[-1]

    @property
    def dotted(self) -> str:
        return ".".join([self.package, *self.class_path] if self.package else self.class_path)

    @property
    def outer(self) -> "ClassName | None":
        if len(self.class_path) == 1:
            return None
        return ClassName(self.package, self.class_path[:-1])

    def nested(self, name: str) -> "ClassName":
        return ClassName(self.package, self.class_path + (name,))

    @cached_property
    def _id(self) -> str:
        path = "$".join(self.class_path)
        return f"{self.package}.{path}" if self.package else path

    def __str__(self) -> str:
        return self._id

    def __hash__(self) -> int:
        return hash((self.package, self.class_path))


@dataclass(frozen=True)
class MethodKey:
    package: str
    class_path: tuple[str, ...]
    name: str
    arity: int
    param_type_aliases: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if not self.class_path:
            raise ValueError("class_path must be non-empty")
        if self.arity < 0:
            raise ValueError("arity must be >= 0")
        if self.param_type_aliases is not None and len(self.param_type_aliases) != self.arity:
            raise ValueError("arity must equal the number of parameter types")

    # keys are hashed and printed millions of times on large graphs
    @cached_property
    def owner(self) -> ClassName:
        return ClassName(self.package, self.class_path)

    @cached_property
    def _hash(self) -> int:
        return hash((self.package, self.class_path, self.name, self.arity, self.param_type_aliases))

    def __hash__(self) -> int:
        return self._hash

    @property
    def signature(self) -> str:
        sig = f"{self.name}/{self.arity}"
        if self.param_type_aliases is not None:
            sig += "(" + ",".join(self.param_type_aliases) + ")"
        return sig

    @property
    def is_constructor(self) -> bool:
        return self.name == "<init>"

    @cached_property
    def _id(self) -> str:
        return f"{self.owner}#{self.signature}"

    def __str__(self) -> str:
        return self._id


class Region(str, enum.Enum):
    FIELDS = "fields"
    STATIC_INIT = "static_init"
    INSTANCE_INIT = "instance_init"


@dataclass(frozen=True)
class ClassLevelKey:
    owner: ClassName
    region: Region

    def __str__(self) -> str:
        return f"{self.owner}#<{self.region.value}>"


ContainerKey = Union[MethodKey, ClassLevelKey]


@dataclass(frozen=True)
class TargetKey:
    dispatch_class: ClassName
    defined_in: MethodKey

    @property
    def inherited(self) -> bool:
        return self.dispatch_class != self.defined_in.owner

    @cached_property
    def _id(self) -> str:
        if not self.inherited:
            return str(self.defined_in)
        return f"{self.dispatch_class}#{self.defined_in.signature}@{self.defined_in.owner}"

    def __str__(self) -> str:
        return self._id


Key = Union[MethodKey, ClassLevelKey, TargetKey, ClassName]


def canonical_id(key: Key) -> str:
    return str(key)


_ID = re.compile(
    r"^(?P<cls>[^#@]+)#(?:<(?P<region>[a-z_]+)>|(?P<name>[^/#@]+)/(?P<arity>\d+)"
    r"(?:\((?P<types>[^)]*)\))?)(?:@(?P<defined>[^#@]+))?$"
)


def parse_class_id(text: str) -> ClassName:
    head, _, tail = text.partition("$")
    package, _, first = head.rpartition(".")
    segments = [first, *tail.split("$")] if tail else [first]
    path: list[str] = []
    for seg in segments:
        # digits never start an identifier; they continue an anon$N segment
        if seg.isdigit() and path:
            path[-1] = f"{path[-1]}${seg}"
        else:
            path.append(seg)
    return ClassName(package, tuple(path))


def parse_id(text: str) -> Key:
    """Inverse of :func:`canonical_id` for method, class-level and target ids."""
    m = _ID.match(text)
    if m is None:
        raise ValueError(f"malformed id {text!r}")
    cls = parse_class_id(m["cls"])
    if m["region"]:
        if m["defined"]:
            raise ValueError(f"malformed id {text!r}")
        return ClassLevelKey(cls, Region(m["region"]))
    types = None
    if m["types"] is not None:
        types = tuple(m["types"].split(",")) if m["types"] else ()
    owner = parse_class_id(m["defined"]) if m["defined"] else cls
    key = MethodKey(owner.package, owner.class_path, m["name"], int(m["arity"]), types)
    if m["defined"]:
        return TargetKey(cls, key)
    return key


class ReceiverKind(str, enum.Enum):
    IMPLICIT = "Implicit"
    EXPLICIT_THIS = "ExplicitThis"
    IDENTIFIER = "Identifier"
    FIELD_ACCESS = "FieldAccess"
    METHOD_INVOCATION = "MethodInvocation"
    OTHER = "Other"


@dataclass(frozen=True)
class Receiver:
    kind: ReceiverKind
    detail: str | None = None  # identifier name, or the node kind for Other

    def __post_init__(self) -> None:
        if self.kind is ReceiverKind.IDENTIFIER and not self.detail:
            raise ValueError("Identifier receiver needs a name")

    def __str__(self) -> str:
        return f"{self.kind.value}({self.detail})" if self.detail else self.kind.value


NO_RECEIVER = Receiver(ReceiverKind.OTHER, "none")


class SiteKind(str, enum.Enum):
    METHOD_INVOCATION = "method_invocation"
    OBJECT_CREATION = "object_creation"


@dataclass(frozen=True, order=True)
class SiteId:
    """Byte span of a call site.  ``a().b()`` and its inner ``a()`` share a start, so the end is part of the id."""

    file: str
    offset: int
    end: int = -1


@dataclass(frozen=True)
class CallSite:
    site_id: SiteId
    kind: SiteKind
    callee_name: str
    arg_count: int
    receiver: Receiver
    container: ContainerKey
    row: int = 0  # 1-based
    col: int = 0
    node: object = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self) -> None:
        if self.kind is SiteKind.OBJECT_CREATION and self.receiver != NO_RECEIVER:
            raise ValueError("object creation sites carry no receiver")


@dataclass(frozen=True)
class Edge:
    source: ContainerKey
    target: TargetKey
    site: SiteId

    @property
    def sort_key(self) -> tuple:
        return str(self.source), str(self.target), self.site


@dataclass
class CallGraph:
    vertices: set = field(default_factory=set)
    edges: set = field(default_factory=set)
    unresolved: list = field(default_factory=list)  # (CallSite, reason)
    positions: dict = field(default_factory=dict)  # SiteId -> 1-based (row, col)

    def add_edge(self, source: ContainerKey, target: TargetKey, site: SiteId, position: tuple[int, int] | None = None) -> None:
        if position is not None:
            self.positions[site] = position
        self.vertices.add(source)
        self.vertices.add(target)
        self.edges.add(Edge(source, target, site))

    def add_unresolved(self, site: CallSite, reason: str) -> None:
        self.unresolved.append((site, reason))

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges, key=lambda e: e.sort_key)

    def edge_ids(self) -> set[tuple[str, str]]:
        """Edges projected to ``(source id, defining method id)``."""
        return {(str(e.source), str(e.target.defined_in)) for e in self.edges}

    def __len__(self) -> int:
        return len(self.edges)


def merge_graphs(*graphs: CallGraph) -> CallGraph:
    out = CallGraph()
    seen: set[tuple[SiteId, str]] = set()
    for g in graphs:
        out.vertices |= g.vertices
        out.edges |= g.edges
        out.positions.update(g.positions)
        for site, reason in g.unresolved:
            if (site.site_id, reason) not in seen:
                seen.add((site.site_id, reason))
                out.unresolved.append((site, reason))
    return out


def sort_keys(keys: Iterable[Key]) -> list:
    return sorted(keys, key=str)
