"""Language-agnostic engine: preprocessor/generator contracts and the worklist driver."""

from __future__ import annotations

import abc
import re
import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Mapping, Sequence, Union

from .frontend import Forest
from .model import CallGraph, CallSite, ClassLevelKey, ClassName, ContainerKey, MethodKey, Region, TargetKey


@dataclass(frozen=True, order=True)
class NameArity:
    name: str
    arity: int


@dataclass(frozen=True, order=True)
class AliasNameArity:
    alias: str
    name: str
    arity: int


NonUniqueKey = Union[NameArity, AliasNameArity]

# context-insensitive resolvers use a single unit context
UNIT: Hashable = ()


@dataclass
class PreprocessResult:
    method_dict: dict[MethodKey, Any]
    unique_dict: dict[NonUniqueKey, frozenset[MethodKey]]
    extras: dict[str, Any] = field(default_factory=dict)

    def check(self) -> None:
        """Assert the contract: every indexed key is a method_dict key, no empty sets."""
        for k, keys in self.unique_dict.items():
            if not keys:
                raise ValueError(f"empty unique_dict entry {k}")
            missing = [m for m in keys if m not in self.method_dict]
            if missing:
                raise ValueError(f"unique_dict entry {k} names unknown methods {missing}")


class Preprocessor(abc.ABC):
    @abc.abstractmethod
    def build_method_dict(self, forest: Forest) -> dict[MethodKey, Any]: ...

    @abc.abstractmethod
    def build_unique_dict(self, method_dict: Mapping[MethodKey, Any]) -> dict[NonUniqueKey, frozenset[MethodKey]]: ...

    def build_extras(self, forest: Forest, method_dict: Mapping[MethodKey, Any]) -> dict[str, Any]:
        return {}

    def run(self, forest: Forest) -> PreprocessResult:
        method_dict = self.build_method_dict(forest)
        unique_dict = self.build_unique_dict(method_dict)
        return PreprocessResult(method_dict, unique_dict, self.build_extras(forest, method_dict))


class Resolution(list):
    """``resolve`` output: a list of ``(context, TargetKey)`` plus a reason when empty."""

    def __init__(self, items: Iterable[tuple[Hashable, TargetKey]] = (), reason: str = "") -> None:
        super().__init__(items)
        self.reason = reason


class Generator(abc.ABC):
    @abc.abstractmethod
    def seek_call_sites(self, container: ContainerKey) -> list[CallSite]: ...

    @abc.abstractmethod
    def resolve(self, context: Hashable, site: CallSite) -> Resolution: ...

    def containers_of(self, method: MethodKey) -> list[ContainerKey]:
        """Regions made reachable by reaching ``method``: by default just its body."""
        return [method]


class NoEntryPoints(UserWarning):
    pass


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class AllMethods:
    def __call__(self, key: MethodKey) -> bool:
        return True

    def __str__(self) -> str:
        return "all"


@dataclass(frozen=True)
class NameEquals:
    name: str

    def __call__(self, key: MethodKey) -> bool:
        return key.name == self.name

    def __str__(self) -> str:
        return f"name={self.name}"


@dataclass(frozen=True)
class Regex:
    """Selects methods whose canonical id contains a match for ``pattern``."""

    pattern: str

    def __call__(self, key: MethodKey) -> bool:
        return re.search(self.pattern, str(key)) is not None

    def __str__(self) -> str:
        return f"regex={self.pattern}"


EntryPointFilter = Union[AllMethods, NameEquals, Regex]


def parse_entry_filter(spec: str) -> EntryPointFilter:
    if spec == "all":
        return AllMethods()
    kind, sep, value = spec.partition("=")
    if sep and kind == "name" and value:
        return NameEquals(value)
    if sep and kind == "regex" and value:
        try:
            re.compile(value)
        except re.error as exc:
            raise ValueError(f"bad entry regex {value!r}: {exc}") from exc
        return Regex(value)
    raise ValueError(f"bad entry filter {spec!r}; expected all, name=<string> or regex=<pattern>")


def select_entry_points(method_dict: Mapping[MethodKey, Any], flt: EntryPointFilter = AllMethods()) -> list[MethodKey]:
    chosen = sorted((k for k in method_dict if flt(k)), key=str)
    if not chosen:
        warnings.warn(f"entry filter {flt} matched no methods", NoEntryPoints, stacklevel=2)
    return chosen


def generate(
    gen: Generator,
    entries: Sequence[MethodKey],
    method_dict: Mapping[MethodKey, Any] | None = None,
) -> CallGraph:
    """Run the worklist over call sites reachable from ``entries``.

    Every popped ``(context, site)`` is resolved at most once.  For each
    resolved target, the containers ``gen.containers_of`` lists for its
    defining method are searched, and their call sites join the queue with
    the context the resolver returned.
    """
    if method_dict is not None:
        unknown = [e for e in entries if e not in method_dict]
        if unknown:
            raise ValueError(f"entry points not in method_dict: {[str(k) for k in unknown]}")

    graph = CallGraph()
    work: deque[tuple[Hashable, CallSite]] = deque()
    sought: set[tuple[Hashable, ContainerKey]] = set()

    def push(context: Hashable, container: ContainerKey) -> None:
        if (context, container) in sought:
            return
        sought.add((context, container))
        for site in gen.seek_call_sites(container):
            work.append((context, site))

    for entry in entries:
        for container in gen.containers_of(entry):
            push(UNIT, container)

    visited: set[tuple[Hashable, Any]] = set()
    while work:
        context, site = work.popleft()
        if (context, site.site_id) in visited:
            continue
        visited.add((context, site.site_id))
        try:
            resolved = gen.resolve(context, site)
        except Exception as exc:
            raise GenerationError(
                f"resolver failed at {site.site_id.file}@{site.site_id.offset} ({site.callee_name})"
            ) from exc
        if not resolved:
            graph.add_unresolved(site, getattr(resolved, "reason", "") or "unresolved")
            continue
        for next_context, target in resolved:
            graph.add_edge(site.container, target, site.site_id, (site.row, site.col))
            for container in gen.containers_of(target.defined_in):
                push(next_context, container)
    return graph


def class_level_containers(owner: ClassName) -> list[ClassLevelKey]:
    return [ClassLevelKey(owner, region) for region in Region]
