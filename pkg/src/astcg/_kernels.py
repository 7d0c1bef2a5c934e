"""Node-kind collection kernels.

Two interchangeable implementations of the one traversal every other module
leans on: collect all descendants of a node whose kind is in a given set, in
document order.

* ``native`` runs tree-sitter's compiled query engine, so only matching nodes
  ever cross into Python.
* ``python`` walks a ``TreeCursor`` and checks every node.

The native kernel is selected at import unless it is unavailable or the
``ASTCG_PURE_PYTHON`` environment variable is set.
"""

from __future__ import annotations

import os
from contextlib import contextmanager
from functools import lru_cache
from typing import Callable, Iterable, Iterator

from tree_sitter import Language, Node

try:
    from tree_sitter import Query, QueryCursor
except ImportError:  # pragma: no cover - older bindings
    Query = QueryCursor = None

Kernel = Callable[[Node, frozenset, Language], list]


def collect_python(node: Node, kinds: frozenset, language: Language | None = None) -> list[Node]:
    if not kinds:
        return []
    out = []
    # a cursor created from ``node`` treats it as the root and cannot leave it
    cursor = node.walk()
    while True:
        current = cursor.node
        if current.type in kinds:
            out.append(current)
        if cursor.goto_first_child():
            continue
        while not cursor.goto_next_sibling():
            if not cursor.goto_parent():
                return out


@lru_cache(maxsize=256)
def _query_for(language: Language, kinds: frozenset):
    known = sorted(k for k in kinds if language.id_for_node_kind(k, True) is not None)
    if not known:
        return None
    patterns = " ".join(f"({k})" for k in known)
    return Query(language, f"[{patterns}] @n")


def _depth(node: Node) -> int:
    depth = 0
    parent = node.parent
    while parent is not None:
        depth += 1
        parent = parent.parent
    return depth


def collect_native(node: Node, kinds: frozenset, language: Language) -> list[Node]:
    if not kinds:
        return []
    query = _query_for(language, kinds)
    if query is None:
        return []
    captured = QueryCursor(query).captures(node).get("n", [])
    # the cursor may report matches that merely overlap the node's range
    lo, hi = node.start_byte, node.end_byte
    nodes = {(n.start_byte, n.end_byte, n.kind_id): n for n in captured
             if lo <= n.start_byte and n.end_byte <= hi}
    ordered = sorted(nodes.values(), key=lambda n: (n.start_byte, -n.end_byte))
    # equal spans: parent before child
    for i in range(len(ordered) - 1):
        a, b = ordered[i], ordered[i + 1]
        if a.start_byte == b.start_byte and a.end_byte == b.end_byte:
            return sorted(ordered, key=lambda n: (n.start_byte, -n.end_byte, _depth(n)))
    return ordered


def _native_available() -> bool:
    if Query is None:
        return False
    try:
        import tree_sitter_java

        language = Language(tree_sitter_java.language())
        Query(language, "(program) @n")
    except Exception:
        return False
    return True


KERNELS: dict[str, Kernel] = {"python": collect_python}
if _native_available():
    KERNELS["native"] = collect_native

ACTIVE = "python" if os.environ.get("ASTCG_PURE_PYTHON") or "native" not in KERNELS else "native"
collect = KERNELS[ACTIVE]


@contextmanager
def use_kernel(name: str) -> Iterator[None]:
    """Switch the process-wide kernel for the duration of a ``with`` block."""
    global collect, ACTIVE
    saved = ACTIVE
    collect, ACTIVE = KERNELS[name], name
    try:
        yield
    finally:
        collect, ACTIVE = KERNELS[saved], saved


def kinds_set(kinds: Iterable[str]) -> frozenset:
    return kinds if isinstance(kinds, frozenset) else frozenset(kinds)
