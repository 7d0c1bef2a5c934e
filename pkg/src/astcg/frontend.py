"""Grammar loading and source-tree parsing, plus small node helpers."""

from __future__ import annotations

import logging
import sys
import threading
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import metadata
from pathlib import Path
from typing import Iterable, Sequence, TextIO

from tree_sitter import Language, Node, Parser, Tree

from . import _kernels

log = logging.getLogger(__name__)

DEFAULT_GLOBS: dict[str, tuple[str, ...]] = {"java": ("**/*.java",)}


class UnsupportedLanguage(ValueError):
    pass


class IoFailure(OSError):
    def __init__(self, path: str, reason: str = "") -> None:
        super().__init__(f"cannot read {path}: {reason}" if reason else f"cannot read {path}")
        self.path = path


class EmptyForest(UserWarning):
    pass


def _java_language():
    import tree_sitter_java

    return tree_sitter_java.language()


# language tag -> (distribution name, capsule factory)
_GRAMMARS = {"java": ("tree-sitter-java", _java_language)}


def supported_languages() -> list[str]:
    return sorted(_GRAMMARS)


@dataclass(frozen=True)
class Grammar:
    tag: str
    language: Language
    version: str

    def parser(self) -> Parser:
        return Parser(self.language)

    def __hash__(self) -> int:
        return hash(self.tag)


@lru_cache(maxsize=None)
def load_grammar(language: str) -> Grammar:
    """Return the (cached) grammar handle for a language tag."""
    try:
        dist, factory = _GRAMMARS[language]
    except KeyError:
        raise UnsupportedLanguage(
            f"unsupported language {language!r}; compiled in: {', '.join(supported_languages())}"
        ) from None
    return Grammar(language, Language(factory()), f"{dist} {metadata.version(dist)}")


@dataclass(frozen=True)
class SourceFile:
    path: str  # posix, relative to the forest root
    content: bytes
    language: str = "java"


@dataclass
class ParseReport:
    grammar_version: str
    errors: list[tuple[str, int, int]] = field(default_factory=list)
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [f"PARSE-ERROR {path} 0:0" for path, _ in self.skipped]
        out += [f"PARSE-ERROR {path} {row}:{col}" for path, row, col in self.errors]
        return out

    def write(self, stream: TextIO | None = None) -> None:
        stream = stream or sys.stderr
        for line in self.lines():
            print(line, file=stream)


@dataclass
class Forest:
    files: list[SourceFile]
    trees: list[Tree]
    grammar: Grammar
    report: ParseReport
    root_dir: Path | None = None

    @property
    def roots(self) -> list[Node]:
        return [t.root_node for t in self.trees]

    def __len__(self) -> int:
        return len(self.files)

    def __iter__(self):
        return iter(zip(self.files, self.roots))

    def file(self, path: str) -> tuple[SourceFile, Node]:
        for f, root in self:
            if f.path == path:
                return f, root
        raise KeyError(path)

    def subset(self, index: int) -> "Forest":
        """Single-file forest view sharing the already-parsed tree."""
        return Forest(
            [self.files[index]],
            [self.trees[index]],
            self.grammar,
            ParseReport(self.report.grammar_version),
            self.root_dir,
        )


def first_error(root: Node) -> tuple[int, int] | None:
    """1-based (row, col) of the first ERROR or MISSING node, or None."""
    if not root.has_error:
        return None
    cursor = root.walk()
    while True:
        node = cursor.node
        if node.is_error or node.is_missing:
            row, col = node.start_point
            return row + 1, col + 1
        if node.has_error and cursor.goto_first_child():
            continue
        while not cursor.goto_next_sibling():
            if not cursor.goto_parent():
                return 1, 1


_local = threading.local()


def _thread_parser(grammar: Grammar) -> Parser:
    parsers = getattr(_local, "parsers", None)
    if parsers is None:
        parsers = _local.parsers = {}
    if grammar.tag not in parsers:
        parsers[grammar.tag] = grammar.parser()
    return parsers[grammar.tag]


def parse_bytes(content: bytes, language: str = "java") -> Tree:
    grammar = load_grammar(language)
    return _thread_parser(grammar).parse(content)


def forest_from_sources(sources: Iterable[tuple[str, str | bytes]], language: str = "java") -> Forest:
    """Build a forest from in-memory ``(path, text)`` pairs, sorted by path."""
    grammar = load_grammar(language)
    files = sorted(
        (SourceFile(p, c.encode() if isinstance(c, str) else c, language) for p, c in sources),
        key=lambda f: f.path,
    )
    paths = [f.path for f in files]
    if len(set(paths)) != len(paths):
        raise ValueError("duplicate source paths")
    report = ParseReport(grammar.version)
    trees = [parse_bytes(f.content, language) for f in files]
    for f, t in zip(files, trees):
        err = first_error(t.root_node)
        if err:
            report.errors.append((f.path, *err))
    return Forest(files, trees, grammar, report)


def _match(root: Path, globs: Sequence[str]) -> list[Path]:
    found: set[Path] = set()
    for pattern in globs:
        found.update(p for p in root.glob(pattern) if p.is_file())
    return sorted(found, key=lambda p: p.relative_to(root).as_posix())


def parse_sources(
    root_dir: str | Path,
    language: str = "java",
    include_globs: Sequence[str] | None = None,
    threads: int = 1,
    strict: bool = False,
) -> Forest:
    """Parse every matching file under ``root_dir`` into a forest.

    Unreadable files are skipped and listed in the report, unless ``strict``
    is set, in which case the first one raises :class:`IoFailure`.  Files with
    syntax errors are kept; tree-sitter's error recovery still yields a tree.
    """
    grammar = load_grammar(language)
    root = Path(root_dir)
    if not root.is_dir():
        raise IoFailure(str(root), "not a readable directory")
    globs = include_globs or DEFAULT_GLOBS[language]
    report = ParseReport(grammar.version)

    files: list[SourceFile] = []
    for path in _match(root, globs):
        rel = path.relative_to(root).as_posix()
        try:
            content = path.read_bytes()
        except OSError as exc:
            if strict:
                raise IoFailure(rel, str(exc)) from exc
            report.skipped.append((rel, str(exc)))
            log.warning("skipping unreadable file %s: %s", rel, exc)
            continue
        files.append(SourceFile(rel, content, language))

    def work(f: SourceFile) -> Tree:
        return _thread_parser(grammar).parse(f.content)

    if threads > 1 and len(files) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trees = list(pool.map(work, files))
    else:
        trees = [work(f) for f in files]

    for f, t in zip(files, trees):
        err = first_error(t.root_node)
        if err:
            report.errors.append((f.path, *err))

    if not files:
        warnings.warn(f"no files matched {list(globs)} under {root}", EmptyForest, stacklevel=2)
    return Forest(files, trees, grammar, report, root)


def descendants_of_kind(node: Node, kinds: Iterable[str], language: str = "java") -> list[Node]:
    """All descendants of ``node`` (itself included) whose kind is in ``kinds``, in document order."""
    return _kernels.collect(node, _kernels.kinds_set(kinds), load_grammar(language).language)


def node_text(node: Node | None) -> str:
    if node is None:
        return ""
    return node.text.decode("utf-8", errors="replace")


def span(node: Node) -> tuple[int, int, tuple[int, int], tuple[int, int]]:
    return node.start_byte, node.end_byte, tuple(node.start_point), tuple(node.end_point)


def locate(root: Node, start: int, end: int, kind: str) -> Node:
    """Find the node with the exact byte range and kind inside ``root``."""
    node = root.descendant_for_byte_range(start, end)
    while node is not None:
        if node.start_byte == start and node.end_byte == end and node.type == kind:
            return node
        if node.start_byte < start or node.end_byte > end:
            break
        node = node.parent
    raise LookupError(f"no {kind} node at bytes {start}..{end}")
