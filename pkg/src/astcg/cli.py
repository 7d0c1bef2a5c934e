"""Command-line entry point: ``astcg preprocess | generate | compare | census``.

Exit codes:

====  ==========================================
0     success (also when no entry point matched)
1     internal error while generating
2     I/O failure or bad arguments
3     no source files found
4     cache schema, grammar or source mismatch
5     graph document schema mismatch
====  ==========================================
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
import time
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .framework import GenerationError, NoEntryPoints, generate, parse_entry_filter, select_entry_points
from .frontend import EmptyForest, Forest, IoFailure, parse_sources, supported_languages
from .java.cache import CacheMismatch, dump_cache, load_cache
from .java.preprocess import JavaProducts, preprocess_parallel
from .java.resolve import GENERATORS, ResolutionConfig
from .outputs import DOT_MODES, SchemaMismatch, census, load_json, overlap, render, unresolved_report

EXIT_OK, EXIT_INTERNAL, EXIT_IO, EXIT_EMPTY, EXIT_CACHE, EXIT_SCHEMA = 0, 1, 2, 3, 4, 5

log = logging.getLogger("astcg")


class CliError(Exception):
    def __init__(self, code: int, message: str) -> None:
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    language: str
    source_root: str
    algorithm: str
    entry: str
    resolution: ResolutionConfig
    fmt: str
    dot_mode: str = "keep-dispatch"
    cache: str | None = None
    out: str | None = None
    threads: int = 1

    def metadata(self) -> dict[str, Any]:
        # threads, cache and output paths never change the graph, so they stay
        # out of the artifact to keep split and fused runs byte-identical
        meta: dict[str, Any] = {
            "language": self.language,
            "source_root": self.source_root,
            "algorithm": self.algorithm,
            "entry": self.entry,
            "format": self.fmt,
            **self.resolution.as_dict(),
        }
        if self.fmt == "dot":
            meta["dot_mode"] = self.dot_mode
        return meta


def _default_threads() -> int:
    return os.cpu_count() or 1


def _stderr(text: str) -> None:
    if text:
        sys.stderr.write(text if text.endswith("\n") else text + "\n")


def _write(path: str | None, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read {path}: {exc}") from exc


def _parse(src: str, lang: str, threads: int) -> Forest:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyForest)
        try:
            forest = parse_sources(src, lang, threads=threads)
        except IoFailure as exc:
            raise CliError(EXIT_IO, str(exc)) from exc
    forest.report.write(sys.stderr)
    return forest


def _preprocess(src: str, lang: str, threads: int) -> tuple[JavaProducts, Forest]:
    forest = _parse(src, lang, threads)
    if not len(forest):
        raise CliError(EXIT_EMPTY, f"no {lang} sources under {src}")
    return preprocess_parallel(forest, threads), forest


def cmd_preprocess(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    products, forest = _preprocess(args.src, args.lang, args.threads)
    text = dump_cache(products, forest)
    _stderr(f"preprocess {time.perf_counter() - t0:.3f}")
    for line in products.diagnostics:
        _stderr(line)
    _write(args.out, text)
    return EXIT_OK


def cmd_generate(args: argparse.Namespace) -> int:
    try:
        flt = parse_entry_filter(args.entry)
    except ValueError as exc:
        raise CliError(EXIT_IO, str(exc)) from exc
    t0 = time.perf_counter()
    if args.cache:
        try:
            products, forest = load_cache(_read(args.cache), args.src)
        except CacheMismatch as exc:
            raise CliError(EXIT_CACHE, str(exc)) from exc
    else:
        products, forest = _preprocess(args.src, args.lang, args.threads)
        _stderr(f"preprocess {time.perf_counter() - t0:.3f}")
    resolution = ResolutionConfig(
        nr_use_arity=not args.nr_name_only,
        scha_expand_subtypes=not args.no_subtypes,
        scha_qualify_with_imports=args.qualify_imports,
    )
    config = RunConfig(
        language=forest.grammar.tag,
        source_root=Path(forest.root_dir).resolve().as_posix(),
        algorithm=args.algo,
        entry=args.entry,
        resolution=resolution,
        fmt=args.format,
        dot_mode=args.dot_mode,
        cache=args.cache,
        out=args.out,
        threads=args.threads,
    )
    t1 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NoEntryPoints)
        entries = select_entry_points(products.method_dict, flt)
    for w in caught:
        _stderr(f"warning: {w.message}")
    try:
        graph = generate(GENERATORS[args.algo](products, resolution), entries, products.method_dict)
    except GenerationError as exc:
        raise CliError(EXIT_INTERNAL, f"{exc}: {exc.__cause__!r}") from exc
    _stderr(f"generate {time.perf_counter() - t1:.3f}")
    if args.report_unresolved:
        _stderr(unresolved_report(graph))
    _write(args.out, render(graph, args.format, config.metadata(), args.dot_mode))
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    names = args.names.split(",") if args.names else [Path(g).stem for g in args.graphs]
    if len(names) != len(args.graphs):
        raise CliError(EXIT_IO, f"{len(args.graphs)} graphs but {len(names)} names")
    docs = []
    for path in args.graphs:
        try:
            docs.append(load_json(_read(path)))
        except SchemaMismatch as exc:
            raise CliError(EXIT_SCHEMA, f"{path}: {exc}") from exc
    _write(None, overlap(list(zip(names, docs))).format())
    return EXIT_OK


def cmd_census(args: argparse.Namespace) -> int:
    forest = _parse(args.src, args.lang, args.threads)
    _write(None, census(forest).format())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="astcg", description="Call graphs from syntax trees, no compiler needed.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp: argparse.ArgumentParser, src_required: bool = True) -> None:
        sp.add_argument("--src", required=src_required, help="source root directory")
        sp.add_argument("--lang", default="java", choices=supported_languages())
        sp.add_argument("--threads", type=int, default=_default_threads(), help="parser threads (default: CPU count)")

    pre = sub.add_parser("preprocess", help="parse sources and write the lookup cache")
    common(pre)
    pre.add_argument("--out", required=True, help="cache file, or - for stdout")
    pre.set_defaults(func=cmd_preprocess)

    gen = sub.add_parser("generate", help="build a call graph")
    common(gen, src_required=False)
    gen.add_argument("--cache", help="cache written by `preprocess`; --src then overrides its source root")
    gen.add_argument("--algo", choices=sorted(GENERATORS), default="nr")
    gen.add_argument("--entry", default="all", help="all | name=<method> | regex=<pattern over method ids>")
    gen.add_argument("--nr-name-only", action="store_true", help="NR ignores argument counts")
    gen.add_argument("--no-subtypes", action="store_true", help="SCHA does not expand receivers to subtypes")
    gen.add_argument("--qualify-imports", action="store_true", help="SCHA qualifies aliases through imports")
    gen.add_argument("--format", choices=("dot", "json", "csv"), default="json")
    gen.add_argument("--dot-mode", choices=DOT_MODES, default="keep-dispatch")
    gen.add_argument("--out", default="-", help="output file, or - for stdout")
    gen.add_argument("--report-unresolved", action="store_true", help="list unresolved call sites on stderr")
    gen.set_defaults(func=cmd_generate)

    cmp_ = sub.add_parser("compare", help="pairwise edge overlap of JSON graphs")
    cmp_.add_argument("graphs", nargs="+", metavar="GRAPH")
    cmp_.add_argument("--names", help="comma-separated labels, one per graph")
    cmp_.set_defaults(func=cmd_compare)

    cen = sub.add_parser("census", help="count call-site receiver kinds")
    common(cen)
    cen.set_defaults(func=cmd_census)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    if args.command == "generate" and not (args.cache or args.src):
        parser.error("generate needs --cache or --src")
    if args.command == "compare" and len(args.graphs) < 2:
        parser.error("compare needs at least two graphs")
    try:
        return args.func(args)
    except CliError as exc:
        _stderr(f"astcg: {exc}")
        return exc.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
