"""Time the native (query engine) and pure-Python node collectors, then a full pipeline run with each.

    python benchmarks/bench_kernels.py [--classes 400] [--repeat 5] [--seed 0]
"""

from __future__ import annotations

import argparse
import time

from astcg import _kernels
from astcg.framework import generate, select_entry_points
from astcg.frontend import forest_from_sources, load_grammar
from astcg.java.preprocess import JavaPreprocessor
from astcg.java.resolve import NRGenerator
from astcg.java.syntax import SITE_KINDS
from astcg.synth import CorpusShape, generate_corpus


def best_of(repeat: int, fn) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--classes", type=int, default=400)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    files = generate_corpus(args.seed, CorpusShape(classes=args.classes))
    forest = forest_from_sources(files.items())
    language = load_grammar("java").language
    lines = sum(t.count("\n") for t in files.values())
    print(f"corpus: {len(files)} files, {lines} lines, active kernel: {_kernels.ACTIVE}")

    counts = {}
    for name, kernel in _kernels.KERNELS.items():
        def collect_all(kernel=kernel):
            return sum(len(kernel(root, SITE_KINDS, language)) for root in forest.roots)

        counts[name] = collect_all()
        t = best_of(args.repeat, collect_all)
        print(f"collect  {name:<7} {t * 1000:9.1f} ms  ({counts[name]} call sites)")
    assert len(set(counts.values())) == 1, counts

    for name in _kernels.KERNELS:
        def pipeline():
            products = JavaPreprocessor().run(forest)
            generate(NRGenerator(products), select_entry_points(products.method_dict), products.method_dict)

        with _kernels.use_kernel(name):
            t = best_of(max(1, args.repeat // 2), pipeline)
        print(f"pipeline {name:<7} {t * 1000:9.1f} ms")


if __name__ == "__main__":
    main()
