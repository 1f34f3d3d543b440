"""Time the compiled kernels against the pure-Python twins.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each kernel runs on the same inputs under both backends; results are
checked for equality before timings are reported.
"""

import argparse
import random
import sys
import timeit

import numpy as np

from invgraphs import families, kernels
from invgraphs.metric import end_cone


def workloads():
    rng = random.Random(7)
    words = [tuple(rng.randrange(4) for _ in range(rng.randrange(1, 40))) for _ in range(2000)]
    rg = families.free_group(2, 8)
    table = rg.graph.table
    cone = end_cone(families.free_abelian(2, 12), "(3,1)", 4)
    ctab = cone.graph.table
    n = len(cone.graph)
    allowed = np.ones(n, dtype=np.uint8)
    flags = np.zeros(n, dtype=np.uint8)
    for f in cone.frontier:
        flags[f] = 1
    order = np.arange(4, dtype=np.int32)
    frontier = sorted(cone.frontier)

    def make(backend):
        t = backend.prepare(table)
        ct = backend.prepare(ctab)
        return {
            "free_reduce x2000": lambda: [backend.free_reduce(w) for w in words],
            "trace x2000": lambda: [backend.trace(t, 0, w) for w in words],
            "bfs on F2 ball (13121 vertices)": lambda: backend.bfs(t, 0, None).tolist(),
            f"canonical_code x{len(frontier)} anchors": lambda: [
                backend.canonical_code(ct, f, allowed, flags, order) for f in frontier
            ],
        }

    return make


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if kernels.compiled_backend is None:
        print("compiled kernels are not built; only the Python backend is available", file=sys.stderr)
        return 1
    make = workloads()
    py, cy = make(kernels.python_backend), make(kernels.compiled_backend)
    print(f"{'kernel':40} {'python ms':>10} {'cython ms':>10} {'speedup':>8}")
    for name in py:
        if py[name]() != cy[name]():
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        tp = min(timeit.repeat(py[name], number=1, repeat=args.repeat)) * 1e3
        tc = min(timeit.repeat(cy[name], number=1, repeat=args.repeat)) * 1e3
        print(f"{name:40} {tp:10.2f} {tc:10.2f} {tp / tc:7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
