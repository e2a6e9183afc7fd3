"""Compare the compiled and pure-Python search kernels.

Each workload is run on every available backend over identical problems;
node counts must agree, and the table reports wall time per backend.

    python benchmarks/bench_search.py [--repeat 3] [--seed 0]
"""
import argparse
import time

import numpy as np

from qtomo import _kernel
from qtomo.oracle import SearchBudget, SearchProblem
from qtomo.tensor import Shape, Tensor, line_sums


def random_problems(dims, q, count, rng, symmetric=False):
    out = []
    for _ in range(count):
        arr = rng.integers(0, q, size=dims)
        if symmetric:
            arr = np.minimum(arr, arr.T)
        S = line_sums(Tensor(Shape(dims, q), arr))
        out.append(SearchProblem(S, SearchBudget(symmetric=symmetric)))
    return out


def workloads(rng):
    """(name, problems, stop at first solution)."""
    return [
        ("first solution 4x4x4x4 q=4", random_problems((4, 4, 4, 4), 4, 100, rng), True),
        ("first solution 6x6x6 q=3", random_problems((6, 6, 6), 3, 100, rng), True),
        ("all solutions 3x3x3 q=3", random_problems((3, 3, 3), 3, 100, rng), False),
        ("all solutions 5x5 q=2", random_problems((5, 5), 2, 100, rng), False),
        ("all solutions 4x4 q=3", random_problems((4, 4), 3, 100, rng), False),
        ("symmetric first 8x8 q=3", random_problems((8, 8), 3, 100, rng, symmetric=True), True),
    ]


def run(search, problems, stop):
    nodes = 0
    for P in problems:
        _, n = search(P.lo, P.hi, P.ptr, P.lines, P.mults, P.target,
                      P.budget.max_nodes, lambda v: stop)
        nodes += n
    return nodes


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3, help="timing repetitions (best is kept)")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    backends = _kernel.available_backends()
    names = sorted(backends)
    print(f"active backend: {_kernel.BACKEND}")
    print(f"{'workload':30s} {'nodes':>10s} " + " ".join(f"{n + ' s':>10s}" for n in names)
          + (f" {'speedup':>8s}" if len(names) > 1 else ""))
    for label, problems, stop in workloads(np.random.default_rng(args.seed)):
        counts, times = {}, {}
        for name in names:
            best = float("inf")
            for _ in range(args.repeat):
                t = time.perf_counter()
                counts[name] = run(backends[name], problems, stop)
                best = min(best, time.perf_counter() - t)
            times[name] = best
        if len(set(counts.values())) != 1:
            raise SystemExit(f"{label}: node counts differ between backends: {counts}")
        row = f"{label:30s} {counts[names[0]]:>10d} " + " ".join(f"{times[n]:>10.4f}" for n in names)
        if len(names) > 1:
            row += f" {times['python'] / times['cython']:>7.1f}x"
        print(row)


if __name__ == "__main__":
    main()
