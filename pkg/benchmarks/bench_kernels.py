"""Compiled vs pure-Python kernels on generated instances.

    python benchmarks/bench_kernels.py [--structures 3,6,10] [--instances 10] [--repeat 5]

Prints the best-of-repeat median time per kernel and the speedup.
"""

import argparse
import statistics
import sys
import timeit

import numpy as np

from pdagrta import kernels, prepare
from pdagrta.generator import GeneratorConfig, generate_pdag
from pdagrta.lambdastar import compute_lambda_star
from pdagrta.lowerbound import delta
from pdagrta.paths import suffix_potential


def _cases(pdag):
    idx = pdag.index
    ones = np.ones(idx.n, dtype=np.uint8)
    pot = suffix_potential(pdag)
    floor = delta(pdag)

    def suffix():
        kernels.longest_suffix(idx.topo, idx.succ_ptr, idx.succ_idx, idx.wcet, ones)

    def dominant():
        kernels.enumerate_dominant(
            idx.topo, idx.succ_ptr, idx.succ_idx, idx.wcet, pot, idx.node_branch, idx.source, idx.sink, floor
        )

    def scenario_sweep():
        # the oracle's inner loop: one longest-path pass per scenario mask
        for _ in range(50):
            kernels.longest_suffix(idx.topo, idx.succ_ptr, idx.succ_idx, idx.wcet, idx.unconditional)

    def lambda_star():
        idx.cache.clear()
        compute_lambda_star(pdag)

    return {"longest_suffix": suffix, "enumerate_dominant": dominant,
            "scenario_sweep_x50": scenario_sweep, "compute_lambda_star": lambda_star}


def measure(pdags, backend, repeat):
    out = {}
    with kernels.backend(backend):
        for pdag in pdags:
            for name, fn in _cases(pdag).items():
                best = min(timeit.repeat(fn, number=1, repeat=repeat))
                out.setdefault(name, []).append(best)
    return {k: statistics.median(v) for k, v in out.items()}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--structures", default="3,6,10")
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=100)
    args = ap.parse_args(argv)

    if "compiled" not in kernels.available_backends():
        print("compiled kernels not built; nothing to compare", file=sys.stderr)
        return 1
    print(f"{'|Θ|':>4} {'kernel':<22} {'compiled ms':>12} {'python ms':>12} {'speedup':>8}")
    for k in (int(x) for x in args.structures.split(",")):
        pdags = [prepare(generate_pdag(GeneratorConfig(structures=k, seed=args.seed + i)))
                 for i in range(args.instances)]
        fast = measure(pdags, "compiled", args.repeat)
        slow = measure(pdags, "python", args.repeat)
        for name in fast:
            print(f"{k:>4} {name:<22} {fast[name] * 1e3:>12.3f} {slow[name] * 1e3:>12.3f} "
                  f"{slow[name] / fast[name]:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
