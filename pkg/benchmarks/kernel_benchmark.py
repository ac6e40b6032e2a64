"""Compare the compiled chain kernel against the pure-Python fallback.

Both kernels consume the same pre-generated uniform stream, so besides timing
we assert that their end states are bit-identical.

Usage: python benchmarks/kernel_benchmark.py [--steps N] [--polymers N] [--seed S]
"""

import argparse
import time

import numpy as np

from cliquemc.dynamics import ChainKernelData, get_kernel, make_state
from cliquemc.model import CliqueCover, Polymer, PolymerModel


def build_model(n_polymers: int, seed: int):
    rng = np.random.default_rng(seed)
    polymers = [
        Polymer(i, float(np.log(rng.uniform(0.05, 0.5)))) for i in range(n_polymers)
    ]
    pairs = [
        (a, b)
        for a in range(n_polymers)
        for b in range(a + 1, n_polymers)
        if rng.random() < 0.3
    ]
    model = PolymerModel(polymers, pairs)
    # cover: group consecutive mutually-incompatible runs, pad with singletons
    cliques = []
    for pid in range(n_polymers):
        clique = [pid]
        for q in model.neighbors(pid):
            if q > pid and all(model.incompatible(q, r) for r in clique):
                clique.append(q)
        cliques.append(clique)
    return model, CliqueCover(cliques)


def run(kernel, data, steps, u):
    state = make_state(data)
    t0 = time.perf_counter()
    kernel.run_steps(*data.static_args(), state.occ, state.in_state, u)
    return time.perf_counter() - t0, state


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--steps", type=int, default=2_000_000)
    ap.add_argument("--polymers", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    model, cover = build_model(args.polymers, args.seed)
    data = ChainKernelData(model, cover)
    u = np.random.default_rng(args.seed).random(2 * args.steps)

    results = {}
    for name in ("python", "cython"):
        try:
            kernel = get_kernel(name)
        except ImportError:
            print(f"{name:>7}: unavailable (extension not built)")
            continue
        elapsed, state = run(kernel, data, args.steps, u)
        results[name] = (elapsed, state)
        rate = args.steps / elapsed
        print(f"{name:>7}: {elapsed:8.3f} s  ({rate:12.0f} steps/s)")

    if len(results) == 2:
        s_py, s_cy = results["python"][1], results["cython"][1]
        same = np.array_equal(s_py.in_state, s_cy.in_state) and np.array_equal(
            s_py.occ, s_cy.occ
        )
        print(f"end states identical: {same}")
        print(f"speedup: {results['python'][0] / results['cython'][0]:.1f}x")
        if not same:
            raise SystemExit(1)


if __name__ == "__main__":
    main()
