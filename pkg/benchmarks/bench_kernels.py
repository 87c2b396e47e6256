"""Benchmark the compiled kernel against the pure-Python fallback.

Runs the same deterministic workloads under each available backend and
prints per-workload timings with the speedup.  Usage:

    python benchmarks/bench_kernels.py [--quick]
"""

import argparse
import random
import time

from crittuple import kernel
from crittuple.criticality import is_critical, is_critical_relative
from crittuple.homs import find_hom, unify_atom_tuple
from crittuple.model import QbfFormula
from crittuple.crosschecks import directed_cycle, pair_corpus
from crittuple.reductions import qbf_witness_map, reduce_graphhom, reduce_qbf


def _seeded_formula(nu, nv, m, seed):
    rng = random.Random(seed)
    universals = tuple(range(1, nu + 1))
    exist = tuple(range(nu + 1, nu + nv + 1))
    vs = universals + exist
    clauses = [((u, True), (u, False), (rng.choice(vs), True)) for u in universals]
    while len(clauses) < m:
        clauses.append(tuple((rng.choice(vs), rng.random() < 0.5) for _ in range(3)))
    return QbfFormula(universals, exist, tuple(clauses[:m]))


def wl_pinned_hom(repeat):
    phi = _seeded_formula(3, 2, 5, seed=11)
    out = reduce_qbf(phi)
    sigma = {u: bool(u % 2) for u in phi.universals}
    _h, inst = qbf_witness_map(out, sigma)
    pin = unify_atom_tuple(out.query.atoms[out.g_index], out.tau)

    def run():
        for _ in range(repeat):
            assert find_hom(out.query, inst, pin, deterministic=False) is not None

    return run


def wl_qbf_exhaustion(max_nodes):
    phi = QbfFormula((1,), (), (((1, True), (1, True), (1, False)),))
    out = reduce_qbf(phi)

    def run():
        from crittuple.errors import BudgetExceededError

        try:
            v = is_critical_relative(
                out.tau, out.query, out.g_index, max_nodes=max_nodes
            )
            assert v.critical is False
        except BudgetExceededError:
            pass

    return run


def wl_cycle_grid(n_max):
    outs = [
        reduce_graphhom(directed_cycle(n, "a"), directed_cycle(m, "b"))
        for n in range(2, n_max + 1)
        for m in range(2, n_max + 1)
    ]

    def run():
        for out in outs:
            is_critical(out.tau, out.query)

    return run


def wl_random_pairs(count):
    pairs = pair_corpus(seed=99, count=count)

    def run():
        for tau, query in pairs:
            is_critical(tau, query)

    return run


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--quick", action="store_true", help="smaller workloads")
    args = parser.parse_args()

    if args.quick:
        workloads = [
            ("pinned hom search x5", wl_pinned_hom(5)),
            ("qbf exhaustion (50k nodes)", wl_qbf_exhaustion(50_000)),
            ("cycle grid n,m <= 4", wl_cycle_grid(4)),
            ("random pairs x100", wl_random_pairs(100)),
        ]
    else:
        workloads = [
            ("pinned hom search x20", wl_pinned_hom(20)),
            ("qbf exhaustion (full)", wl_qbf_exhaustion(0)),
            ("cycle grid n,m <= 6", wl_cycle_grid(6)),
            ("random pairs x500", wl_random_pairs(500)),
        ]

    backends = kernel.available_backends()
    print(f"backends: {', '.join(backends)} (default: {kernel.backend_name()})")
    width = max(len(name) for name, _ in workloads)
    results = {}
    for name, run in workloads:
        times = {}
        for backend in backends:
            with kernel.use(backend):
                start = time.perf_counter()
                run()
                times[backend] = time.perf_counter() - start
        results[name] = times
        row = "  ".join(f"{b}: {times[b]:8.3f}s" for b in backends)
        if "compiled" in times and "python" in times and times["compiled"] > 0:
            row += f"  speedup: {times['python'] / times['compiled']:6.1f}x"
        print(f"{name:<{width}}  {row}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
