"""Compare the compiled and pure-Python CDCL engines.

Workloads: random 3-CNF near the satisfiability threshold, pigeonhole
formulas, and a full QBF solve per engine.  Run with

    python benchmarks/bench_satcore.py [--repeat N]
"""

import argparse
import random
import statistics
import time

from redres import satcore
from redres.bench import gen_composite, gen_qparity
from redres.solver import SolverConfig, solve


def random_3cnf(n, ratio, seed):
    rng = random.Random(seed)
    return [[v if rng.random() < 0.5 else -v for v in rng.sample(range(1, n + 1), 3)] for _ in range(int(n * ratio))]


def pigeonhole(holes):
    var = lambda p, h: p * holes + h + 1  # noqa: E731
    clauses = [[var(p, h) for h in range(holes)] for p in range(holes + 1)]
    for h in range(holes):
        for p in range(holes + 1):
            for q in range(p + 1, holes + 1):
                clauses.append([-var(p, h), -var(q, h)])
    return clauses


def run_sat(engine, clauses):
    s = engine(seed=0)
    for c in clauses:
        s.add_clause(c)
    status, _ = s.solve([])
    return status, s.conflicts


def run_qbf(backend, pcnf):
    return solve(pcnf, SolverConfig.from_mode("plain", backend=backend)).verdict


def timed(fn, repeat):
    times = []
    result = None
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t)
    return statistics.median(times), result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    workloads = [
        (f"3cnf n=120 seed={s}", (lambda s=s: ("sat", random_3cnf(120, 4.26, s)))) for s in range(3)
    ] + [
        ("pigeonhole 7", lambda: ("sat", pigeonhole(7))),
        ("qbf qparity 9 (plain)", lambda: ("qbf", gen_qparity(9))),
        ("qbf composite 6 (plain)", lambda: ("qbf", gen_composite(6))),
    ]
    names = list(satcore.BACKENDS)
    print(f"{'workload':28s}" + "".join(f"{n:>12s}" for n in names) + ("     speedup" if len(names) > 1 else ""))
    for label, make in workloads:
        kind, payload = make()
        row = []
        for name in names:
            engine = satcore.BACKENDS[name]
            if kind == "sat":
                t, _ = timed(lambda: run_sat(engine, payload), args.repeat)
            else:
                t, _ = timed(lambda: run_qbf(name, payload), args.repeat)
            row.append(t)
        line = f"{label:28s}" + "".join(f"{t:12.4f}" for t in row)
        if len(row) > 1:
            line += f"{row[0] / row[1]:11.1f}x"
        print(line)
    if len(names) == 1:
        print("compiled engine not available; only the pure-Python engine was timed")


if __name__ == "__main__":
    main()
