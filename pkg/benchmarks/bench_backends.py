"""Compare the compiled scan kernel against the pure numpy fallback.

Run as:  python3 benchmarks/bench_backends.py [p ...]

Both backends walk the same chart decomposition and must return identical
counts; the table reports wall time and throughput (points/second over the
full P^4 enumeration).
"""
import sys
import time

from hmquintic import _core_py

try:
    from hmquintic import _core
except ImportError:
    _core = None


def total_points(p):
    return sum(_core_py.chart_size(p, k) for k in range(5))


def run(mod, p):
    t0 = time.perf_counter()
    agg = [0, 0, 0]
    for k in range(5):
        n0, n3, n2, _ = mod.scan_chart(p, k, 0, _core_py.chart_size(p, k), 0)
        agg[0] += n0
        agg[1] += n3
        agg[2] += n2
    return time.perf_counter() - t0, tuple(agg)


def main(argv):
    primes = [int(a) for a in argv[1:]] or [13, 31, 47]
    print(f"{'p':>4} {'backend':>8} {'time':>9} {'Mpts/s':>8}  counts")
    for p in primes:
        n = total_points(p)
        baseline = None
        for name, mod in (("c", _core), ("py", _core_py)):
            if mod is None:
                print(f"{p:>4} {name:>8}   (extension not built)")
                continue
            dt, counts = run(mod, p)
            if baseline is None:
                baseline = counts
            elif counts != baseline:
                raise SystemExit(f"backend disagreement at p={p}: "
                                 f"{counts} vs {baseline}")
            print(f"{p:>4} {name:>8} {dt:>8.3f}s {n / dt / 1e6:>8.2f}  "
                  f"{counts}")
    print("counts agree across backends")


if __name__ == "__main__":
    main(sys.argv)
