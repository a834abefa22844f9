"""Time the primary pruned search against the brute-force oracle backends.

    python3 benchmarks/bench_box_kernel.py [--searches D1 D2] [--repeat 3]

Set KLTBENCH_DISABLE_NUMBA=1 to check that the numpy fallback is picked up.
"""

import argparse
import time

from kltbench import _kernels, bruteforce, diophantine


def best_of(fn, repeat):
    best, out = None, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--searches", nargs="+", default=list(diophantine.ENUM_SEARCHES))
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    backends = ["numpy"] + (["numba"] if _kernels.BACKEND == "numba" else [])
    if "numba" in backends:
        # compile outside the timed region
        bruteforce.oracle_search("D2", "numba")
    print(f"default backend: {_kernels.BACKEND}")
    print(f"{'search':8} {'route':8} {'seconds':>9} {'scanned':>12} {'solutions':>9}")
    for sid in args.searches:
        dt, res = best_of(lambda: diophantine.run_search(sid), args.repeat)
        print(f"{sid:8} {'dfs':8} {dt:9.3f} {res.scanned:12d} {len(res):9d}")
        for b in backends:
            dt, alt = best_of(lambda: bruteforce.oracle_search(sid, b), args.repeat)
            agree = "" if alt.solutions == res.solutions else "  MISMATCH"
            print(f"{sid:8} {b:8} {dt:9.3f} {alt.scanned:12d} {len(alt):9d}{agree}")


if __name__ == "__main__":
    main()
