"""Timing comparison of the two root-search backends.

The compiled backend runs the candidate/refine/filter pipeline as a jitted
scalar loop with angle early-exit; the fallback evaluates the same pipeline
with batched numpy linear algebra.  The backend is chosen at import time
(PVSTAB_NO_NUMBA=1 forces the fallback), so each one is measured in a child
process and the parent prints the comparison table.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def _time(fn, repeat):
    fn()  # warm up (includes jit compilation on the compiled backend)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def run_workloads(repeat):
    from pvstab._kernels import backend_name
    from pvstab.scan import ScanSpec, scan_plane
    from pvstab.spectral import ModeProblem, classify_point, find_unstable_roots
    from pvstab.state import make_interface_state

    stable = make_interface_state(E1=0.4, Hv2=1.0, H3=1.0, epsilon=1e-6)
    unstable = make_interface_state(E1=0.8, Hv2=0.5, H3=1.0, epsilon=1e-6)
    single = ModeProblem(unstable, psi=0.0)
    spec = ScanSpec(H3=1.0, e1_points=12, h2_points=12)

    return backend_name(), {
        "single-angle root search": _time(
            lambda: find_unstable_roots(single), 50 * repeat),
        "classify unstable point (early exit)": _time(
            lambda: classify_point(unstable), 20 * repeat),
        "classify stable point (630 angles)": _time(
            lambda: classify_point(stable), 2 * repeat),
        "12x12 plane scan (1 thread)": _time(
            lambda: scan_plane(spec, threads=1), 1),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5,
                        help="repetition multiplier (default 5)")
    parser.add_argument("--child", action="store_true",
                        help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        backend, results = run_workloads(args.repeat)
        print(json.dumps({"backend": backend, "results": results}))
        return

    reports = {}
    for force_numpy in (False, True):
        env = dict(os.environ, PVSTAB_NO_NUMBA="1" if force_numpy else "0")
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--child",
             "--repeat", str(args.repeat)],
            capture_output=True, text=True, env=env, check=True)
        report = json.loads(proc.stdout)
        reports[report["backend"]] = report["results"]

    if len(reports) < 2:
        print("only one backend available:", ", ".join(reports))
        backend, results = next(iter(reports.items()))
        for name, seconds in results.items():
            print(f"{name:<40} {seconds * 1e3:10.2f} ms")
        return

    numba_results, numpy_results = reports["numba"], reports["numpy"]
    print(f"{'workload':<40} {'numba':>12} {'numpy':>12} {'speedup':>9}")
    for name in numba_results:
        a, b = numba_results[name], numpy_results[name]
        print(f"{name:<40} {a * 1e3:10.2f} ms {b * 1e3:10.2f} ms "
              f"{b / a:8.1f}x")


if __name__ == "__main__":
    main()
