"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--nmax 100]

Kernel timings call both implementations directly. The end-to-end timing runs
a Table 2 row in a subprocess once per backend (BELLOPT_PURE_PYTHON toggles).
"""
import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from bellopt import _pykernels

try:
    from bellopt import _ckernels
except ImportError:
    _ckernels = None

END_TO_END = "from bellopt import scan; scan.table2(25, Ls=(2, 3), tol=1e-4)"


def best(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def end_to_end(pure):
    env = dict(os.environ, BELLOPT_PURE_PYTHON="1" if pure else "0")
    code = f"import time; t=time.perf_counter(); {END_TO_END}; print(time.perf_counter()-t)"
    out = subprocess.run([sys.executable, "-c", code], env=env, check=True, capture_output=True, text=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--nmax", type=int, default=100)
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args(argv)

    rng = np.random.default_rng(0)
    n = args.nmax + 1
    probs = np.ascontiguousarray(rng.random((n, n)))
    fa, fb = rng.random(n), rng.random(n)
    cases = [
        (f"rotation_matrices(nmax={args.nmax})", lambda m: m.rotation_matrices(args.nmax, 0.37), 3),
        (f"distance_sum({n}x{n})", lambda m: m.distance_sum(probs, fa, fb), 200),
    ]

    print(f"{'kernel':<28}{'numpy [ms]':>12}{'cython [ms]':>13}{'speedup':>9}")
    for name, call, number in cases:
        t_py = best(lambda: call(_pykernels), args.repeat, number) * 1e3
        if _ckernels is None:
            print(f"{name:<28}{t_py:>12.3f}{'n/a':>13}{'':>9}")
            continue
        t_c = best(lambda: call(_ckernels), args.repeat, number) * 1e3
        print(f"{name:<28}{t_py:>12.3f}{t_c:>13.3f}{t_py / t_c:>8.1f}x")

    if not args.skip_end_to_end:
        t_py = end_to_end(pure=True)
        line = f"{'table2 rows L=2,3':<28}{t_py * 1e3:>12.0f}"
        if _ckernels is not None:
            t_c = end_to_end(pure=False)
            line += f"{t_c * 1e3:>13.0f}{t_py / t_c:>8.1f}x"
        print(line)


if __name__ == "__main__":
    main()
