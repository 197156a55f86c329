"""Timing comparison of the compiled and pure-python eigensolver kernels.

Both backends run the same cyclic sweep algorithm on the same matrices, so
this measures implementation overhead only.  Usage:

    python3 benchmarks/bench_jacobi.py --sizes 8,16,32,64 --repeats 5
"""

import argparse
import time

import numpy as np

from qshare import _jacobi_py, qmath

try:
    from qshare import _jacobi

    HAVE_COMPILED = True
except ImportError:
    HAVE_COMPILED = False


def run_kernel(kernel, h, off_tol):
    a = np.array(h, dtype=np.complex128, order="C")
    v = np.eye(a.shape[0], dtype=np.complex128)
    start = time.perf_counter()
    sweeps = kernel.cyclic_jacobi(a, v, off_tol, qmath.JACOBI_MAX_SWEEPS)
    elapsed = time.perf_counter() - start
    if sweeps < 0:
        raise RuntimeError("kernel did not converge")
    return elapsed


def bench(sizes, repeats, seed):
    rng = np.random.default_rng(seed)
    print(f"selected backend: {qmath.JACOBI_BACKEND}")
    if not HAVE_COMPILED:
        print("compiled kernel unavailable; timing the python kernel only")
    header = f"{'n':>5} {'python (ms)':>14}"
    if HAVE_COMPILED:
        header += f" {'compiled (ms)':>14} {'speedup':>9}"
    print(header)
    for n in sizes:
        m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        h = (m + m.conj().T) / 2.0
        off_tol = qmath.JACOBI_OFF_THRESHOLD * max(1.0, float(np.linalg.norm(h)))

        t_py = min(run_kernel(_jacobi_py, h, off_tol) for _ in range(repeats))
        row = f"{n:>5} {t_py * 1e3:>14.3f}"
        if HAVE_COMPILED:
            t_cy = min(run_kernel(_jacobi, h, off_tol) for _ in range(repeats))
            row += f" {t_cy * 1e3:>14.3f} {t_py / t_cy:>8.1f}x"
        print(row)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="4,8,16,32,64")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]
    bench(sizes, args.repeats, args.seed)


if __name__ == "__main__":
    main()
