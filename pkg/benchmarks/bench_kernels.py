"""Time the series kernels and a few end-to-end products on both backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Large matrix products go to BLAS on either backend (see
``kernels.MATMUL_BLAS_THRESHOLD``), so only small ones show the compiled loop.
The cython backend is skipped with a note when the extension is not built.
"""
import argparse
import timeit

import numpy as np

from qtwist import kernels, mq2, qplane
from qtwist.cg import cg_matrix
from qtwist.hseries import session


def workloads(rng):
    a = rng.standard_normal((8, 64, 64))
    b = rng.standard_normal((8, 64, 64))
    s = rng.standard_normal((8, 4096))
    t = rng.standard_normal((8, 4096))
    p = qplane.random_plane_poly(rng, 6, 8)
    r = qplane.random_plane_poly(rng, 6, 8)
    u = mq2.random_mq2_poly(rng, 4, 8)
    v = mq2.random_mq2_poly(rng, 4, 8)
    small_a = rng.standard_normal((8, 6, 6))
    small_b = rng.standard_normal((8, 6, 6))
    return {
        "series_matmul 6x6": lambda: kernels.series_matmul(small_a, small_b),
        "series_matmul 64x64": lambda: kernels.series_matmul(a, b),
        "series_mul 4096": lambda: kernels.series_mul(s, t),
        "series_inv": lambda: kernels.series_inv(s[:, 0] + 2.0),
        "star_plane deg<=6": lambda: qplane.star_plane(p, r),
        "mul_minkowski deg<=4": lambda: mq2.mul_minkowski(u, v),
        "star_minkowski deg<=4": lambda: mq2.star_minkowski(u, v),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    backends = ["python"]
    try:
        kernels.use_backend("cython")
        backends.append("cython")
    except ImportError:
        print("cython extension not built; timing the python backend only")

    # warm the table caches so only the products are timed
    with session(order=8):
        for t1 in range(7):
            for t2 in range(7):
                if t1 and t2:
                    cg_matrix(t1, t2, True, 8)
                    cg_matrix(t1, t2, False, 8)

    results = {}
    for name in backends:
        kernels.use_backend(name)
        rng = np.random.default_rng(0)
        with session(order=8):
            for label, fn in workloads(rng).items():
                fn()
                best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
                results.setdefault(label, {})[name] = best

    print(f"{'workload':<26}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) == 2 else ""))
    for label, row in results.items():
        line = f"{label:<26}" + "".join(f"{row[b] * 1e3:10.2f}ms" for b in backends)
        if len(backends) == 2:
            line += f"{row['python'] / row['cython']:11.1f}x"
        print(line)


if __name__ == "__main__":
    main()
