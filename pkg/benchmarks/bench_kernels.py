"""Compiled kernels against the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``; prints one line per
kernel with the time per call of each backend and the speed-up.
"""

import argparse
import timeit

import numpy as np

from dswlab import _kernels_py as py

try:
    from dswlab import _kernels as cy
except ImportError:
    cy = None


def _cases(n):
    rng = np.random.default_rng(0)
    c = lambda: np.ascontiguousarray(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    e, v, q, nv, na, nb, nc, f1, f2, f3 = (c() for _ in range(10))
    out = np.empty(n, dtype=complex)
    coeffs = rng.standard_normal(129) * 0.5 ** np.arange(129)
    x = np.ascontiguousarray(np.linspace(-1, 1, n))
    z = np.ascontiguousarray(np.linspace(-0.5, 0.5, 2000))
    return {
        "etd_stage": lambda m: m.etd_stage(e, v, q, nv, out),
        "etd_stage_c": lambda m: m.etd_stage_c(e, v, q, nb, nv, out),
        "etd_final": lambda m: m.etd_final(e, v, nv, na, nb, nc, f1, f2, f3, out),
        "clenshaw": lambda m: m.clenshaw(coeffs, x),
        "theta_sums": lambda m: m.theta_sums(z, 0.3, 8, False),
    }


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--n", type=int, default=16385, help="vector length (rfft size)")
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    if cy is None:
        print("compiled extension not built; only the numpy fallback is available")
    print(f"{'kernel':<12} {'python [us]':>12} {'cython [us]':>12} {'speed-up':>9}")
    for name, fn in _cases(args.n).items():
        tp = min(timeit.repeat(lambda: fn(py), number=20, repeat=args.repeat)) / 20
        if cy is not None:
            tc = min(timeit.repeat(lambda: fn(cy), number=20, repeat=args.repeat)) / 20
            print(f"{name:<12} {tp * 1e6:12.1f} {tc * 1e6:12.1f} {tp / tc:9.2f}")
        else:
            print(f"{name:<12} {tp * 1e6:12.1f} {'-':>12} {'-':>9}")


if __name__ == "__main__":
    main()
