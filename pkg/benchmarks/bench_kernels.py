"""Compare the compiled kernels with the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from phononblockade import kernels
from phononblockade.analytic import amplitude_generator
from phononblockade.core import Truncation
from phononblockade.model import SystemParams, build_heff, collapse_channels


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def cases(dims):
    sp = SystemParams(delta_p=0.3, n_th=0.1)
    h = build_heff(sp, dims).data
    chans = collapse_channels(sp, dims)
    jumps = [c.operator.data for c in chans]
    rates = np.array([c.rate for c in chans])
    m = kernels.get_module("python").liouvillian_matrix(h, jumps, rates)
    a, b = amplitude_generator(sp)
    y0 = np.zeros(a.shape[0], dtype=complex)
    return {
        "liouvillian_matrix": lambda mod: mod.liouvillian_matrix(h, jumps, rates),
        "hermitian_generator": lambda mod: mod.hermitian_generator(m, dims.dim),
        "rk4_affine(10^5 steps)": lambda mod: mod.rk4_affine(a, b, y0, 1e-3, 100_000),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if "compiled" not in kernels.AVAILABLE:
        print("compiled extension not built; run: python setup.py build_ext --inplace")
    print(f"{'kernel':28s} {'dims':>8s} {'python [s]':>11s} {'compiled [s]':>13s} {'speedup':>8s}")
    for dims in (Truncation(3, 8), Truncation(4, 10)):
        for name, fn in cases(dims).items():
            t_py = best_of(lambda: fn(kernels.get_module("python")), args.repeat)
            if "compiled" in kernels.AVAILABLE:
                t_c = best_of(lambda: fn(kernels.get_module("compiled")), args.repeat)
                print(f"{name:28s} {dims.n_a}x{dims.n_b:<6d} {t_py:11.4f} {t_c:13.4f} {t_py / t_c:8.1f}")
            else:
                print(f"{name:28s} {dims.n_a}x{dims.n_b:<6d} {t_py:11.4f} {'-':>13s}")


if __name__ == "__main__":
    main()
