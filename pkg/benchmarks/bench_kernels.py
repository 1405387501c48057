"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--n 2097152] [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from eepn_lab import _fallback

try:
    from eepn_lab import _kernels
except ImportError:
    _kernels = None


def cases(n: int):
    rng = np.random.default_rng(0)
    x = np.cumsum(rng.normal(0, 3.2e-3, n))
    centers = np.arange(2000, n - 2000, 501)
    delays = np.round(np.linspace(-1219, 1219, 501)).astype(np.int64)
    ref = np.zeros(centers.size)
    yield "moving_moments w=2438", lambda impl: impl.moving_moments(x, 2438)
    yield "moving_moments w=31", lambda impl: impl.moving_moments(x, 31)
    yield f"gather_sq_dev {centers.size}x501", lambda impl: impl.gather_sq_dev(x, centers, delays, ref)


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2**21)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    impls = [("python", _fallback)] + ([("cython", _kernels)] if _kernels is not None else [])
    print(f"n = {args.n}, best of {args.repeat}")
    print(f"{'case':<28}" + "".join(f"{name:>12}" for name, _ in impls) + "     speedup")
    for label, run in cases(args.n):
        best = [min(timeit.repeat(lambda: run(impl), number=1, repeat=args.repeat)) for _, impl in impls]
        row = f"{label:<28}" + "".join(f"{t * 1e3:>10.1f}ms" for t in best)
        if len(best) == 2:
            row += f"{best[0] / best[1]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
