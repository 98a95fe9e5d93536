"""Time the compiled kernels against the NumPy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from teamlab import kernels


def payoff_case(rng, nx, ny, nu, npol):
    mu = rng.dirichlet(np.ones(nx * ny * ny)).reshape(nx, ny, ny)
    cost = rng.uniform(-1, 1, size=(nx, nu, nu))
    rows = rng.integers(0, nu, size=(npol, ny))
    cols = rng.integers(0, nu, size=(npol, ny))
    return mu, cost, rows, cols


def push_case(rng, nx, n_in, n_out, ng):
    mu = rng.dirichlet(np.ones(nx * n_in)).reshape(nx, n_in)
    maps = rng.integers(0, n_out, size=(ng, n_in))
    return mu, maps, n_out


CASES = [
    ("payoff_matrix", "3x4x4, 256 x 256 policies", kernels.payoff_matrix, lambda r: payoff_case(r, 3, 4, 4, 256)),
    ("payoff_matrix", "3x8x8, 512 x 512 policies", kernels.payoff_matrix, lambda r: payoff_case(r, 3, 8, 8, 512)),
    ("pushforward", "3x16 -> 16, 4096 maps", kernels.pushforward, lambda r: push_case(r, 3, 16, 16, 4096)),
    ("pushforward", "3x64 -> 64, 16384 maps", kernels.pushforward, lambda r: push_case(r, 3, 64, 64, 16384)),
]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    backends = ["python"]
    try:
        from teamlab import _ckernels  # noqa: F401

        backends.append("cython")
    except ImportError:
        print("compiled extension not built; timing the NumPy path only")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<14} {'case':<28} " + " ".join(f"{b:>12}" for b in backends) + "   speedup")
    for name, label, fn, make in CASES:
        case = make(rng)
        times = []
        for b in backends:
            fn(*case, backend=b)  # warm-up
            times.append(min(timeit.repeat(lambda: fn(*case, backend=b), number=1, repeat=args.repeat)))
        if len(times) == 2:
            ref = fn(*case, backend="python")
            assert np.allclose(ref, fn(*case, backend="cython"), atol=1e-12)
        speed = f"{times[0] / times[1]:8.2f}x" if len(times) == 2 else ""
        print(f"{name:<14} {label:<28} " + " ".join(f"{t * 1e3:10.2f}ms" for t in times) + f"  {speed}")


if __name__ == "__main__":
    main()
