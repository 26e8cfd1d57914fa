"""Time the numba and numpy variants of each hot kernel side by side.

    python3 benchmarks/bench_kernels.py --sizes 500 1000 2000 --repeat 3

The first numba call compiles (or loads the on-disk cache), so every
kernel is warmed up on a tiny input before timing.
"""

import argparse
import timeit

import numpy as np

from latentfuse import _accel, _kernels
from latentfuse.kernels import adaptive_scales


def cases(n, dim, rank, rng):
    a = rng.standard_normal((n, dim))
    d2 = _kernels.sq_dists_np(a)
    eps = adaptive_scales(d2, min(16, n - 1))
    factors = rng.standard_normal((n, dim, rank))
    return {
        "sq_dists": (_kernels.sq_dists_nb, _kernels.sq_dists_np, (a,)),
        "gaussian": (_kernels.gaussian_nb, _kernels.gaussian_np, (d2, eps)),
        "one_sided_forms": (_kernels.one_sided_forms_nb, _kernels.one_sided_forms_np, (a, factors)),
    }


def best_of(func, args, repeat):
    return min(timeit.repeat(lambda: func(*args), number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", type=int, nargs="+", default=[500, 1000, 2000, 3000])
    parser.add_argument("--dim", type=int, default=3, help="sample dimension (3 for tori, 256 for lag maps)")
    parser.add_argument("--rank", type=int, default=2, help="pseudo-inverse rank for the Mahalanobis kernel")
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--threads", type=int, default=None)
    args = parser.parse_args(argv)

    if not _accel.NUMBA_AVAILABLE:
        parser.exit(1, "numba is not installed; nothing to compare\n")
    _accel.set_threads(args.threads)
    rng = np.random.default_rng(0)
    for nb, _, inputs in cases(8, args.dim, args.rank, rng).values():
        nb(*inputs)

    print(f"dim={args.dim} rank={args.rank} threads={_accel.numba.get_num_threads()} best of {args.repeat}")
    print(f"{'kernel':<16} {'N':>6} {'numba s':>10} {'numpy s':>10} {'speedup':>8} {'max diff':>10}")
    for n in args.sizes:
        for name, (nb, npy, inputs) in cases(n, args.dim, args.rank, rng).items():
            diff = np.max(np.abs(nb(*inputs) - npy(*inputs)))
            t_nb, t_np = best_of(nb, inputs, args.repeat), best_of(npy, inputs, args.repeat)
            print(f"{name:<16} {n:>6} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>7.2f}x {diff:>10.1e}")


if __name__ == "__main__":
    main()
