"""Time the numba and numpy paths of the displaced-moment kernel.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--dims 41,81,161]

Both paths are called directly, so the env flag is not needed here. The
first numba call (JIT compile or cache load) is timed separately.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from cvbench import kernels
from cvbench._accel import NUMBA_AVAILABLE
from cvbench.wigner import PhaseGrid


def _inputs(dim, grid_points):
    rng = np.random.default_rng(dim)
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    psi /= np.linalg.norm(psi)
    weights = psi * (-1.0) ** np.arange(psi.size)
    g = PhaseGrid.square(7.0, grid_points)
    xx, pp = np.meshgrid(g.xs, g.ps, indexing="ij")
    betas = (np.sqrt(2.0) * (xx + 1j * pp)).ravel()
    lower, upper = kernels._pair_tables(psi, weights)
    return (lower, upper, *kernels._recurrence_tables(psi.size), betas)


def _best(func, args, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = func(*args)
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--dims", default="41,81,161")
    ap.add_argument("--grid-points", type=int, default=201)
    args = ap.parse_args(argv)

    if NUMBA_AVAILABLE:
        warm = _inputs(9, 33)
        t0 = time.perf_counter()
        kernels._displaced_moments_numba(*warm)
        print(f"numba first call (compile/cache load): {time.perf_counter() - t0:.3f} s")
    else:
        print("numba not installed; timing the numpy path only")

    print(f"{'dim':>5} {'points':>7} {'numpy s':>9} {'numba s':>9} {'speedup':>8} {'max |diff|':>11}")
    for dim in (int(d) for d in args.dims.split(",")):
        inputs = _inputs(dim, args.grid_points)
        t_np, ref = _best(kernels._displaced_moments_numpy, inputs, args.repeat)
        if NUMBA_AVAILABLE:
            t_nb, out = _best(kernels._displaced_moments_numba, inputs, args.repeat)
            diff = float(np.max(np.abs(out - ref)))
            print(f"{dim:5d} {inputs[-1].size:7d} {t_np:9.3f} {t_nb:9.3f} {t_np / t_nb:8.2f} {diff:11.2e}")
        else:
            print(f"{dim:5d} {inputs[-1].size:7d} {t_np:9.3f} {'-':>9} {'-':>8} {'-':>11}")


if __name__ == "__main__":
    main()
