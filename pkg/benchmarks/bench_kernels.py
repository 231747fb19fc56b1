"""Compare the numba and numpy batch-action kernels.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Both kernels evaluate ``a^g`` on every word of a given length in a rank-1
odometer (the inner loop of the depth-bounded cycline checks) and must agree
exactly; the script prints best-of-N wall times and the speedup.
"""

import argparse
import time

import numpy as np

from rankbs import _kernels
from rankbs.selfsim import make_odometer, make_product_of_odometers


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_case(label, ss, rows, gs, repeat):
    tables = _kernels.KernelTables(ss)
    if not _kernels.fits_int64(tables, int(np.abs(gs).max()), rows.shape[1]):
        print(f"{label}: skipped (int64 bound exceeded)")
        return
    # warm the JIT before timing
    _kernels.act_rows(tables, gs[:1], rows[:1], use_numba=True)
    out_nb = _kernels.act_rows(tables, gs, rows, use_numba=True)
    out_np = _kernels.act_rows(tables, gs, rows, use_numba=False)
    assert np.array_equal(out_nb[0], out_np[0]) and np.array_equal(out_nb[1], out_np[1])
    t_nb = best_time(lambda: _kernels.act_rows(tables, gs, rows, use_numba=True), repeat)
    t_np = best_time(lambda: _kernels.act_rows(tables, gs, rows, use_numba=False), repeat)
    print(f"{label:<34} rows={rows.shape[0]:>8} width={rows.shape[1]:>2}  "
          f"numba {t_nb * 1e3:8.2f} ms  numpy {t_np * 1e3:8.2f} ms  speedup {t_np / t_nb:5.1f}x")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    print(f"numba enabled by default: {_kernels.USE_NUMBA}")

    for n, m, depth in ((2, 3, 16), (3, 5, 10), (6, 12, 7)):
        ss = make_odometer(n, m)
        rows = _kernels.rank1_rows(n, depth)
        gs = rng.integers(-50, 51, size=rows.shape[0])
        bench_case(f"E({n},{m}) all words, depth {depth}", ss, rows, gs, args.repeat)

    ss = make_product_of_odometers((2, 3))
    tables = _kernels.KernelTables(ss)
    width = 12
    rows = rng.integers(0, 2, size=(200_000, width))
    rows[:, width // 2:] = rng.integers(0, 3, size=(200_000, width - width // 2)) + tables.offsets[1]
    gs = rng.integers(-50, 51, size=rows.shape[0])
    bench_case("Lambda_d((2,3),1) degree (6,6)", ss, rows, gs, args.repeat)


if __name__ == "__main__":
    main()
