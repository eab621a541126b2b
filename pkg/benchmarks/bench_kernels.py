"""Time the simplex hot kernels: numba jit against the pure-numpy path.

Both implementations live in crewroute.milp._kernels and must agree to the
bit; this script checks that on random data, then reports per-call times.

    python3 benchmarks/bench_kernels.py --sizes 50 200 800 --reps 200
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from crewroute.milp import _kernels as K


def _eta_inputs(rng: np.random.Generator, m: int):
    binv = rng.standard_normal((m, m))
    w = rng.standard_normal(m)
    w[rng.random(m) < 0.6] = 0.0
    r = int(rng.integers(0, m))
    w[r] = 0.5 + abs(w[r])
    return binv, w, r


def _ratio_inputs(rng: np.random.Generator, m: int):
    xb = np.abs(rng.standard_normal(m))
    w = rng.standard_normal(m)
    w[rng.random(m) < 0.3] = 0.0
    ub = np.full(m, np.inf)
    finite = rng.random(m) < 0.4
    ub[finite] = xb[finite] + np.abs(rng.standard_normal(finite.sum())) + 0.1
    basis = rng.permutation(m).astype(np.int64)
    return xb, w, ub, basis


def check_agreement(rng: np.random.Generator, m: int) -> float:
    """Largest |difference| between the two paths over a few random calls."""
    worst = 0.0
    for _ in range(20):
        binv, w, r = _eta_inputs(rng, m)
        a, b = binv.copy(), binv.copy()
        K.eta_update_numpy(a, w, r)
        K.eta_update_numba(b, w, r)
        worst = max(worst, float(np.max(np.abs(a - b))))

        xb, w, ub, basis = _ratio_inputs(rng, m)
        got_np = K.ratio_test_numpy(xb, w, ub, basis, 1e-9)
        got_nb = K.ratio_test_numba(xb, w, ub, basis, 1e-9)
        assert got_np[1] == got_nb[1] and got_np[2] == got_nb[2]
        worst = max(worst, abs(got_np[0] - got_nb[0]))
    return worst


def bench_eta(fn, rng: np.random.Generator, m: int, reps: int) -> float:
    binv, w, r = _eta_inputs(rng, m)
    copies = [binv.copy() for _ in range(reps)]
    t0 = time.perf_counter()
    for b in copies:
        fn(b, w, r)
    return (time.perf_counter() - t0) / reps


def bench_ratio(fn, rng: np.random.Generator, m: int, reps: int) -> float:
    args = _ratio_inputs(rng, m)
    t0 = time.perf_counter()
    for _ in range(reps):
        fn(*args, 1e-9)
    return (time.perf_counter() - t0) / reps


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[50, 200, 800])
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    if not K.NUMBA_AVAILABLE:
        print("numba is not importable; only the numpy path exists here")

    rng = np.random.default_rng(args.seed)
    if K.NUMBA_AVAILABLE:
        K.warmup()
        worst = check_agreement(rng, max(args.sizes))
        print(f"max |numpy - numba| over random calls: {worst:.3e}")
        assert worst <= 1e-12

    header = f"{'kernel':<12}{'m':>6}{'numpy ms':>12}{'numba ms':>12}{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for m in args.sizes:
        for name, np_fn, nb_fn, bench in (
            ("eta_update", K.eta_update_numpy, K.eta_update_numba, bench_eta),
            ("ratio_test", K.ratio_test_numpy, K.ratio_test_numba, bench_ratio),
        ):
            t_np = bench(np_fn, rng, m, args.reps) * 1e3
            if nb_fn is None:
                print(f"{name:<12}{m:>6}{t_np:>12.4f}{'n/a':>12}{'n/a':>10}")
                continue
            t_nb = bench(nb_fn, rng, m, args.reps) * 1e3
            print(f"{name:<12}{m:>6}{t_np:>12.4f}{t_nb:>12.4f}"
                  f"{t_np / t_nb:>10.2f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
