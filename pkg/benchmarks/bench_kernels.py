"""Compare the compiled and NumPy kernel backends.

Times the hot kernel (the two per-record likelihood sums) across sizes and
baseline kinds, then times complete maximum-likelihood fits with each backend
on identical data. Run from the repository root:

    python3 benchmarks/bench_kernels.py [--sizes 1000,10000,100000] [--repeats 7]
"""

import argparse
import math
import time

import numpy as np

from bvf import BaselineKind, BvfParams, fit_mle
from bvf._kernels import GOMPERTZ, LOMAX, WEIBULL, available_backends, get_backend, use_backend
from bvf.bvf_model import sample
from bvf.data_model import from_bivariate

CAPTION = {
    BaselineKind.WEIBULL: BvfParams(BaselineKind.WEIBULL, 1.34, 1.17, 0.86, 0.91),
    BaselineKind.GOMPERTZ: BvfParams(BaselineKind.GOMPERTZ, 1.13, 0.96, 0.79, 1.05),
    BaselineKind.LOMAX: BvfParams(BaselineKind.LOMAX, 0.85, 0.57, 0.74, 0.69),
}
KIND_CODE = {
    BaselineKind.WEIBULL: WEIBULL,
    BaselineKind.GOMPERTZ: GOMPERTZ,
    BaselineKind.LOMAX: LOMAX,
}


def _kernel_inputs(kind, n, rng):
    t = np.sort(np.min(sample(CAPTION[kind], n, rng), axis=1))
    x_all = np.log(t) if kind is BaselineKind.WEIBULL else t
    x_unc = x_all[: int(0.8 * n)].copy()
    return np.ascontiguousarray(x_all), np.ascontiguousarray(x_unc)


def _best_time(fn, repeats, inner):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, (time.perf_counter() - t0) / inner)
    return best


def bench_kernel(sizes, repeats):
    rng = np.random.default_rng(1)
    names = available_backends()
    print("kernel microbenchmark: lehmann_sums, ns per record (best of "
          f"{repeats} runs)")
    header = f"{'kind':<9} {'n':>8} " + " ".join(f"{b:>10}" for b in names)
    if len(names) == 2:
        header += f" {'speedup':>8}"
    print(header)
    for kind in CAPTION:
        code = KIND_CODE[kind]
        for n in sizes:
            x_all, x_unc = _kernel_inputs(kind, n, rng)
            lam = CAPTION[kind].lam
            inner = max(1, int(2e5 / n))
            row = {}
            for backend in names:
                fn = get_backend(backend).lehmann_sums
                row[backend] = _best_time(
                    lambda: fn(code, lam, x_all, x_unc), repeats, inner
                )
            cells = " ".join(f"{row[b] / n * 1e9:>10.2f}" for b in names)
            line = f"{kind.value:<9} {n:>8} {cells}"
            if len(names) == 2:
                line += f" {row['python'] / row['cython']:>7.2f}x"
            print(line)


def bench_fit(sizes, repeats):
    rng = np.random.default_rng(2)
    names = available_backends()
    print("\nfull fit comparison: fit_mle on one dataset, ms per fit")
    print(f"{'kind':<9} {'n':>8} " + " ".join(f"{b:>10}" for b in names)
          + (f" {'speedup':>8}" if len(names) == 2 else ""))
    for kind, params in CAPTION.items():
        for n in sizes:
            data = from_bivariate(sample(params, n, rng))
            inner = max(1, int(2000 / max(n, 100)))
            timings = {}
            logliks = {}
            for backend in names:
                previous = use_backend(backend)
                try:
                    timings[backend] = _best_time(
                        lambda: fit_mle(data, kind), repeats, inner
                    )
                    logliks[backend] = fit_mle(data, kind).loglik_max
                finally:
                    use_backend(previous)
            values = list(logliks.values())
            agree = all(abs(v - values[0]) <= 1e-9 * abs(values[0]) for v in values)
            line = f"{kind.value:<9} {n:>8} " + " ".join(
                f"{timings[b] * 1e3:>10.2f}" for b in names
            )
            if len(names) == 2:
                line += f" {timings['python'] / timings['cython']:>7.2f}x"
            if not agree:
                line += "  LOGLIK MISMATCH " + repr(logliks)
            print(line)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="200,1000,10000,100000")
    parser.add_argument("--repeats", type=int, default=7)
    parser.add_argument("--fit-sizes", default="200,2000,20000")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",") if s.strip()]
    fit_sizes = [int(s) for s in args.fit_sizes.split(",") if s.strip()]
    backends = available_backends()
    print(f"available backends: {', '.join(backends)}")
    if "cython" not in backends:
        print("note: compiled backend missing; showing the NumPy fallback only")
    bench_kernel(sizes, args.repeats)
    bench_fit(fit_sizes, args.repeats)


if __name__ == "__main__":
    main()
