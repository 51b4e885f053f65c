"""Compare the compiled and NumPy likelihood kernels.

Run ``python benchmarks/bench_kernels.py``. Reports the time of one
negative log-likelihood evaluation at several sample sizes and of a full
BEGLED simplex run on the UEFA data, for each available backend.
"""

from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from moglib import _backend
from moglib.begled import BegledParams, sample_begled
from moglib.datasets import load_uefa
from moglib.estimation import partition_sample
from moglib.numerics import RandomStream

TRUTH = BegledParams(1.5, 0.5, 0.7, 0.8, 1.2, 1.3)


def _backends():
    out = {"python": _backend.get("python")}
    try:
        out["compiled"] = _backend.get("compiled")
    except ImportError:
        print("compiled extension not built; timing the NumPy kernel only")
    return out


def _best(fn, number):
    return min(timeit.repeat(fn, number=number, repeat=5)) / number


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", type=int, nargs="+", default=[37, 200, 1000, 10000])
    args = ap.parse_args(argv)
    kernels = _backends()
    params = np.array(TRUTH.as_tuple())

    print(f"{'n':>7} " + " ".join(f"{k + ' (us)':>15}" for k in kernels) + "  speedup")
    for n in args.sizes:
        s = partition_sample(sample_begled(TRUTH, n, RandomStream(1, n)))
        times = {}
        for name, k in kernels.items():
            times[name] = _best(lambda k=k: k.negloglik_bivariate(params, s.x1, s.x2, s.region), 200) * 1e6
        sp = times["python"] / times["compiled"] if "compiled" in times else math.nan
        print(f"{n:>7} " + " ".join(f"{t:>15.2f}" for t in times.values()) + f"  {sp:7.1f}x")

    s = partition_sample(load_uefa().pairs)
    z0 = np.log([2.0, 0.01, 2e-4, 0.25, 0.09, 0.22])
    free = np.arange(6)
    fixed = np.ones(6)
    zl, zh = math.log(1e-8), math.log(1e8)
    print("\nBEGLED simplex on UEFA (one run from a fixed start)")
    for name, k in kernels.items():
        run = lambda k=k: k.fit_simplex(0, z0, free, fixed, s.x1, s.x2, s.region, 0.5, 1e-8, 1e-12, 20000, zl, zh)  # noqa: E731
        z, fun, it, nfev, reason = run()
        t = _best(run, 3)
        print(f"  {name:>9}: {t * 1e3:8.2f} ms, -L={fun:.6f}, {it} iterations, {nfev} evaluations")


if __name__ == "__main__":
    main()
