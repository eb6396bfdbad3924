#!/usr/bin/env python3
"""Benchmark the compiled kernels against the numpy fallback.

Run from the repository root:

    python benchmarks/bench_kernels.py [--sizes 100000 1000000 10000000]

Prints one row per (kernel, size) with both backends and the speedup.  The
two backends are imported directly, so the comparison is independent of
which one the package selected at import time.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from multcorr._kernels import BACKEND, _py  # noqa: E402

try:
    from multcorr._kernels import _ckernels
except ImportError:
    _ckernels = None


def timed(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_spf(size):
    rows = []
    t_py, ref = timed(_py.spf_sieve, size)
    rows.append(("python", t_py))
    if _ckernels is not None:
        t_c, got = timed(_ckernels.spf_sieve, size)
        assert np.array_equal(ref, got)
        rows.append(("compiled", t_c))
    return rows


def _seeded(spf, delta=0.5):
    values = np.zeros(len(spf))
    values[1] = 1.0
    idx = np.arange(len(spf))
    for p in idx[2:][spf[2:] == idx[2:]]:
        p = int(p)
        pk = p
        while pk < len(spf):
            values[pk] = delta
            pk *= p
    return values


def bench_fill(size):
    spf = (_ckernels or _py).spf_sieve(size)
    seed = _seeded(spf)
    rows = []
    a = seed.copy()
    t_py, _ = timed(lambda: _py.fill_multiplicative(spf, a))
    rows.append(("python", t_py))
    if _ckernels is not None:
        b = seed.copy()
        t_c, _ = timed(lambda: _ckernels.fill_multiplicative(spf, b))
        assert np.array_equal(a, b)
        rows.append(("compiled", t_c))
    return rows


def bench_corr(size):
    rng = np.random.default_rng(0)
    v = rng.random(size + 2 * size + 3)
    half = size
    rows = []
    args = (1, half, 0, 1, v, 0, 1, v, 0, 2, v)
    t_py, ref = timed(lambda: _py.corr_inner3(*args))
    rows.append(("python", t_py))
    if _ckernels is not None:
        t_c, got = timed(lambda: _ckernels.corr_inner3(*args))
        assert abs(ref - got) < 1e-6 * max(1.0, abs(ref))
        rows.append(("compiled", t_c))
    return rows


BENCHES = {
    "spf_sieve": bench_spf,
    "fill_multiplicative": bench_fill,
    "corr_inner3": bench_corr,
}


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--sizes", type=int, nargs="+", default=[10**5, 10**6, 10**7])
    args = parser.parse_args()
    print(f"selected backend at import: {BACKEND}")
    if _ckernels is None:
        print("compiled extension not built; showing fallback only")
    print(f"{'kernel':<22}{'size':>10}  {'python':>10}  {'compiled':>10}  {'speedup':>8}")
    for name, bench in BENCHES.items():
        for size in args.sizes:
            rows = dict(bench(size))
            t_py = rows["python"]
            t_c = rows.get("compiled")
            speed = f"{t_py / t_c:8.1f}x" if t_c else "       -"
            t_c_s = f"{t_c:10.4f}" if t_c else "         -"
            print(f"{name:<22}{size:>10}  {t_py:10.4f}  {t_c_s}  {speed}")


if __name__ == "__main__":
    main()
