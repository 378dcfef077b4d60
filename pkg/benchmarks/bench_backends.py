"""Timing comparison of the numba and numpy kernel backends.

Usage: python3 benchmarks/bench_backends.py [--res N] [--budget N]

Each case runs twice per backend; the first run is reported as warmup and
absorbs JIT compilation.  A consistency line counts fate-code disagreements
between the two backends on the parameter grid.
"""

import argparse
import os
import time

import numpy as np

from cubq import backend, rays
from cubq.core import CubicMap

GOLDEN = complex(np.exp(2j * np.pi * ((5 ** 0.5 - 1) / 2)))


def _grid(res):
    xs = np.linspace(-2.5, 2.5, res)
    return (xs[None, :] + 1j * xs[:, None]).ravel()


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    warm = time.perf_counter() - t0
    t0 = time.perf_counter()
    out = fn()
    return warm, time.perf_counter() - t0, out


def run(res, budget):
    bs = _grid(res)
    f = CubicMap(0.6, 2 + 0.7j)
    cases = {
        "orbit_fates %dx%d" % (res, res):
            lambda: backend.orbit_fates(GOLDEN, bs, budget, 64),
        "immediate_component 256^2":
            lambda: backend.immediate_component(
                0.6, 2 + 0.7j, 0j, 1e-3, (-2, -2, 2, 2), (256, 256), budget),
        "trace_periodic_rays p<=3":
            lambda: rays.trace_periodic_rays(f, 3),
    }
    results = {}
    fates_by_backend = {}
    for name in ("numba", "numpy"):
        try:
            backend.set_backend(name)
        except RuntimeError as exc:
            print("%-8s unavailable: %s" % (name, exc))
            continue
        for label, fn in cases.items():
            warm, best, out = _timed(fn)
            results[(name, label)] = (warm, best)
            if label.startswith("orbit_fates"):
                fates_by_backend[name] = out[0]
            print("%-8s %-28s warmup %8.3fs   run %8.3fs"
                  % (name, label, warm, best))
    backend.set_backend(os.environ.get("CUBQ_BACKEND", "auto").lower())

    for label in cases:
        a = results.get(("numba", label))
        b = results.get(("numpy", label))
        if a and b:
            print("speedup %-28s %6.1fx" % (label, b[1] / max(a[1], 1e-9)))
    if len(fates_by_backend) == 2:
        diff = int((fates_by_backend["numba"]
                    != fates_by_backend["numpy"]).sum())
        total = fates_by_backend["numba"].size
        print("fate-code disagreements: %d of %d (%.4f%%)"
              % (diff, total, 100.0 * diff / total))


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--res", type=int, default=96)
    ap.add_argument("--budget", type=int, default=2048)
    args = ap.parse_args()
    run(args.res, args.budget)


if __name__ == "__main__":
    main()
