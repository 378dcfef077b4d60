"""Kernel backend selection.

Two interchangeable kernel sets implement the same contracts: a numba JIT set
(per-seed scalar loops, the default) and a pure-numpy set (lockstep array
sweeps).  CUBQ_BACKEND=numpy forces the fallback; CUBQ_BACKEND=numba demands
the JIT set and fails loudly if numba is unusable.  Anything else tries numba
first and falls back silently.

All consumers go through the wrappers below so the choice is a single switch.
"""

import os
import warnings

import numpy as np

from . import _kernels_numpy

_IMPL = None
_NAME = ""


def _load(name):
    if name == "numpy":
        return _kernels_numpy, "numpy"
    try:
        from . import _kernels_numba
        return _kernels_numba, "numba"
    except ImportError as exc:
        if name == "numba":
            raise RuntimeError(f"numba backend requested but unavailable: {exc}")
        warnings.warn(f"numba unavailable ({exc}); using numpy kernels")
        return _kernels_numpy, "numpy"


def set_backend(name):
    """Switch kernel implementations; name in {'numba', 'numpy', 'auto'}."""
    global _IMPL, _NAME
    _IMPL, _NAME = _load(name)


def get_backend():
    return _NAME


set_backend(os.environ.get("CUBQ_BACKEND", "auto").lower())


def orbit_fates(lam, bs, budget, tail_skip=0):
    """Per-parameter fates of both critical orbits; see kernel docstrings."""
    bs = np.ascontiguousarray(bs, dtype=np.complex128).ravel()
    return _IMPL.orbit_fates(complex(lam), bs, int(budget), int(tail_skip))


def tail_rotation(lam, bs, budget, tail_len):
    """Winding rate of both critical orbit tails about 0, in turns mod 1."""
    bs = np.ascontiguousarray(bs, dtype=np.complex128).ravel()
    return _IMPL.tail_rotation(complex(lam), bs, int(budget), int(tail_len))


def target_grid(lam, b, p, delta, window, resolution, budget):
    x0, y0, x1, y1 = window
    nx, ny = resolution
    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    return _IMPL.target_grid(complex(lam), complex(b), complex(p), float(delta),
                             x0, y0, dx, dy, nx, ny, int(budget))


def immediate_component(lam, b, p, delta, window, resolution, budget,
                        stops=(None, None), early_stop=False):
    """Lazy flood of the raster immediate basin of p.

    stops are up to two points of interest; returns (member mask, found flags)
    where a found flag means the point's cell was certified a member.
    """
    x0, y0, x1, y1 = window
    nx, ny = resolution
    dx = (x1 - x0) / nx
    dy = (y1 - y0) / ny
    cells = []
    inside = []
    for s in stops:
        if s is None:
            cells.append((-9, -9))
            inside.append(False)
            continue
        cx = int(np.floor((s.real - x0) / dx))
        cy = int(np.floor((s.imag - y0) / dy))
        if 0 <= cx < nx and 0 <= cy < ny:
            cells.append((cx, cy))
            inside.append(True)
        else:
            cells.append((-9, -9))
            inside.append(False)
    status, f1, f2 = _IMPL.immediate_component(
        complex(lam), complex(b), complex(p), float(delta),
        x0, y0, dx, dy, nx, ny, int(budget),
        cells[0][0], cells[0][1], cells[1][0], cells[1][1], bool(early_stop))
    return status == 1, (bool(f1) and inside[0], bool(f2) and inside[1])


def point_fates_zero(lam, b, seeds, budget, delta):
    seeds = np.ascontiguousarray(seeds, dtype=np.complex128).ravel()
    return _IMPL.point_fates_zero(complex(lam), complex(b), seeds,
                                  int(budget), float(delta))


def trace_rays_batch(lam, b, nums, dens, steps_per_level, levels, R0, G0):
    """Trace many rays; returns (pts, npts, status, landing) arrays."""
    nums = np.ascontiguousarray(nums, dtype=np.int64)
    dens = np.ascontiguousarray(dens, dtype=np.int64)
    if _NAME == "numba":
        nr = nums.size
        pts = np.zeros((nr, levels + 1), dtype=np.complex128)
        npts = np.zeros(nr, dtype=np.int32)
        status = np.zeros(nr, dtype=np.int8)
        landing = np.zeros(nr, dtype=np.complex128)
        for i in range(nr):
            n, st = _IMPL.trace_ray_kernel(complex(lam), complex(b),
                                           int(nums[i]), int(dens[i]),
                                           int(steps_per_level), int(levels),
                                           float(R0), float(G0), pts[i])
            npts[i] = n
            status[i] = st
            landing[i] = pts[i, n - 1]
        return pts, npts, status, landing
    return _IMPL.trace_rays_batch(complex(lam), complex(b), nums, dens,
                                  int(steps_per_level), int(levels),
                                  float(R0), float(G0))
