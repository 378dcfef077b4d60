"""Hot loops JIT-compiled with numba.

Per-seed scalar iteration: each pixel/seed runs its own early-exiting loop.
The numpy twin in _kernels_numpy keeps whole grids in lockstep instead; both
satisfy the same contracts (see backend module docstring).

Shared fate encodings:
  orbit target codes: -2 escaped, -1 undecided, 0..2 index of the attracting
  fixed point reached (0 is always the fixed point at the origin slot),
  3 attracted to some other cycle.
  cell/point codes: 0 undecided, 1 converged to target, 2 escaped.
"""

import cmath

import numpy as np
from numba import njit

ANCHOR_TOL = 1e-8
ATT_TOL = 1e-6
PERIOD_CAP = 256


@njit(cache=True)
def _attracting_fps(lam, b):
    """Fixed points in fixed slots with contraction radii.

    Slot 0 is the origin, slot 1 the larger nonzero root, slot 2 the smaller.
    Non-attracting slots carry delta 0 so proximity tests never fire on them.
    """
    pts = np.zeros(3, dtype=np.complex128)
    dls = np.zeros(3, dtype=np.float64)
    if abs(lam) < 1.0 - ATT_TOL:
        dls[0] = (1.0 - abs(lam)) / (2.0 * (abs(b) + 1.0))
    c = lam - 1.0
    s = (b * b - 4.0 * c) ** 0.5
    if (b.real * s.real + b.imag * s.imag) >= 0.0:
        big = -(b + s) / 2.0
    else:
        big = (s - b) / 2.0
    if big != 0:
        small = c / big
        pts[1] = big
        pts[2] = small
        for j in range(1, 3):
            r = pts[j]
            mu = lam + r * (2.0 * b + 3.0 * r)
            if abs(mu) < 1.0 - ATT_TOL:
                dls[j] = (1.0 - abs(mu)) / (2.0 * (abs(b + 3.0 * r) + 1.0))
    return pts, dls


@njit(cache=True)
def _crit_pair(lam, b):
    disc = b * b - 3.0 * lam
    s = disc ** 0.5
    if (b.real * s.real + b.imag * s.imag) >= 0.0:
        big = -(b + s) / 3.0
        small = lam / (3.0 * big) if big != 0 else 0.0 + 0.0j
        return small, big        # (c_plus, c_minus)
    big = (s - b) / 3.0
    small = lam / (3.0 * big) if big != 0 else 0.0 + 0.0j
    return big, small


@njit(cache=True)
def _seed_fate(lam, b, z0, budget, tail_skip, R, pts, dls):
    """One seed against the orbit-fate contract. Returns (tgt, steps, minr)."""
    z = z0
    minr = abs(z0) if tail_skip <= 0 else np.inf
    anchor = z
    anchor_step = 0
    next_anchor = 1
    holdoff = False
    for k in range(1, budget + 1):
        z = z * (lam + z * (b + z))
        az = abs(z)
        if az >= R:
            return np.int8(-2), k, minr
        if k >= tail_skip and az < minr:
            minr = az
        for j in range(3):
            if abs(z - pts[j]) < dls[j]:
                return np.int8(j), k, minr
        if not holdoff and abs(z - anchor) < ANCHOR_TOL * max(1.0, az):
            period = k - anchor_step
            if 0 < period <= PERIOD_CAP:
                mu = 1.0 + 0.0j
                w = z
                hit_fp = -1
                for _ in range(period):
                    mu = mu * (lam + w * (2.0 * b + 3.0 * w))
                    w = w * (lam + w * (b + w))
                if abs(mu) < 1.0 - ATT_TOL:
                    w = z
                    for _ in range(period):
                        for j in range(3):
                            if abs(w - pts[j]) < dls[j]:
                                hit_fp = j
                        w = w * (lam + w * (b + w))
                    if hit_fp >= 0:
                        return np.int8(hit_fp), k, minr
                    return np.int8(3), k, minr
                holdoff = True    # near-neutral match: pause until new anchor
        if k == next_anchor:
            anchor = z
            anchor_step = k
            next_anchor *= 2
            holdoff = False
    return np.int8(-1), budget, minr


@njit(cache=True)
def orbit_fates(lam, bs, budget, tail_skip):
    """Fates of both critical orbits for every parameter b in bs.

    Returns (tgt[n,2] int8, steps[n,2] int32, minr[n,2] float64): target code,
    step of resolution, and min |z| over orbit steps >= tail_skip.
    """
    n = bs.size
    tgt = np.empty((n, 2), dtype=np.int8)
    steps = np.empty((n, 2), dtype=np.int32)
    minr = np.empty((n, 2), dtype=np.float64)
    for i in range(n):
        b = bs[i]
        R = 2.0 * (1.0 + abs(lam) + abs(b))
        pts, dls = _attracting_fps(lam, b)
        cp, cm = _crit_pair(lam, b)
        t, s, m = _seed_fate(lam, b, cp, budget, tail_skip, R, pts, dls)
        tgt[i, 0], steps[i, 0], minr[i, 0] = t, s, m
        t, s, m = _seed_fate(lam, b, cm, budget, tail_skip, R, pts, dls)
        tgt[i, 1], steps[i, 1], minr[i, 1] = t, s, m
    return tgt, steps, minr


@njit(cache=True)
def tail_rotation(lam, bs, budget, tail_len):
    """Winding rate of both critical orbits about the origin: mean wrapped
    angle increment over the last tail_len of budget steps, in turns mod 1.
    Returns rot[n,2] float64, NaN where the orbit escapes or lands on 0.
    """
    n = bs.size
    rot = np.full((n, 2), np.nan, dtype=np.float64)
    skip = budget - tail_len if budget > tail_len else 0
    span = budget - skip
    for i in range(n):
        b = bs[i]
        R = 2.0 * (1.0 + abs(lam) + abs(b))
        cp, cm = _crit_pair(lam, b)
        for s in range(2):
            z = cp if s == 0 else cm
            total = 0.0
            dead = False
            for k in range(1, budget + 1):
                zn = z * (lam + z * (b + z))
                azn = abs(zn)
                if azn >= R or azn == 0.0:
                    dead = True
                    break
                if k > skip:
                    total += cmath.phase(zn * z.conjugate())
                z = zn
            if not dead and span > 0:
                rot[i, s] = (total / (2.0 * np.pi * span)) % 1.0
    return rot


@njit(cache=True)
def target_grid(lam, b, p, delta, x0, y0, dx, dy, nx, ny, budget):
    """Full dynamical-plane raster: does each cell center reach the delta-disk
    of the attracting point p? Codes 0 undecided, 1 converged, 2 escaped."""
    code = np.zeros((ny, nx), dtype=np.uint8)
    steps = np.zeros((ny, nx), dtype=np.int32)
    R = 2.0 * (1.0 + abs(lam) + abs(b))
    for iy in range(ny):
        zy = y0 + (iy + 0.5) * dy
        for ix in range(nx):
            z = complex(x0 + (ix + 0.5) * dx, zy)
            for k in range(1, budget + 1):
                z = z * (lam + z * (b + z))
                if abs(z - p) < delta:
                    code[iy, ix] = 1
                    steps[iy, ix] = k
                    break
                if abs(z) >= R:
                    code[iy, ix] = 2
                    steps[iy, ix] = k
                    break
    return code, steps


@njit(cache=True)
def immediate_component(lam, b, p, delta, x0, y0, dx, dy, nx, ny, budget,
                        sx1, sy1, sx2, sy2, early_stop):
    """Raster immediate basin of the attracting point p by lazy BFS from p's
    cell: a cell joins the component when its center's orbit reaches the
    delta-disk of p or enters an already certified cell (memoization).

    (sx1,sy1)/(sx2,sy2) are cells of interest (pass -1 to disable); with
    early_stop the flood halts once both are resolved as members.
    Returns (status grid: 0 untouched, 1 member, 2 rejected; found1; found2).
    """
    status = np.zeros((ny, nx), dtype=np.uint8)
    queued = np.zeros((ny, nx), dtype=np.uint8)
    qx = np.empty(nx * ny, dtype=np.int32)
    qy = np.empty(nx * ny, dtype=np.int32)
    R = 2.0 * (1.0 + abs(lam) + abs(b))
    inv_dx = 1.0 / dx
    inv_dy = 1.0 / dy
    sx = int(np.floor((p.real - x0) * inv_dx))
    sy = int(np.floor((p.imag - y0) * inv_dy))
    if sx < 0 or sx >= nx or sy < 0 or sy >= ny:
        return status, False, False
    head = 0
    tail = 0
    qx[tail] = sx
    qy[tail] = sy
    tail += 1
    queued[sy, sx] = 1
    f1 = False
    f2 = False
    while head < tail:
        cx = qx[head]
        cy = qy[head]
        head += 1
        z = complex(x0 + (cx + 0.5) * dx, y0 + (cy + 0.5) * dy)
        member = False
        for _ in range(budget):
            if abs(z - p) < delta:
                member = True
                break
            z = z * (lam + z * (b + z))
            if abs(z) >= R:
                break
            jx = int(np.floor((z.real - x0) * inv_dx))
            jy = int(np.floor((z.imag - y0) * inv_dy))
            if 0 <= jx < nx and 0 <= jy < ny and status[jy, jx] == 1:
                member = True
                break
        if member:
            status[cy, cx] = 1
            if cx == sx1 and cy == sy1:
                f1 = True
            if cx == sx2 and cy == sy2:
                f2 = True
            if early_stop and f1 and f2:
                return status, f1, f2
            for d in range(4):
                nx_ = cx + (1 if d == 0 else (-1 if d == 1 else 0))
                ny_ = cy + (1 if d == 2 else (-1 if d == 3 else 0))
                if 0 <= nx_ < nx and 0 <= ny_ < ny and queued[ny_, nx_] == 0:
                    queued[ny_, nx_] = 1
                    qx[tail] = nx_
                    qy[tail] = ny_
                    tail += 1
        else:
            status[cy, cx] = 2
    return status, f1, f2


@njit(cache=True)
def point_fates_zero(lam, b, seeds, budget, delta):
    """Codes for seeds against the origin: 0 undecided, 1 converged into the
    delta-disk at 0, 2 escaped."""
    n = seeds.size
    out = np.zeros(n, dtype=np.uint8)
    R = 2.0 * (1.0 + abs(lam) + abs(b))
    for i in range(n):
        z = seeds[i]
        for _ in range(budget):
            z = z * (lam + z * (b + z))
            if abs(z) < delta:
                out[i] = 1
                break
            if abs(z) >= R:
                out[i] = 2
                break
    return out


@njit(cache=True)
def trace_ray_kernel(lam, b, num, den, steps_per_level, levels, R0, G0, pts):
    """Newton continuation of one external ray from radius R0 inward.

    Angle kept exact as num/den under tripling. Each level halves the Green
    value; the Boettcher equation f^n(z) = W is solved at depth n chosen so
    3^n * G lies in [1, 3]. pts receives one point per completed level.
    Returns (npts, status): status 0 landed, 1 stalled, 2 hit critical value.
    """
    z = R0 * cmath.exp(2j * np.pi * (num / den))
    pts[0] = z
    npts = 1
    zprev = z
    for lev in range(levels):
        gc = G0 * 2.0 ** (-lev)
        gn = G0 * 2.0 ** (-(lev + 1))
        for s in range(1, steps_per_level + 1):
            gt = gc + (gn - gc) * s / steps_per_level
            n = 0
            t = gt
            while t < 1.0:
                t *= 3.0
                n += 1
            a = num
            for _ in range(n):
                a = (a * 3) % den
            W = np.exp(t) * cmath.exp(2j * np.pi * (a / den))
            zz = z
            ok = False
            for _ in range(40):
                w = zz
                dw = 1.0 + 0.0j
                bad = False
                for _ in range(n):
                    dw = dw * (lam + w * (2.0 * b + 3.0 * w))
                    w = w * (lam + w * (b + w))
                    if abs(w) > 1e100:
                        bad = True
                        break
                if bad or abs(dw) < 1e-290:
                    return npts, 2
                step = (w - W) / dw
                ms = 0.5 * abs(zz) + 0.05
                if abs(step) > ms:
                    step = step * (ms / abs(step))
                zz = zz - step
                if abs(step) < 1e-13 * (1.0 + abs(zz)):
                    ok = True
                    break
            if not ok:
                return npts, 1
            z = zz
        pts[npts] = z
        npts += 1
        if abs(z - zprev) < 1e-9:
            return npts, 0
        zprev = z
    return npts, 1
