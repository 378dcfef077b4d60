"""Pure-numpy twins of the JIT kernels.

Same contracts and encodings as _kernels_numba (see its docstring), but the
iteration is kept in lockstep over whole arrays instead of per-seed loops:
grids advance one step at a time with an active-index set, and the ray batch
advances all rays through the shared level schedule together.

Two documented divergences from the JIT path, both conservative:
  - Brent cycle verification runs per matched seed in plain Python (matches
    are rare); the holdoff rule is identical.
  - immediate_component floods in BFS rounds, so memoization only sees cells
    certified in earlier rounds, and early_stop is checked between rounds.
"""

import numpy as np

ANCHOR_TOL = 1e-8
ATT_TOL = 1e-6
PERIOD_CAP = 256


def _attracting_fps_vec(lam, bs):
    """Fixed-slot fixed points and contraction radii for every parameter."""
    n = bs.size
    pts = np.zeros((n, 3), dtype=np.complex128)
    dls = np.zeros((n, 3), dtype=np.float64)
    if abs(lam) < 1.0 - ATT_TOL:
        dls[:, 0] = (1.0 - abs(lam)) / (2.0 * (np.abs(bs) + 1.0))
    c = lam - 1.0
    s = (bs * bs - 4.0 * c) ** 0.5
    flip = (bs.real * s.real + bs.imag * s.imag) < 0.0
    big = np.where(flip, (s - bs) / 2.0, -(bs + s) / 2.0)
    nz = big != 0
    small = np.zeros_like(big)
    small[nz] = c / big[nz]
    pts[nz, 1] = big[nz]
    pts[nz, 2] = small[nz]
    for j in (1, 2):
        r = pts[:, j]
        mu = lam + r * (2.0 * bs + 3.0 * r)
        att = nz & (np.abs(mu) < 1.0 - ATT_TOL)
        dls[att, j] = (1.0 - np.abs(mu[att])) / (2.0 * (np.abs(bs[att] + 3.0 * r[att]) + 1.0))
    return pts, dls


def _crit_pair_vec(lam, bs):
    s = (bs * bs - 3.0 * lam) ** 0.5
    flip = (bs.real * s.real + bs.imag * s.imag) < 0.0
    big = np.where(flip, (s - bs) / 3.0, -(bs + s) / 3.0)
    small = np.zeros_like(big)
    nz = big != 0
    small[nz] = lam / (3.0 * big[nz])
    c_plus = np.where(flip, big, small)
    c_minus = np.where(flip, small, big)
    return c_plus, c_minus


def _verify_cycle(lam, b, z, period, pts, dls):
    """Scalar Brent verification; returns slot code, 3 for other cycle, -1 no."""
    mu = 1.0 + 0.0j
    w = z
    for _ in range(period):
        mu *= lam + w * (2.0 * b + 3.0 * w)
        w = w * (lam + w * (b + w))
    if abs(mu) >= 1.0 - ATT_TOL:
        return -1
    hit = -1
    w = z
    for _ in range(period):
        for j in range(3):
            if abs(w - pts[j]) < dls[j]:
                hit = j
        w = w * (lam + w * (b + w))
    return hit if hit >= 0 else 3


def orbit_fates(lam, bs, budget, tail_skip):
    n = bs.size
    pts, dls = _attracting_fps_vec(lam, bs)
    cp, cm = _crit_pair_vec(lam, bs)
    seeds = np.empty(n * 2, dtype=np.complex128)
    seeds[0::2] = cp
    seeds[1::2] = cm
    bss = np.repeat(bs, 2)
    ptss = np.repeat(pts, 2, axis=0)
    dlss = np.repeat(dls, 2, axis=0)
    R = 2.0 * (1.0 + abs(lam) + np.abs(bss))

    m = seeds.size
    tgt = np.full(m, -1, dtype=np.int8)
    steps = np.full(m, budget, dtype=np.int32)
    minr = np.full(m, np.inf, dtype=np.float64)
    if tail_skip <= 0:
        minr = np.abs(seeds)
    z = seeds.copy()
    anchor = z.copy()
    anchor_step = 0
    next_anchor = 1
    holdoff = np.zeros(m, dtype=bool)
    live = np.arange(m)
    for k in range(1, budget + 1):
        if live.size == 0:
            break
        zl = z[live]
        bl = bss[live]
        zl = zl * (lam + zl * (bl + zl))
        z[live] = zl
        az = np.abs(zl)
        esc = az >= R[live]
        if k >= tail_skip:
            sl = minr[live]
            np.minimum(sl, az, out=sl)
            minr[live] = sl
        hit = np.full(live.size, -1, dtype=np.int8)
        for j in range(3):
            near = np.abs(zl - ptss[live, j]) < dlss[live, j]
            hit[near & (hit < 0)] = j
        resolved = esc | (hit >= 0)
        if resolved.any():
            idx = live[resolved]
            tgt[idx] = np.where(esc[resolved], np.int8(-2), hit[resolved])
            steps[idx] = k
        rem = live[~resolved]
        if rem.size:
            match = (~holdoff[rem]) & (np.abs(z[rem] - anchor[rem])
                                       < ANCHOR_TOL * np.maximum(1.0, np.abs(z[rem])))
            period = k - anchor_step
            if match.any() and 0 < period <= PERIOD_CAP:
                drop = []
                for i in rem[match]:
                    code = _verify_cycle(lam, bss[i], z[i], period, ptss[i], dlss[i])
                    if code >= 0:
                        tgt[i] = code
                        steps[i] = k
                        drop.append(i)
                    else:
                        holdoff[i] = True
                if drop:
                    rem = rem[~np.isin(rem, np.asarray(drop))]
        live = rem
        if k == next_anchor:
            anchor[live] = z[live]
            anchor_step = k
            next_anchor *= 2
            holdoff[live] = False
    return tgt.reshape(n, 2), steps.reshape(n, 2), minr.reshape(n, 2)


def tail_rotation(lam, bs, budget, tail_len):
    """Winding rate of both critical orbit tails about 0; see the JIT twin."""
    n = bs.size
    cp, cm = _crit_pair_vec(lam, bs)
    z = np.empty(n * 2, dtype=np.complex128)
    z[0::2] = cp
    z[1::2] = cm
    bss = np.repeat(bs, 2)
    R = 2.0 * (1.0 + abs(lam) + np.abs(bss))
    skip = budget - tail_len if budget > tail_len else 0
    span = budget - skip
    total = np.zeros(n * 2, dtype=np.float64)
    alive = np.ones(n * 2, dtype=bool)
    live = np.arange(n * 2)
    for k in range(1, budget + 1):
        if live.size == 0:
            break
        zl = z[live]
        zn = zl * (lam + zl * (bss[live] + zl))
        azn = np.abs(zn)
        gone = (azn >= R[live]) | (azn == 0.0)
        if gone.any():
            alive[live[gone]] = False
        if k > skip:
            keep = ~gone
            total[live[keep]] += np.angle(zn[keep] * np.conj(zl[keep]))
        z[live] = zn
        live = live[~gone]
    rot = np.full(n * 2, np.nan, dtype=np.float64)
    if span > 0:
        rot[alive] = (total[alive] / (2.0 * np.pi * span)) % 1.0
    return rot.reshape(n, 2)


def target_grid(lam, b, p, delta, x0, y0, dx, dy, nx, ny, budget):
    xs = x0 + (np.arange(nx) + 0.5) * dx
    ys = y0 + (np.arange(ny) + 0.5) * dy
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    R = 2.0 * (1.0 + abs(lam) + abs(b))
    code = np.zeros(z.size, dtype=np.uint8)
    steps = np.zeros(z.size, dtype=np.int32)
    live = np.arange(z.size)
    for k in range(1, budget + 1):
        if live.size == 0:
            break
        zl = z[live]
        zl = zl * (lam + zl * (b + zl))
        z[live] = zl
        conv = np.abs(zl - p) < delta
        esc = (~conv) & (np.abs(zl) >= R)
        done = conv | esc
        if done.any():
            idx = live[done]
            code[idx] = np.where(conv[done], 1, 2).astype(np.uint8)
            steps[idx] = k
            live = live[~done]
    return code.reshape(ny, nx), steps.reshape(ny, nx)


def immediate_component(lam, b, p, delta, x0, y0, dx, dy, nx, ny, budget,
                        sx1, sy1, sx2, sy2, early_stop):
    status = np.zeros((ny, nx), dtype=np.uint8)
    queued = np.zeros((ny, nx), dtype=np.uint8)
    R = 2.0 * (1.0 + abs(lam) + abs(b))
    sx = int(np.floor((p.real - x0) / dx))
    sy = int(np.floor((p.imag - y0) / dy))
    if not (0 <= sx < nx and 0 <= sy < ny):
        return status, False, False
    queued[sy, sx] = 1
    frontier_x = np.array([sx], dtype=np.int64)
    frontier_y = np.array([sy], dtype=np.int64)
    f1 = False
    f2 = False
    while frontier_x.size:
        z = (x0 + (frontier_x + 0.5) * dx) + 1j * (y0 + (frontier_y + 0.5) * dy)
        member = np.zeros(z.size, dtype=bool)
        live = np.arange(z.size)
        for _ in range(budget):
            if live.size == 0:
                break
            zl = z[live]
            near = np.abs(zl - p) < delta
            member[live[near]] = True
            live = live[~near]
            if live.size == 0:
                break
            zl = z[live]
            zl = zl * (lam + zl * (b + zl))
            z[live] = zl
            live = live[np.abs(zl) < R]
            if live.size == 0:
                break
            zl = z[live]
            jx = np.floor((zl.real - x0) / dx).astype(np.int64)
            jy = np.floor((zl.imag - y0) / dy).astype(np.int64)
            ing = (jx >= 0) & (jx < nx) & (jy >= 0) & (jy < ny)
            memo = np.zeros(live.size, dtype=bool)
            memo[ing] = status[jy[ing], jx[ing]] == 1
            member[live[memo]] = True
            live = live[~memo]
        mx = frontier_x[member]
        my = frontier_y[member]
        status[frontier_y, frontier_x] = 2
        status[my, mx] = 1
        if ((mx == sx1) & (my == sy1)).any():
            f1 = True
        if ((mx == sx2) & (my == sy2)).any():
            f2 = True
        if early_stop and f1 and f2:
            return status, f1, f2
        nbx = np.concatenate([mx + 1, mx - 1, mx, mx])
        nby = np.concatenate([my, my, my + 1, my - 1])
        ok = (nbx >= 0) & (nbx < nx) & (nby >= 0) & (nby < ny)
        nbx, nby = nbx[ok], nby[ok]
        fresh = queued[nby, nbx] == 0
        nbx, nby = nbx[fresh], nby[fresh]
        if nbx.size:
            flat = np.unique(nby * nx + nbx)
            nby, nbx = np.divmod(flat, nx)
            queued[nby, nbx] = 1
        frontier_x, frontier_y = nbx, nby
    return status, f1, f2


def point_fates_zero(lam, b, seeds, budget, delta):
    out = np.zeros(seeds.size, dtype=np.uint8)
    R = 2.0 * (1.0 + abs(lam) + abs(b))
    z = seeds.astype(np.complex128).copy()
    live = np.arange(z.size)
    for _ in range(budget):
        if live.size == 0:
            break
        zl = z[live]
        zl = zl * (lam + zl * (b + zl))
        z[live] = zl
        conv = np.abs(zl) < delta
        esc = (~conv) & (np.abs(zl) >= R)
        out[live[conv]] = 1
        out[live[esc]] = 2
        live = live[~(conv | esc)]
    return out


def trace_rays_batch(lam, b, nums, dens, steps_per_level, levels, R0, G0):
    """All rays advanced together through the shared level schedule.

    Returns (pts[nrays, levels+1], npts, status, landing); status codes as in
    the JIT kernel: 0 landed, 1 stalled, 2 hit critical value.
    """
    nr = nums.size
    theta = nums / dens
    z = R0 * np.exp(2j * np.pi * theta)
    pts = np.zeros((nr, levels + 1), dtype=np.complex128)
    pts[:, 0] = z
    npts = np.ones(nr, dtype=np.int32)
    status = np.full(nr, 1, dtype=np.int8)
    active = np.ones(nr, dtype=bool)
    zprev = z.copy()
    for lev in range(levels):
        if not active.any():
            break
        gc = G0 * 2.0 ** (-lev)
        gn = G0 * 2.0 ** (-(lev + 1))
        for s in range(1, steps_per_level + 1):
            gt = gc + (gn - gc) * s / steps_per_level
            n = 0
            t = gt
            while t < 1.0:
                t *= 3.0
                n += 1
            a = nums.copy()
            for _ in range(n):
                a = (a * 3) % dens
            W = np.exp(t) * np.exp(2j * np.pi * (a / dens))
            idx = np.flatnonzero(active)
            zz = z[idx].copy()
            ok = np.zeros(idx.size, dtype=bool)
            bad = np.zeros(idx.size, dtype=bool)
            run = np.ones(idx.size, dtype=bool)
            for _ in range(40):
                if not run.any():
                    break
                r = np.flatnonzero(run)
                w = zz[r].copy()
                dw = np.ones(r.size, dtype=np.complex128)
                over = np.zeros(r.size, dtype=bool)
                for _ in range(n):
                    dw *= lam + w * (2.0 * b + 3.0 * w)
                    w = w * (lam + w * (b + w))
                    over |= np.abs(w) > 1e100
                    w[over] = 0.0
                broke = over | (np.abs(dw) < 1e-290)
                bad[r[broke]] = True
                run[r[broke]] = False
                r2 = r[~broke]
                if r2.size == 0:
                    continue
                step = (w[~broke] - W[idx[r2]]) / dw[~broke]
                ms = 0.5 * np.abs(zz[r2]) + 0.05
                big = np.abs(step) > ms
                step[big] *= (ms[big] / np.abs(step[big]))
                zz[r2] = zz[r2] - step
                conv = np.abs(step) < 1e-13 * (1.0 + np.abs(zz[r2]))
                ok[r2[conv]] = True
                run[r2[conv]] = False
            status[idx[bad]] = 2
            stalled = ~(ok | bad)
            status[idx[stalled]] = 1
            active[idx[bad | stalled]] = False
            good = idx[ok]
            z[good] = zz[ok]
        idx = np.flatnonzero(active)
        pts[idx, npts[idx]] = z[idx]
        npts[idx] += 1
        landed = np.abs(z[idx] - zprev[idx]) < 1e-9
        status[idx[landed]] = 0
        active[idx[landed]] = False
        zprev[idx] = z[idx]
    landing = pts[np.arange(nr), npts - 1]
    return pts, npts, status, landing
