"""Orbit-fate analysis and the dynamical taxonomy of a single map.

Builds basin rasters with an immediate-component extraction, decides which
critical point is principal (the one the zero basin keeps under shrinking
perturbations), probes Siegel disks by rotation statistics, and combines
these into an eight-tag verdict for one (lam, b) pair.  The five capture
tags describe where the second critical point ends up; NotInM3, InPHD and
Undecided cover the remaining outcomes.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from . import backend, core
from .core import CubicMap, capture_radius, critical_points
from .petals import all_sector_specs, parabolic_germ, petal_membership, rotation_number

TAG_DISJOINT = "Disjoint"
TAG_ATTRACTING_CAPTURE = "AttractingCapture"
TAG_PARABOLIC_CAPTURE = "ParabolicCapture"
TAG_SIEGEL_CAPTURE = "SiegelCapture"
TAG_QUEER_CANDIDATE = "QueerCandidate"
TAG_NOT_IN_M3 = "NotInM3"
TAG_IN_PHD = "InPHD"
TAG_UNDECIDED = "Undecided"

VERDICT_ONE = "ONE"
VERDICT_BOTH = "BOTH"
VERDICT_UNDECIDED = "UNDECIDED"

EPS_LADDER = (1e-2, 1e-3, 1e-4)
ROTATION_TOL = 1e-3       # empirical rotation number match, mod 1
DIVE_HOLD = 512           # steps an orbit must stay inside after a dive
DIVE_ENTRY = 0.9          # dive entry bar as a fraction of the disk scale
NEUTRAL_BAND = 1e-4       # | |mu| - 1 | below this counts as neutral


@dataclass(frozen=True)
class Budgets:
    """Iteration and raster budgets shared by the classification pipeline."""

    iterations: int = 4096
    raster_resolution: int = 256
    raster_budget: int = 512
    probe_budget: int = 3000
    tail_skip: int = 64


@dataclass(frozen=True)
class DynRaster:
    """Fate codes over a z-plane window plus 4-connected component labels.

    codes: 0 undecided, 1 converged to target, 2 escaped.  labels number the
    4-connected classes of equal-code cells; target_label is the label of the
    cell holding the target point, and crit_labels the labels at the two
    critical points (-1 when outside the window).
    """

    window: tuple[float, float, float, float]
    resolution: tuple[int, int]
    codes: np.ndarray
    labels: np.ndarray
    target: complex
    target_label: int
    criticals: tuple[complex, complex]
    crit_labels: tuple[int, int]

    def label_at(self, z: complex) -> int:
        ix, iy = _cell_index(z, self.window, self.resolution)
        if ix < 0:
            return -1
        return int(self.labels[iy, ix])

    def in_immediate(self, z: complex) -> bool:
        lab = self.label_at(z)
        return lab == self.target_label and lab != -1


@dataclass(frozen=True)
class CriticalLabeling:
    omega1: complex
    omega2: complex
    verdict: str
    eps_used: tuple[float, ...] = ()


@dataclass(frozen=True)
class SiegelReport:
    radius: float | None
    rotation: float
    budget: int
    seeds: int = 8
    bisection_steps: int = 40


@dataclass(frozen=True)
class ComponentType:
    tag: str
    evidence: dict = field(default_factory=dict)


@dataclass(frozen=True)
class NeutralCycle:
    points: tuple[complex, ...]
    period: int
    multiplier: complex
    residual: float


def _cell_index(z: complex, window, resolution) -> tuple[int, int]:
    x0, y0, x1, y1 = window
    nx, ny = resolution
    ix = int(math.floor((z.real - x0) / (x1 - x0) * nx))
    iy = int(math.floor((z.imag - y0) / (y1 - y0) * ny))
    if 0 <= ix < nx and 0 <= iy < ny:
        return ix, iy
    return -1, -1


def _raster_window(f: CubicMap) -> tuple[float, float, float, float]:
    c = critical_points(f)
    r = max(1.0, 1.5 * max(abs(c.c_plus), abs(c.c_minus)))
    return (-r, -r, r, r)


def basin_raster(f: CubicMap, target: complex, window=None,
                 resolution: tuple[int, int] = (1024, 1024),
                 budget: int = 4096) -> DynRaster:
    """Iterate every cell center and label connected equal-fate regions.

    The target must be an attracting fixed point; its 4-connected component
    of converged cells is the immediate-basin approximation.
    """
    mu = core.derivative(f, target)
    if abs(core.evaluate(f, target) - target) > 1e-8 * max(1.0, abs(target)):
        raise ValueError("target is not a fixed point")
    if abs(mu) >= 1.0:
        raise ValueError("target is not attracting")
    if window is None:
        window = _raster_window(f)
    delta = capture_radius(target, mu, f.b)
    codes, _steps = backend.target_grid(f.lam, f.b, target, delta, window,
                                        resolution, budget)
    labels = np.zeros(codes.shape, dtype=np.int32)
    nxt = 1
    for code in (0, 1, 2):
        lab, n = ndimage.label(codes == code)
        labels[lab > 0] = lab[lab > 0] + (nxt - 1)
        nxt += n
    c = critical_points(f)
    tx, ty = _cell_index(target, window, resolution)
    target_label = int(labels[ty, tx]) if tx >= 0 else -1
    crit_labels = []
    for cc in (c.c_plus, c.c_minus):
        ix, iy = _cell_index(cc, window, resolution)
        crit_labels.append(int(labels[iy, ix]) if ix >= 0 else -1)
    return DynRaster(window=tuple(window), resolution=tuple(resolution),
                     codes=codes, labels=labels, target=target,
                     target_label=target_label,
                     criticals=(c.c_plus, c.c_minus),
                     crit_labels=tuple(crit_labels))


def _immediate_flags(lam: complex, b: complex, stops: tuple[complex, complex],
                     budgets: Budgets, budget: int,
                     window=None, early_stop: bool = True):
    """Run the lazy immediate-component flood of the zero basin."""
    delta = capture_radius(0j, lam, b)
    if window is None:
        window = _raster_window(CubicMap(lam, b))
    res = (budgets.raster_resolution, budgets.raster_resolution)
    return backend.immediate_component(lam, b, 0j, delta, window, res,
                                       budget, stops=stops,
                                       early_stop=early_stop)


def _match_continuations(f: CubicMap, g: CubicMap):
    """Order g's critical points so index i continues f's critical i."""
    cf = critical_points(f)
    cg = critical_points(g)
    keep = abs(cg.c_plus - cf.c_plus) + abs(cg.c_minus - cf.c_minus)
    swap = abs(cg.c_plus - cf.c_minus) + abs(cg.c_minus - cf.c_plus)
    if keep <= swap:
        return (cg.c_plus, cg.c_minus)
    return (cg.c_minus, cg.c_plus)


def principal_flags(f: CubicMap, eps: float,
                    budgets: Budgets | None = None) -> tuple[bool, bool]:
    """One rung of the refinement ladder: immediate-basin flags for the two
    critical points of the eps-perturbed map, ordered as continuations of
    f's critical pair."""
    budgets = budgets or Budgets()
    g = core.perturb(f, eps)
    gc = _match_continuations(f, g)
    budget = max(budgets.raster_budget, int(math.ceil(80.0 / eps)))
    _mask, found = _immediate_flags(g.lam, g.b, gc, budgets, budget,
                                    window=_raster_window(f))
    return found


def principal_critical(f: CubicMap, budgets: Budgets | None = None) -> CriticalLabeling:
    """Decide which critical points sit in the immediate raster basin of 0.

    Attracting lam is tested on f itself.  On the unit circle the map is
    perturbed by each ladder eps; the verdict must agree across the ladder,
    with critical points matched to their continuations by distance.
    """
    budgets = budgets or Budgets()
    if abs(f.lam) > 1.0 + 1e-12:
        raise ValueError("principal critical point needs |lambda| <= 1")
    c = critical_points(f)
    crits = (c.c_plus, c.c_minus)
    if abs(f.lam) < 1.0 - 1e-9:
        _mask, found = _immediate_flags(f.lam, f.b, crits, budgets,
                                        budgets.raster_budget,
                                        window=_raster_window(f))
        return _labeling_from_flags(crits, [found], ())

    flags = [principal_flags(f, eps, budgets) for eps in EPS_LADDER]
    return _labeling_from_flags(crits, flags, EPS_LADDER)


def _labeling_from_flags(crits, flags, eps_used) -> CriticalLabeling:
    if all(a and b for a, b in flags):
        return CriticalLabeling(crits[0], crits[1], VERDICT_BOTH, tuple(eps_used))
    if all(a and not b for a, b in flags):
        return CriticalLabeling(crits[0], crits[1], VERDICT_ONE, tuple(eps_used))
    if all(b and not a for a, b in flags):
        return CriticalLabeling(crits[1], crits[0], VERDICT_ONE, tuple(eps_used))
    return CriticalLabeling(crits[0], crits[1], VERDICT_UNDECIDED, tuple(eps_used))


def _circ_dist(x: float, y: float) -> float:
    d = abs((x - y) % 1.0)
    return min(d, 1.0 - d)


def siegel_probe(f: CubicMap, budget: int = 3000) -> SiegelReport:
    """Search for the largest circle radius that behaves like Siegel-disk
    interior: seed orbits stay in the annulus [r/4, 4r] with empirical
    rotation number matching arg(lam)/2pi.

    The bisection is geometric: candidate radii span several decades.
    """
    if abs(abs(f.lam) - 1.0) > 1e-9:
        raise ValueError("siegel probe needs |lambda| = 1")
    if rotation_number(f.lam) is not None:
        raise ValueError("lambda is parabolic, not of irrational rotation type")
    theta = (cmath.phase(f.lam) / (2.0 * math.pi)) % 1.0
    c = critical_points(f)
    hi = min(abs(c.c_plus), abs(c.c_minus))
    lo = 1e-6
    seeds = 8
    lam, b = f.lam, f.b

    def verify(r: float) -> bool:
        zp = r * np.exp(2j * np.pi * np.arange(seeds) / seeds)
        wind = np.zeros(seeds)
        for _ in range(budget):
            zn = zp * (lam + zp * (b + zp))
            a = np.abs(zn)
            if np.any(a < r / 4.0) or np.any(a > 4.0 * r):
                return False
            wind += np.angle(zn / zp)
            zp = zn
        rot = (wind / (2.0 * math.pi * budget)) % 1.0
        return all(_circ_dist(float(x), theta) < ROTATION_TOL for x in rot)

    if hi <= lo or not verify(lo):
        return SiegelReport(radius=None, rotation=theta, budget=budget)
    if verify(hi):
        return SiegelReport(radius=hi, rotation=theta, budget=budget)
    for _ in range(40):
        mid = math.sqrt(lo * hi)
        if verify(mid):
            lo = mid
        else:
            hi = mid
    return SiegelReport(radius=lo, rotation=theta, budget=budget)


def _first_dive(f: CubicMap, z0: complex, r_eff: float, budget: int) -> int | None:
    """First iterate that enters |z| < DIVE_ENTRY*r_eff and then holds
    |z| < 4*r_eff for DIVE_HOLD steps while winding at the multiplier's
    rotation number.

    A principal orbit never passes the entry bar (it stays outside the
    invariant disk, so its radius floor is r_eff itself), while a captured
    orbit settles below it.  The persistence window plus the winding check
    reject orbits that merely brush the disk scale while wandering a Siegel
    boundary or some other bounded structure.
    """
    theta = (cmath.phase(f.lam) / (2.0 * math.pi)) % 1.0
    z = z0
    for k in range(1, budget + 1):
        z = core.evaluate(f, z)
        if abs(z) > 1e6:
            return None
        if abs(z) < DIVE_ENTRY * r_eff:
            w = z
            wind = 0.0
            held = True
            for _ in range(DIVE_HOLD):
                wn = core.evaluate(f, w)
                if abs(wn) >= 4.0 * r_eff:
                    held = False
                    break
                wind += cmath.phase(wn * w.conjugate())
                w = wn
            if held:
                rot = (wind / (2.0 * math.pi * DIVE_HOLD)) % 1.0
                if _circ_dist(rot, theta) <= ROTATION_TOL:
                    return k
    return None


def _first_mask_entry(f: CubicMap, z0: complex, mask: np.ndarray, window,
                      resolution, budget: int) -> int | None:
    z = z0
    for k in range(1, budget + 1):
        z = core.evaluate(f, z)
        if abs(z) > 1e6:
            return None
        ix, iy = _cell_index(z, window, resolution)
        if ix >= 0 and mask[iy, ix]:
            return k
    return None


def _disjoint_evidence(f: CubicMap, w2: complex, budget: int) -> dict:
    fate = core.iterate_orbit(f, w2, budget)
    return {"omega2": w2, "cycle_point": fate.fate.point,
            "period": fate.fate.period}


def classify(f: CubicMap, budgets: Budgets | None = None) -> ComponentType:
    """Eight-tag verdict for one parameter: escape, closure membership, or
    one of the capture/queer types describing the second critical point."""
    budgets = budgets or Budgets()
    if abs(f.lam) > 1.0 + 1e-12:
        raise ValueError("classification needs |lambda| <= 1")
    c = critical_points(f)
    crits = (c.c_plus, c.c_minus)
    tgt, steps, minr = backend.orbit_fates(f.lam, np.array([f.b]),
                                           budgets.iterations,
                                           budgets.tail_skip)
    tgt, steps, minr = tgt[0], steps[0], minr[0]
    if tgt[0] == -2 or tgt[1] == -2:
        escaped = [crits[i] for i in range(2) if tgt[i] == -2]
        return ComponentType(TAG_NOT_IN_M3, {
            "escaped": escaped,
            "steps": [int(steps[i]) for i in range(2) if tgt[i] == -2]})
    if abs(f.lam) < 1.0 - 1e-9:
        return _classify_attracting(f, crits, tgt, budgets)
    rot = rotation_number(f.lam)
    if rot is not None:
        return _classify_parabolic(f, crits, tgt, rot, budgets)
    return _classify_irrational(f, crits, tgt, minr, budgets)


def _classify_attracting(f, crits, tgt, budgets: Budgets) -> ComponentType:
    window = _raster_window(f)
    mask, (in1, in2) = _immediate_flags(f.lam, f.b, crits, budgets,
                                        budgets.raster_budget, window=window,
                                        early_stop=False)
    if in1 and in2:
        return ComponentType(TAG_IN_PHD, {"criticals_in_immediate": 2})
    if not in1 and not in2:
        return ComponentType(TAG_UNDECIDED,
                             {"reason": "no critical point found in the "
                                        "immediate raster basin of 0"})
    i2 = 1 if in1 else 0
    w2 = crits[i2]
    if tgt[i2] in (1, 2, 3):
        return ComponentType(TAG_DISJOINT,
                             _disjoint_evidence(f, w2, budgets.iterations))
    if tgt[i2] == 0:
        res = (budgets.raster_resolution, budgets.raster_resolution)
        k = _first_mask_entry(f, w2, mask, window, res, budgets.iterations)
        if k is not None:
            return ComponentType(TAG_ATTRACTING_CAPTURE,
                                 {"k": k, "omega2": w2})
        return ComponentType(TAG_UNDECIDED,
                             {"reason": "second critical converges to 0 but "
                                        "never entered the immediate raster"})
    return ComponentType(TAG_QUEER_CANDIDATE,
                         {"omega2": w2, "bounded": True})


def _classify_parabolic(f, crits, tgt, rot, budgets: Budgets) -> ComponentType:
    pc = principal_critical(f, budgets)
    if pc.verdict == VERDICT_BOTH:
        return ComponentType(TAG_IN_PHD, {"eps_used": list(pc.eps_used)})
    if pc.verdict == VERDICT_UNDECIDED:
        return ComponentType(TAG_UNDECIDED,
                             {"reason": "perturbation ladder disagreed"})
    w2 = pc.omega2
    i2 = crits.index(w2)
    if tgt[i2] in (1, 2, 3):
        return ComponentType(TAG_DISJOINT,
                             _disjoint_evidence(f, w2, budgets.iterations))
    try:
        germ = parabolic_germ(f, rot)
    except ValueError as exc:
        return ComponentType(TAG_UNDECIDED, {"reason": str(exc)})
    sectors = all_sector_specs(germ)
    z = w2
    for k in range(1, budgets.iterations + 1):
        z = core.evaluate(f, z)
        if abs(z) > 1e6:
            break
        for s in sectors:
            if petal_membership(s, z):
                return ComponentType(TAG_PARABOLIC_CAPTURE,
                                     {"k": k, "sector": s.sector_index,
                                      "omega2": w2})
    return ComponentType(TAG_QUEER_CANDIDATE, {"omega2": w2, "bounded": True})


def _classify_irrational(f, crits, tgt, minr, budgets: Budgets) -> ComponentType:
    attracted = [i for i in range(2) if tgt[i] in (1, 2, 3)]
    if attracted:
        w2 = crits[attracted[0]]
        return ComponentType(TAG_DISJOINT,
                             _disjoint_evidence(f, w2, budgets.iterations))
    sp = siegel_probe(f, budgets.probe_budget)
    if sp.radius is not None:
        scale = float(max(minr[0], minr[1]))
        r_eff = min(sp.radius, scale) if scale > 0 else sp.radius
        dives = [_first_dive(f, crits[i], r_eff, budgets.iterations)
                 for i in range(2)]
        hit = [i for i in range(2) if dives[i] is not None]
        if len(hit) == 2:
            return ComponentType(TAG_UNDECIDED,
                                 {"reason": "both criticals entered the "
                                            "probed disk and held"})
        if len(hit) == 1:
            i2 = hit[0]
            return ComponentType(TAG_SIEGEL_CAPTURE,
                                 {"k": dives[i2], "omega2": crits[i2],
                                  "radius": sp.radius, "r_eff": r_eff})
    pc = principal_critical(f, budgets)
    if pc.verdict == VERDICT_BOTH:
        return ComponentType(TAG_IN_PHD, {"eps_used": list(pc.eps_used),
                                          "probe_radius": sp.radius})
    if pc.verdict == VERDICT_ONE:
        return ComponentType(TAG_QUEER_CANDIDATE,
                             {"omega2": pc.omega2, "bounded": True,
                              "probe_radius": sp.radius})
    return ComponentType(TAG_UNDECIDED,
                         {"reason": "perturbation ladder disagreed",
                          "probe_radius": sp.radius})


def neutral_cycle_scan(f: CubicMap, period_max: int) -> list[NeutralCycle]:
    """Enumerate cycles up to period_max by polynomial root-finding and
    return those with |multiplier| within the neutral band, excluding 0.

    Roots are polished by Newton steps on f^n(z)-z; the per-root polish
    residual is carried on each reported cycle.
    """
    from .petals import compose_q

    if not 1 <= period_max <= 6:
        raise ValueError("period_max must be in 1..6")
    out: list[NeutralCycle] = []
    for n in range(1, period_max + 1):
        coeffs = compose_q(f, n).copy()
        coeffs[1] -= 1.0
        desc = coeffs[::-1]
        dpoly = np.polyder(desc)
        roots = np.roots(desc)
        for z in roots:
            z = complex(z)
            for _ in range(10):
                pv = np.polyval(desc, z)
                dv = np.polyval(dpoly, z)
                if dv == 0:
                    break
                step = pv / dv
                z -= step
                if abs(step) < 1e-14 * max(1.0, abs(z)):
                    break
            residual = abs(np.polyval(desc, z))
            scale = max(1.0, abs(z))
            orbit = [z]
            for _ in range(n - 1):
                orbit.append(core.evaluate(f, orbit[-1]))
            period = n
            for d in range(1, n):
                if n % d == 0 and abs(orbit[d] - z) < 1e-6 * scale:
                    period = d
                    break
            if period != n:
                continue
            if any(abs(p) < 1e-9 for p in orbit):
                continue
            # a multiplier-1 point is a multiple root of f^n(z)-z, so the
            # solver emits near-coincident copies; merge by distance
            if any(abs(p - q) < 1e-6 * scale
                   for prior in out for p in orbit for q in prior.points):
                continue
            mu = complex(np.prod([core.derivative(f, p) for p in orbit]))
            if abs(abs(mu) - 1.0) <= NEUTRAL_BAND:
                out.append(NeutralCycle(points=tuple(orbit), period=n,
                                        multiplier=mu, residual=residual))
    return out
