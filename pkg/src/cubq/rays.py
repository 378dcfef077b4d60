"""External rays of the basin of infinity.

Green potential, periodic angles of the tripling map on the circle, Newton
continuation of rays from a large circle down to their landing points, and a
census that groups rays landing together at repelling periodic points.  Rays
that co-land witness cutpoints of the filled Julia set; the persistence scan
follows those witnesses along a multiplier perturbation toward a parabolic
map.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import backend, core
from .core import CubicMap

STATUS_NAMES = ("Landed", "Stalled", "HitCriticalValue")
STEPS_PER_LEVEL = 32
LEVELS = 60
CLUSTER_RADIUS = 1e-5
PERIODIC_TOL = 1e-6
CAUCHY_TOL = 1e-4
CENSUS_PERIOD_CAP = 4
DENOM_CAP = 1 << 20


@dataclass(frozen=True)
class RayTrace:
    """One continued ray: points run from the starting circle inward, one
    per completed potential level."""

    angle: Fraction
    points: np.ndarray
    landing: complex | None
    status: str


@dataclass(frozen=True)
class ColandingPair:
    alpha: Fraction
    beta: Fraction
    landing_point: complex
    period: int


def green(f: CubicMap, z: complex, budget: int = 256) -> float:
    """Potential of z in the basin of infinity; 0 on the filled set.

    Iterates to escape, then refines 3**-n log|z_n| with the tail terms
    3**-(k+1) log|z_{k+1}/z_k**3|, which die off faster than geometrically
    once the orbit is large.
    """
    R = core.escape_radius(f)
    w = complex(z)
    n = 0
    while abs(w) <= R:
        if n >= budget:
            return 0.0
        w = core.evaluate(f, w)
        n += 1
    g = math.log(abs(w)) / 3.0 ** n
    scale = 1.0 / 3.0 ** n
    for _ in range(48):
        if abs(w) > 1e80:
            break
        q = 1.0 + (f.b + f.lam / w) / w
        w = core.evaluate(f, w)
        scale /= 3.0
        g += scale * math.log(abs(q))
    return g


def periodic_angles(n: int, exact: bool = True) -> list[Fraction]:
    """Angles p/(3**n - 1), the cycles of tripling; exact=True keeps only
    angles whose minimal period is n."""
    if n < 1:
        raise ValueError("period must be at least 1")
    den = 3 ** n - 1
    if den > DENOM_CAP:
        raise ValueError("3**n - 1 exceeds the denominator cap")
    out = []
    for p in range(den):
        a = Fraction(p, den)
        if exact:
            x = (3 * a) % 1
            k = 1
            while x != a:
                x = (3 * x) % 1
                k += 1
            if k != n:
                continue
        out.append(a)
    return out


def _trace_batch(f: CubicMap, angles: list[Fraction], steps_per_level: int,
                 levels: int) -> list[RayTrace]:
    R0 = 2.0 * core.escape_radius(f)
    G0 = math.log(R0)
    nums = np.array([a.numerator for a in angles], dtype=np.int64)
    dens = np.array([a.denominator for a in angles], dtype=np.int64)
    pts, npts, status, landing = backend.trace_rays_batch(
        f.lam, f.b, nums, dens, steps_per_level, levels, R0, G0)
    out = []
    for i, a in enumerate(angles):
        st = STATUS_NAMES[status[i]]
        land = complex(landing[i]) if st == "Landed" else None
        out.append(RayTrace(angle=a, points=pts[i, :npts[i]].copy(),
                            landing=land, status=st))
    return out


def trace_ray(f: CubicMap, theta, steps_per_level: int = STEPS_PER_LEVEL,
              levels: int = LEVELS) -> RayTrace:
    """Continue the ray at angle theta (a rational, kept exact under
    tripling) from radius 2*escape_radius down to its landing point."""
    a = Fraction(theta) % 1
    return _trace_batch(f, [a], steps_per_level, levels)[0]


def trace_periodic_rays(f: CubicMap, max_period: int,
                        steps_per_level: int = STEPS_PER_LEVEL,
                        levels: int = LEVELS) -> dict[Fraction, RayTrace]:
    """Trace every angle of exact period 1..max_period in one batch."""
    angles = [a for k in range(1, max_period + 1)
              for a in periodic_angles(k)]
    return dict(zip(angles, _trace_batch(f, angles, steps_per_level, levels)))


def _orbit_period(f: CubicMap, x: complex,
                  max_period: int) -> tuple[int, complex]:
    """Minimal period of x up to max_period, with the cycle multiplier;
    (0, 0) when x does not close up within tolerance."""
    z = x
    mu = 1.0 + 0j
    for p in range(1, max_period + 1):
        mu *= core.derivative(f, z)
        z = core.evaluate(f, z)
        if abs(z - x) < PERIODIC_TOL:
            return p, complex(mu)
    return 0, 0j


def colanding_census(f: CubicMap, max_period: int,
                     traces: dict[Fraction, RayTrace] | None = None,
                     ) -> list[ColandingPair]:
    """Pairs of periodic rays landing at one repelling periodic point.

    Landed rays are clustered by landing point (radius 1e-5); each cluster
    of two or more whose point is periodic with multiplier off the closed
    unit disk is reported as consecutive pairs in angle order.  Rays that
    stall or hit a precritical point are dropped.
    """
    if not 1 <= max_period <= CENSUS_PERIOD_CAP:
        raise ValueError("max_period must be in 1..4")
    if traces is None:
        traces = trace_periodic_rays(f, max_period)
    clusters: list[tuple[list[Fraction], list[complex]]] = []
    for a, tr in traces.items():
        if tr.status != "Landed":
            continue
        for ang, pts in clusters:
            if any(abs(tr.landing - p) < CLUSTER_RADIUS for p in pts):
                ang.append(a)
                pts.append(tr.landing)
                break
        else:
            clusters.append(([a], [tr.landing]))
    pairs = []
    for ang, pts in clusters:
        if len(ang) < 2:
            continue
        x = complex(np.mean(pts))
        period, mu = _orbit_period(f, x, max_period)
        if period == 0 or abs(mu) <= 1.0:
            continue
        ang.sort()
        for a1, a2 in zip(ang, ang[1:]):
            pairs.append(ColandingPair(alpha=a1, beta=a2, landing_point=x,
                                       period=period))
    return pairs


def cutpoint_persistence(f: CubicMap, eps_sequence,
                         max_period: int = 3) -> dict:
    """Follow co-landing pairs of the perturbed maps g_eps as eps shrinks.

    f must have a root-of-unity multiplier and its perturbation must be an
    attracting capture; each census is matched to the next by the angle
    pair, and a matched pair whose landing points settle down (last gap
    below 1e-4) is a witness of a repelling cutpoint surviving to eps=0.
    """
    from . import fates, petals

    if petals.rotation_number(f.lam) is None:
        raise ValueError("multiplier is not a root of unity within tolerance")
    eps = sorted({float(e) for e in eps_sequence}, reverse=True)
    if not eps:
        raise ValueError("eps_sequence is empty")
    verdict = fates.classify(core.perturb(f, eps[0]))
    if verdict.tag != "AttractingCapture":
        raise ValueError("perturbed map classifies as %s, not "
                         "AttractingCapture" % verdict.tag)

    stats = []
    censuses = []
    for e in eps:
        g = core.perturb(f, e)
        traces = trace_periodic_rays(g, max_period)
        pairs = colanding_census(g, max_period, traces=traces)
        by_status = {s: 0 for s in STATUS_NAMES}
        for tr in traces.values():
            by_status[tr.status] += 1
        stats.append({"eps": e, "traced": len(traces),
                      "landed": by_status["Landed"],
                      "stalled": by_status["Stalled"],
                      "hit_critical": by_status["HitCriticalValue"],
                      "pairs": len(pairs)})
        censuses.append({(p.alpha, p.beta): p for p in pairs})

    keys = set(censuses[0])
    for c in censuses[1:]:
        keys &= set(c)
    matched = []
    for key in sorted(keys):
        landings = [c[key].landing_point for c in censuses]
        gaps = [abs(x1 - x0) for x0, x1 in zip(landings, landings[1:])]
        matched.append({"alpha": key[0], "beta": key[1],
                        "period": censuses[-1][key].period,
                        "landings": landings, "gaps": gaps,
                        "converged": bool(gaps) and gaps[-1] < CAUCHY_TOL})
    witnesses = [m for m in matched if m["converged"]]
    return {"eps": eps, "stats": stats, "matched": matched,
            "witnesses": witnesses,
            "message": None if witnesses else "no witnesses at this budget"}
