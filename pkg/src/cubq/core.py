"""Complex polynomial engine for the monic cubic family z -> lam*z + b*z^2 + z^3.

Every map in the family fixes 0 with multiplier lam.  This module provides
evaluation, derivatives, critical and fixed points, escape bounds, orbit
iteration with cycle detection, and the standard small perturbation that makes
the fixed point 0 attracting while staying inside the family.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

# tolerances shared across the package
CONV_TOL = 1e-8           # relative tolerance for cycle detection
ATTRACTING_TOL = 1e-6     # |mu| < 1 - ATTRACTING_TOL counts as attracting
BRENT_PERIOD_CAP = 256    # cycles longer than this report BoundedUndecided

ESCAPED = "Escaped"
ATTRACTED_TO_POINT = "AttractedToPoint"
ATTRACTED_TO_ZERO_BASIN = "AttractedToZeroBasin"
BOUNDED_UNDECIDED = "BoundedUndecided"


@dataclass(frozen=True)
class CubicMap:
    """A member of the family: the pair (lam, b).

    Represents f(z) = lam*z + b*z^2 + z^3, always monic, always fixing 0.
    """

    lam: complex
    b: complex


@dataclass(frozen=True)
class CriticalPair:
    c_plus: complex
    c_minus: complex
    degenerate: bool


@dataclass(frozen=True)
class Fate:
    tag: str
    point: complex = 0j
    period: int = 0


@dataclass
class OrbitRecord:
    seed: complex
    points: list[complex] = field(default_factory=list)
    fate: Fate = Fate(BOUNDED_UNDECIDED)
    steps_used: int = 0


def evaluate(f: CubicMap, z: complex) -> complex:
    """f(z) in Horner order z*(lam + z*(b + z))."""
    return z * (f.lam + z * (f.b + z))


def derivative(f: CubicMap, z: complex) -> complex:
    return f.lam + z * (2.0 * f.b + 3.0 * z)


def critical_points(f: CubicMap) -> CriticalPair:
    """Roots of f'(z) = 3z^2 + 2bz + lam, cancellation-free.

    The larger root is computed from the quadratic formula with the sign
    chosen to avoid cancellation; the smaller root comes from the product
    c_plus * c_minus = lam/3.
    """
    b, lam = f.b, f.lam
    disc = b * b - 3.0 * lam
    degenerate = abs(4.0 * b * b - 12.0 * lam) < 1e-12 * (1.0 + abs(b) ** 2 + abs(lam))
    s = cmath.sqrt(disc)
    # align s with b so |b + s| is maximal
    if (b.real * s.real + b.imag * s.imag) >= 0.0:
        big = -(b + s) / 3.0          # this is the minus-branch root
        small = (lam / (3.0 * big)) if big != 0 else 0j
        return CriticalPair(c_plus=small, c_minus=big, degenerate=degenerate)
    big = (s - b) / 3.0               # plus-branch root
    small = (lam / (3.0 * big)) if big != 0 else 0j
    return CriticalPair(c_plus=big, c_minus=small, degenerate=degenerate)


def fixed_points(f: CubicMap) -> list[tuple[complex, complex]]:
    """All fixed points with their multipliers; 0 always first with mu = lam."""
    out = [(0j, f.lam)]
    b, lam = f.b, f.lam
    c = lam - 1.0                      # z^2 + b z + c = 0
    s = cmath.sqrt(b * b - 4.0 * c)
    if (b.real * s.real + b.imag * s.imag) >= 0.0:
        big = -(b + s) / 2.0
    else:
        big = (s - b) / 2.0
    if big == 0:
        roots = [0j, 0j]
    else:
        roots = [big, c / big]
    scale = 1e-12 * (1.0 + abs(b) + abs(lam))
    for r in roots:
        if all(abs(r - p) > scale for p, _ in out):
            out.append((r, derivative(f, r)))
    return out


def escape_radius(f: CubicMap) -> float:
    """R with |z| >= R implying |f(z)| >= 2|z| (checked by property test)."""
    return 2.0 * (1.0 + abs(f.lam) + abs(f.b))


def attracting_fixed_points(f: CubicMap) -> list[tuple[complex, complex]]:
    return [(p, mu) for p, mu in fixed_points(f) if abs(mu) < 1.0 - ATTRACTING_TOL]


def capture_radius(p: complex, mu: complex, b: complex) -> float:
    """Radius of a disk around an attracting fixed point on which the map
    certifiably contracts toward it.

    Writing f(p+w) - p = mu*w + (b+3p)*w^2 + w^3, any |w| <= delta with
    (|b+3p| + 1)*delta <= (1-|mu|)/2 gives |f(p+w)-p| <= (1+|mu|)/2 * |w|.
    """
    return (1.0 - abs(mu)) / (2.0 * (abs(b + 3.0 * p) + 1.0))


def iterate_orbit(f: CubicMap, seed: complex, budget: int) -> OrbitRecord:
    """Iterate a seed to escape, an attracting cycle, or budget exhaustion.

    Convergence to an attracting fixed point is certified by entering its
    contraction disk; longer cycles are caught by Brent anchors with relative
    tolerance CONV_TOL and a multiplier check.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    R = escape_radius(f)
    targets = attracting_fixed_points(f)
    deltas = [capture_radius(p, mu, f.b) for p, mu in targets]

    rec = OrbitRecord(seed=seed)
    z = seed
    rec.points.append(z)
    anchor = z
    anchor_step = 0
    next_anchor = 1
    for k in range(1, budget + 1):
        z = evaluate(f, z)
        rec.points.append(z)
        rec.steps_used = k
        if abs(z) >= R:
            rec.fate = Fate(ESCAPED)
            return rec
        for (p, _mu), delta in zip(targets, deltas):
            if abs(z - p) < delta:
                if abs(p) < 1e-12:
                    rec.fate = Fate(ATTRACTED_TO_ZERO_BASIN, 0j, 1)
                else:
                    rec.fate = Fate(ATTRACTED_TO_POINT, p, 1)
                return rec
        if abs(z - anchor) < CONV_TOL * max(1.0, abs(z)):
            period = k - anchor_step
            if 0 < period <= BRENT_PERIOD_CAP:
                mu = 1.0 + 0j
                w = z
                for _ in range(period):
                    mu *= derivative(f, w)
                    w = evaluate(f, w)
                if abs(mu) < 1.0 - ATTRACTING_TOL:
                    if any(abs(rec.points[anchor_step + j]) < 1e-6 for j in range(period)):
                        rec.fate = Fate(ATTRACTED_TO_ZERO_BASIN, 0j, period)
                    else:
                        rec.fate = Fate(ATTRACTED_TO_POINT, z, period)
                    return rec
        if k == next_anchor:
            anchor = z
            anchor_step = k
            next_anchor *= 2
    rec.fate = Fate(BOUNDED_UNDECIDED)
    return rec


def perturb(f: CubicMap, eps: float) -> CubicMap:
    """The family member affinely conjugate to (1-eps)*f.

    g has parameters ((1-eps)*lam, sqrt(1-eps)*b).  The conjugacy reads
    g(s*z) = s*(1-eps)*f(z) with s = sqrt(1-eps); equivalently, rescaling by
    1/s on both sides, s'*g(z) = (1-eps)*f(s'*z) with s' = 1/sqrt(1-eps).
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError("eps must lie in [0, 1)")
    s = math.sqrt(1.0 - eps)
    return CubicMap(lam=(1.0 - eps) * f.lam, b=s * f.b)


def conjugacy_residual(f: CubicMap, eps: float, zs: np.ndarray) -> float:
    """Max |g(s*z) - s*(1-eps)*f(z)| over the given z samples, s = sqrt(1-eps)."""
    g = perturb(f, eps)
    s = math.sqrt(1.0 - eps)
    lhs = (s * zs) * (g.lam + (s * zs) * (g.b + (s * zs)))
    rhs = s * (1.0 - eps) * (zs * (f.lam + zs * (f.b + zs)))
    return float(np.max(np.abs(lhs - rhs)))
