"""Parabolic machinery at the neutral fixed point 0.

When lam is a root of unity, the q-th iterate has the normal form
z + a*z^(m+1) + O(z^(m+2)) with m petals (m = q or 2q).  This module finds
the rotation number, composes the map symbolically, extracts (m, a), builds
repelling directions and attracting petals, and runs the petal property and
perturbed-basin experiments on them.
"""

from __future__ import annotations

import cmath
import functools
import math
from dataclasses import dataclass, replace

import numpy as np

from . import backend, core
from .core import CubicMap

ROT_UNITY_TOL = 1e-9       # |lam^q - 1| below this detects rotation number
GERM_REL_TOL = 1e-9        # relative threshold for vanishing coefficients
COMPOSE_Q_MAX = 7          # degree 3^q stays within 2187


@dataclass(frozen=True)
class RotationNumber:
    p: int
    q: int


@dataclass(frozen=True)
class PetalSpec:
    """Germ data (p/q, m, a) plus the petal geometry.

    The petal with index k is the set of z inside the open sector between
    consecutive repelling rays k and k+1, with |z| < disk_radius and
    Re(z^-m * conj(a)) < -M.
    """

    rotation: RotationNumber
    m: int
    a: complex
    M: float
    disk_radius: float
    sector_index: int = 0


def rotation_number(lam: complex, q_max: int = 64) -> RotationNumber | None:
    """Smallest q <= q_max with lam^q ~ 1, or None in the irrational regime."""
    if abs(abs(lam) - 1.0) > 1e-9:
        raise ValueError("rotation number needs |lam| = 1")
    w = 1.0 + 0.0j
    for q in range(1, q_max + 1):
        w *= lam
        if abs(w - 1.0) < ROT_UNITY_TOL:
            p = round(q * (cmath.phase(lam) / (2.0 * math.pi))) % q
            if math.gcd(p, q) != 1:
                raise ValueError("rotation detection produced a non-reduced p/q")
            return RotationNumber(p=p, q=q)
    return None


def compose_q(f: CubicMap, q: int) -> np.ndarray:
    """Ascending coefficients of the q-fold composition, length 3^q + 1."""
    if not 1 <= q <= COMPOSE_Q_MAX:
        raise ValueError(f"q must be in 1..{COMPOSE_Q_MAX}")
    base = np.array([0.0, f.lam, f.b, 1.0], dtype=np.complex128)
    cur = base
    for _ in range(q - 1):
        w2 = np.convolve(cur, cur)
        w3 = np.convolve(w2, cur)
        out = np.zeros(w3.size, dtype=np.complex128)
        out[: cur.size] += f.lam * cur
        out[: w2.size] += f.b * w2
        out += w3
        cur = out
    return cur


@functools.lru_cache(maxsize=256)
def parabolic_germ(f: CubicMap, rot: RotationNumber | None = None) -> PetalSpec:
    """Extract (m, a) from the coefficients of f^q and fill petal defaults.

    m+1 is the first non-vanishing degree above 1; a is its coefficient.
    Raises if the germ degenerates (all candidate coefficients vanish) or if
    m lands outside {q, 2q}.  Results are cached: the default depth M is found
    by an escalation search, which is deterministic but not free.
    """
    if rot is None:
        rot = rotation_number(f.lam)
        if rot is None:
            raise ValueError("map is not parabolic at 0")
    q = rot.q
    coeffs = compose_q(f, q)
    if abs(coeffs[1] - 1.0) > 1e-6:
        raise ValueError("linear coefficient of f^q is not 1")
    thr = GERM_REL_TOL * np.max(np.abs(coeffs))
    idx = 0
    for k in range(2, coeffs.size):
        if abs(coeffs[k]) > thr:
            idx = k
            break
    if idx == 0 or idx > 2 * q + 1:
        raise ValueError("degenerate germ: no usable coefficient up to order 2q+1")
    m = idx - 1
    if m not in (q, 2 * q):
        raise ValueError(f"petal count m={m} outside {{q, 2q}}")
    a = complex(coeffs[idx])
    radius = _default_disk_radius(coeffs, m)
    # smallest power of 2 >= 8/|a| whose petal passes the property check,
    # doubling the half-plane depth until it does
    M = 2.0 ** math.ceil(math.log2(8.0 / abs(a)))
    spec = PetalSpec(rotation=rot, m=m, a=a, M=M, disk_radius=radius, sector_index=0)
    for _ in range(40):
        rep = check_petal_properties(f, spec, n_samples=1000, seed=0)
        if rep["violations_total"] == 0:
            return spec
        spec = replace(spec, M=spec.M * 2.0)
    raise ValueError("no half-plane depth M passed the petal property check")


def _default_disk_radius(coeffs: np.ndarray, m: int) -> float:
    """Half the distance from 0 to the nearest other fixed point of f^q,
    capped at 0.5.

    The fixed-point polynomial f^q(z) - z has a root of multiplicity m+1 at 0
    (its coefficients of order <= m vanish within the germ tolerance), so the
    nonzero fixed points are the roots of the polynomial deflated by z^(m+1).
    """
    poly = coeffs[m + 1:][::-1]
    roots = np.roots(poly)
    if roots.size == 0:
        return 0.5
    return min(0.5, 0.5 * float(np.min(np.abs(roots))))


def repelling_vectors(spec: PetalSpec) -> list[complex]:
    """Unit directions v with a*v^m positive real, one per petal boundary."""
    phi = cmath.phase(spec.a)
    return [cmath.exp(1j * (-phi + 2.0 * math.pi * k) / spec.m)
            for k in range(spec.m)]


def petal_membership(spec: PetalSpec, z: complex) -> bool:
    """Is z in the closed-at-0, otherwise open attracting petal sector_index?"""
    if z == 0:
        return True
    r = abs(z)
    if r >= spec.disk_radius:
        return False
    m = spec.m
    phi = cmath.phase(spec.a)
    theta = cmath.phase(z)
    alpha_k = (-phi + 2.0 * math.pi * spec.sector_index) / m
    d = (theta - alpha_k) % (2.0 * math.pi)
    if not 0.0 < d < 2.0 * math.pi / m:
        return False
    return math.cos(m * theta + phi) < -(spec.M * r ** m) / abs(spec.a)


def petal_potential(spec: PetalSpec, z: complex) -> float:
    """Re(z^-m * conj(a)), the half-plane coordinate; decreases under f^q."""
    r = abs(z)
    theta = cmath.phase(z)
    phi = cmath.phase(spec.a)
    return r ** (-spec.m) * abs(spec.a) * math.cos(spec.m * theta + phi)


def sample_petal(spec: PetalSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """n points strictly inside the petal, drawn over the sector coordinates.

    The radial draw floors at 5% of the local depth: closer to the cusp the
    half-plane potential exceeds 1/ulp of itself, and no finite-precision test
    could resolve a potential drop there anyway.
    """
    m = spec.m
    phi = cmath.phase(spec.a)
    psi = rng.uniform(math.pi / 2 + 0.01, 3 * math.pi / 2 - 0.01, n)
    rmax = (abs(spec.a) * (-np.cos(psi)) / spec.M) ** (1.0 / m)
    rmax = np.minimum(rmax, spec.disk_radius * (1.0 - 1e-9))
    r = rng.uniform(0.05, 1.0, n) * rmax
    theta = (psi - phi + 2.0 * math.pi * spec.sector_index) / m
    return r * np.exp(1j * theta)


def all_sector_specs(spec: PetalSpec) -> list[PetalSpec]:
    return [replace(spec, sector_index=k) for k in range(spec.m)]


def check_petal_properties(f: CubicMap, spec: PetalSpec, n_samples: int = 1000,
                           seed: int = 0) -> dict:
    """Sample the petal and test the three defining properties.

    (1) t*P inside P for t in 0.1..0.9; (2) f^q maps the petal into itself and
    the f^q-orbit converges to 0, witnessed by the half-plane potential
    dropping at least 0.5*m*|a|^2 per application on average; (3) f sends the
    petal into the half-depth petal whose sector index is shifted by p*(m/q).
    Violations are counted, not raised.
    """
    rng = np.random.default_rng(seed)
    pts = sample_petal(spec, n_samples, rng)
    rot = spec.rotation
    shift = (spec.sector_index + rot.p * (spec.m // rot.q)) % spec.m
    # the image only has to land in some member of the petal family, not the
    # equal-depth one; half depth gives the image petal the room the single
    # map's sector rotation needs
    spec_shift = replace(spec, sector_index=shift, M=spec.M / 2.0)
    n_steps = 48
    v1 = v2 = v3 = 0
    examples = []
    for z in pts:
        ok1 = all(petal_membership(spec, t * z) for t in np.arange(0.1, 0.95, 0.1))
        w = z
        for _ in range(rot.q):
            w = core.evaluate(f, w)
        ok2 = petal_membership(spec, w)
        if ok2:
            u = z
            for _ in range(n_steps * rot.q):
                u = core.evaluate(f, u)
            drop = petal_potential(spec, z) - petal_potential(spec, u)
            ok2 = drop >= 0.5 * n_steps * spec.m * abs(spec.a) ** 2
        ok3 = petal_membership(spec_shift, core.evaluate(f, z))
        v1 += not ok1
        v2 += not ok2
        v3 += not ok3
        if not (ok1 and ok2 and ok3) and len(examples) < 5:
            examples.append(complex(z))
    return {
        "n_samples": n_samples,
        "violations_scaling": v1,
        "violations_invariance": v2,
        "violations_rotated_image": v3,
        "violations_total": v1 + v2 + v3,
        "shifted_sector": shift,
        "counterexamples": examples,
    }


def petal_in_perturbed_basin(f: CubicMap, spec: PetalSpec, eps: float,
                             n_samples: int = 1000, seed: int = 0) -> dict:
    """Iterate petal samples under the perturbed map and count any that fail
    to fall into the contraction disk at 0."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    rng = np.random.default_rng(seed)
    pts = sample_petal(spec, n_samples, rng)
    g = core.perturb(f, eps)
    delta = core.capture_radius(0j, g.lam, g.b)
    budget = max(4096, int(math.ceil(120.0 / eps)))
    codes = backend.point_fates_zero(g.lam, g.b, pts, budget, delta)
    fails = int(np.sum(codes != 1))
    return {
        "eps": eps,
        "n_samples": n_samples,
        "failure_fraction": fails / n_samples,
        "budget": budget,
        "escaped": int(np.sum(codes == 2)),
        "undecided": int(np.sum(codes == 0)),
    }


def germ_residual_exponent(f: CubicMap, spec: PetalSpec, n: int = 1000,
                           seed: int = 0) -> float:
    """Fitted slope of log|f^q(z) - z - a z^(m+1)| against log|z| on small z.

    The normal form makes the residual O(z^(m+2)); returns inf when the
    residual vanishes identically (the composition IS the normal form).
    """
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(math.log(1e-3), math.log(1e-2), n))
    th = rng.uniform(0.0, 2.0 * math.pi, n)
    z = r * np.exp(1j * th)
    q = spec.rotation.q
    w = z.copy()
    for _ in range(q):
        w = w * (f.lam + w * (f.b + w))
    res = np.abs(w - z - spec.a * z ** (spec.m + 1))
    # below ~ulp(z) the residual is rounding noise, not signal
    keep = res > 1e-14 * np.abs(z)
    if not keep.any():
        return math.inf
    slope, _ = np.polyfit(np.log(np.abs(z[keep])), np.log(res[keep]), 1)
    return float(slope)
