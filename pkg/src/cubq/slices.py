"""Parameter-plane rasters at fixed multiplier.

A slice raster marks, per pixel b, escape of each critical orbit, membership
in the cubic connectedness locus, membership in the principal hyperbolic
domain (both critical points in the raster immediate basin of one attracting
fixed point), the grid closure of that set, and its topological hull.  The
bounded holes of the hull, minus the closure, are the components the main
experiment samples and classifies.

With the multiplier on the unit circle the domain itself has no interior in
the slice, so the flag is filled by a calibrated stand-in: parabolic
multipliers are handled through a small multiplier perturbation, irrational
rotations through a bounded-orbit test that rejects parameters where a
critical orbit dives deep toward the fixed point (capture behavior), settles
on a different attractor, stops winding at the multiplier's rotation number,
or is lost by the zero fixed point once the multiplier is contracted
slightly inside the circle.
"""

from __future__ import annotations

import cmath
import logging
import math
from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import ndimage

from . import backend, fates
from .core import CubicMap, capture_radius
from .fates import Budgets
from .petals import rotation_number

LOG = logging.getLogger(__name__)

DEFAULT_WINDOW = (-2.5, -2.5, 2.5, 2.5)
DEFAULT_RESOLUTION = (1024, 1024)
MIN_COMPONENT_PIXELS = 8
PERTURB_EPS = 1e-2
DIVE_RADIUS = 0.12
ROT_TAIL = 512
SUB_RESOLUTION = 256


@dataclass(frozen=True)
class SliceRaster:
    lam: complex
    window: tuple[float, float, float, float]
    resolution: tuple[int, int]
    escape1: np.ndarray
    escape2: np.ndarray
    in_M3: np.ndarray
    in_PHD: np.ndarray
    in_P_closure: np.ndarray
    in_hull: np.ndarray
    component_id: np.ndarray


@dataclass(frozen=True)
class ComponentReport:
    component_id: int
    pixel_count: int
    bbox: tuple[int, int, int, int]
    histogram: dict = field(default_factory=dict)
    verdict: str | None = None
    main_theorem_consistent: bool | None = None


def _pixel_centers(window, resolution):
    x0, y0, x1, y1 = window
    nx, ny = resolution
    xs = x0 + (np.arange(nx) + 0.5) * (x1 - x0) / nx
    ys = y0 + (np.arange(ny) + 0.5) * (y1 - y0) / ny
    return xs[None, :] + 1j * ys[:, None]


def _slot_point(lam, b, slot):
    """Nonzero fixed point in the kernel's slot convention (1 big, 2 small),
    with its multiplier."""
    c = lam - 1.0
    s = (b * b - 4.0 * c) ** 0.5
    big = -(b + s) / 2.0 if (b.real * s.real + b.imag * s.imag) >= 0 \
        else (s - b) / 2.0
    p = 0j if slot == 0 else (big if slot == 1 else c / big)
    return p, lam + p * (2.0 * b + 3.0 * p)


def _immediate_pair_test(lam, b, slot, sub_budget):
    """Both critical points inside the raster immediate basin of the slot
    fixed point, at the reduced dynamical resolution."""
    f = CubicMap(lam, b)
    from .core import critical_points
    c = critical_points(f)
    p, mu = _slot_point(lam, b, slot)
    delta = capture_radius(p, mu, b)
    r = max(1.0, 1.5 * max(abs(c.c_plus), abs(c.c_minus)))
    _, found = backend.immediate_component(
        lam, b, p, delta, (-r, -r, r, r), (SUB_RESOLUTION, SUB_RESOLUTION),
        sub_budget, stops=(c.c_plus, c.c_minus), early_stop=True)
    return found[0] and found[1]


def _hull_mask(mask):
    """Union of the mask with the bounded components of its complement;
    second return is whether the mask touches the window border."""
    comp, n = ndimage.label(~mask)
    border = np.zeros(n + 1, dtype=bool)
    for edge in (comp[0], comp[-1], comp[:, 0], comp[:, -1]):
        border[np.unique(edge)] = True
    hull = mask | (~border[comp] & (comp > 0))
    touches = bool(mask[0].any() or mask[-1].any()
                   or mask[:, 0].any() or mask[:, -1].any())
    return hull, touches


def _label_holes(in_hull, in_P_closure, min_pixels=MIN_COMPONENT_PIXELS):
    """Ids cover every hole (largest first) so they are stable however the
    report list is filtered."""
    holes = in_hull & ~in_P_closure
    lab, n = ndimage.label(holes)
    ids = np.zeros(lab.shape, dtype=np.uint16)
    reports = []
    if n == 0:
        return ids, reports
    sizes = ndimage.sum_labels(holes, lab, index=np.arange(1, n + 1))
    boxes = ndimage.find_objects(lab)
    order = sorted((-int(sizes[k - 1]), boxes[k - 1][0].start,
                    boxes[k - 1][1].start, k) for k in range(1, n + 1))
    for new_id, (neg, y0, x0, k) in enumerate(order, start=1):
        ids[lab == k] = new_id
        if -neg < min_pixels:
            continue
        sy, sx = boxes[k - 1]
        reports.append(ComponentReport(
            component_id=new_id, pixel_count=-neg,
            bbox=(sx.start, sy.start, sx.stop - 1, sy.stop - 1)))
    return ids, reports


def compute_slice(lam, window=DEFAULT_WINDOW,
                  resolution=DEFAULT_RESOLUTION,
                  budgets: Budgets | None = None) -> SliceRaster:
    """Rasterize one multiplier slice of the parameter plane.

    Flags nest (domain inside locus, closure inside hull) by construction;
    holes of the hull get component ids, largest first.
    """
    lam = complex(lam)
    if abs(lam) > 1.0 + 1e-12:
        raise ValueError("multiplier outside closed unit disk")
    budgets = budgets or Budgets()
    nx, ny = resolution
    bs = _pixel_centers(window, resolution)
    tgt, steps, minr = backend.orbit_fates(lam, bs.ravel(),
                                           budgets.iterations,
                                           budgets.tail_skip)
    tgt = tgt.reshape(ny, nx, 2)
    minr = minr.reshape(ny, nx, 2)
    escape1 = tgt[:, :, 0] == -2
    escape2 = tgt[:, :, 1] == -2
    in_M3 = ~escape1 & ~escape2

    if abs(lam) < 1.0 - 1e-9:
        in_PHD = _domain_attracting(lam, bs, tgt, in_M3,
                                    budgets.raster_budget)
    elif rotation_number(lam) is not None:
        in_PHD = _domain_parabolic(lam, bs, in_M3, budgets)
    else:
        in_PHD = _domain_neutral(lam, bs, tgt, minr, in_M3, budgets)

    in_P_closure = ndimage.binary_dilation(in_PHD)
    in_hull, touches = _hull_mask(in_P_closure)
    if touches:
        LOG.warning("flagged set touches the window border; "
                    "hull is only a lower bound")
    ids, _ = _label_holes(in_hull, in_P_closure)
    return SliceRaster(lam=lam, window=tuple(float(v) for v in window),
                       resolution=(nx, ny), escape1=escape1, escape2=escape2,
                       in_M3=in_M3, in_PHD=in_PHD, in_P_closure=in_P_closure,
                       in_hull=in_hull, component_id=ids)


def _domain_attracting(lam, bs, tgt, in_M3, sub_budget):
    same = (tgt[:, :, 0] == tgt[:, :, 1]) & (tgt[:, :, 0] >= 0) \
        & (tgt[:, :, 0] <= 2) & in_M3
    out = np.zeros_like(same)
    for iy, ix in zip(*np.nonzero(same)):
        b = complex(bs[iy, ix])
        out[iy, ix] = _immediate_pair_test(lam, b, int(tgt[iy, ix, 0]),
                                           sub_budget)
    return out


def _domain_parabolic(lam, bs, in_M3, budgets):
    """Slide the multiplier off the circle and use the attracting test; the
    sub-raster budget stretches with the slower contraction."""
    lam2 = (1.0 - PERTURB_EPS) * lam
    tgt2, _, _ = backend.orbit_fates(lam2, bs.ravel(), budgets.iterations,
                                     budgets.tail_skip)
    ny, nx = bs.shape
    tgt2 = tgt2.reshape(ny, nx, 2)
    sub_budget = max(budgets.raster_budget,
                     int(math.ceil(80.0 / PERTURB_EPS)))
    return _domain_attracting(lam2, bs, tgt2, in_M3, sub_budget)


def _domain_neutral(lam, bs, tgt, minr, in_M3, budgets):
    """Stand-in for the closed domain on an irrational-rotation slice: keep
    bounded parameters whose critical orbits neither fall onto another
    attractor nor dive inside the invariant disk around the fixed point,
    whose orbit tails wind around 0 at the multiplier's rotation number, and
    which keep both critical orbits converging to 0 after the multiplier is
    contracted inside the circle.

    The winding test drops ghost lockings next to just-bifurcated attracting
    cycles (those tails circle 0 at a nearby rational instead), and the
    contracted reprobe drops the cycle tongues together with a displaced copy
    of each; both otherwise wall the tongues into spurious bounded holes
    instead of leaving them joined to the unbounded complement.
    """
    other = (tgt[:, :, 0] > 0) | (tgt[:, :, 1] > 0)
    dive = (minr[:, :, 0] < DIVE_RADIUS) | (minr[:, :, 1] < DIVE_RADIUS)
    cand = in_M3 & ~other & ~dive
    if not cand.any():
        return cand
    sub = bs[cand]
    theta = (cmath.phase(lam) / (2.0 * math.pi)) % 1.0
    rot = backend.tail_rotation(lam, sub, budgets.iterations, ROT_TAIL)
    d = np.abs(rot - theta) % 1.0
    ok = (np.minimum(d, 1.0 - d) <= fates.ROTATION_TOL).all(axis=1)
    lam2 = (1.0 - PERTURB_EPS) * lam
    budget2 = max(budgets.iterations, int(math.ceil(80.0 / PERTURB_EPS)))
    tgt2, _, _ = backend.orbit_fates(lam2, sub, budget2, budgets.tail_skip)
    ok &= (tgt2[:, 0] == 0) & (tgt2[:, 1] == 0)
    out = np.zeros_like(cand)
    out[cand] = ok
    return out


def topological_hull(raster: SliceRaster,
                     flag: str = "in_P_closure") -> SliceRaster:
    """Fill the bounded complement of the chosen flag layer into in_hull."""
    hull, touches = _hull_mask(getattr(raster, flag))
    if touches:
        LOG.warning("flagged set touches the window border; "
                    "hull is only a lower bound")
    ids, _ = _label_holes(hull, raster.in_P_closure)
    return replace(raster, in_hull=hull, component_id=ids)


def extract_components(raster: SliceRaster,
                       min_pixels: int = MIN_COMPONENT_PIXELS,
                       ) -> list[ComponentReport]:
    """Bounded holes of the hull: 4-connected components of
    in_hull minus in_P_closure, largest first.

    Components below min_pixels are dropped as aliasing noise; pass 1 to
    see everything.
    """
    _, reports = _label_holes(raster.in_hull, raster.in_P_closure,
                              min_pixels)
    return reports


def classify_component(raster: SliceRaster, report: ComponentReport,
                       n_samples: int = 16,
                       budgets: Budgets | None = None) -> ComponentReport:
    """Sample deep-interior pixels of one component, classify each map, and
    fill the verdict histogram.

    The dominant tag among decided samples becomes the verdict; with every
    sample undecided the verdict is Undecided and the consistency flag is
    left indeterminate rather than set false.
    """
    mask = raster.component_id == report.component_id
    if not mask.any():
        raise ValueError("component %d has no pixels" % report.component_id)
    depth = ndimage.distance_transform_edt(mask)
    ys, xs = np.nonzero(mask)
    order = np.argsort(-depth[ys, xs], kind="stable")[:n_samples]
    bs = _pixel_centers(raster.window, raster.resolution)
    hist = Counter()
    for i in order:
        b = complex(bs[ys[i], xs[i]])
        hist[fates.classify(CubicMap(raster.lam, b), budgets).tag] += 1
    decided = {t: c for t, c in hist.items() if t != fates.TAG_UNDECIDED}
    if decided:
        verdict = sorted(decided.items(), key=lambda tc: (-tc[1], tc[0]))[0][0]
        consistent = verdict in (fates.TAG_SIEGEL_CAPTURE,
                                 fates.TAG_QUEER_CANDIDATE)
    else:
        verdict = fates.TAG_UNDECIDED
        consistent = None
    return replace(report, histogram=dict(hist), verdict=verdict,
                   main_theorem_consistent=consistent)
