import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest

from cubq import rays
from cubq.core import (CubicMap, critical_points, derivative, evaluate,
                       iterate_orbit)
from cubq.rays import (colanding_census, cutpoint_persistence, green,
                       periodic_angles, trace_periodic_rays, trace_ray)


def _escaping_maps(n, seed=11):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        lam = rng.uniform(1.05, 1.6) * np.exp(2j * np.pi * rng.uniform())
        b = 2.0 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        f = CubicMap(complex(lam), complex(b))
        c = critical_points(f)
        if all(iterate_orbit(f, z, 2048).fate.tag == "Escaped"
               for z in (c.c_plus, c.c_minus)):
            out.append(f)
    return out


def test_green_pure_cube():
    f = CubicMap(0j, 0j)
    assert abs(green(f, math.e + 0j) - 1.0) < 1e-12
    assert abs(green(f, 2j) - math.log(2.0)) < 1e-12


def test_green_zero_on_filled_set():
    assert green(CubicMap(0j, 0j), 0.5 + 0j) == 0.0
    assert green(CubicMap(0.5 + 0j, 0j), 0.1 + 0.1j) == 0.0


def test_green_direct_limit_oracle():
    mp.mp.dps = 60
    z = mp.mpc(4)
    for _ in range(64):
        z = 3 * z ** 2 + z ** 3
    oracle = float(mp.log(abs(z)) / mp.mpf(3) ** 64)
    assert abs(green(CubicMap(0j, 3.0 + 0j), 4.0 + 0j) - oracle) < 1e-9


def test_periodic_angles_small():
    assert periodic_angles(1) == [Fraction(0), Fraction(1, 2)]
    assert periodic_angles(2) == [Fraction(1, 8), Fraction(1, 4),
                                  Fraction(3, 8), Fraction(5, 8),
                                  Fraction(3, 4), Fraction(7, 8)]


def test_periodic_angles_period_three():
    angs = periodic_angles(3)
    assert len(angs) == 24
    for a in angs:
        assert 26 % a.denominator == 0
        assert (27 * a) % 1 == a
        assert (3 * a) % 1 != a


def test_periodic_angles_inexact_mode():
    assert len(periodic_angles(2, exact=False)) == 8


def test_periodic_angles_guards():
    with pytest.raises(ValueError):
        periodic_angles(0)
    with pytest.raises(ValueError):
        periodic_angles(13)


def test_trace_cube_fixed_rays():
    f = CubicMap(0j, 0j)
    r0 = trace_ray(f, Fraction(0))
    r2 = trace_ray(f, Fraction(1, 2))
    assert r0.status == "Landed" and abs(r0.landing - 1.0) < 1e-6
    assert r2.status == "Landed" and abs(r2.landing + 1.0) < 1e-6


def test_trace_lands_on_repelling_fixed_point():
    f = CubicMap(0.5 + 0j, 0j)
    r = trace_ray(f, Fraction(0))
    assert r.status == "Landed"
    assert abs(r.landing - math.sqrt(0.5)) < 1e-6
    assert abs(derivative(f, r.landing)) > 1.0


def test_trace_landing_step_invariant():
    r = trace_ray(CubicMap(0.5 + 0j, 0j), Fraction(1, 2))
    assert r.status == "Landed"
    assert abs(r.points[-1] - r.points[-2]) < 1e-6


def test_trace_green_schedule():
    f = CubicMap(0j, 0j)
    r = trace_ray(f, Fraction(0))
    g = [green(f, z) for z in r.points]
    gs = [v for v in g if v > 1e-9]
    for a, b in zip(gs, gs[1:]):
        assert b < a
        assert abs(b / a - 0.5) < 0.05


def test_equivariance_under_tripling():
    worst = 0.0
    for f in _escaping_maps(5):
        traces = trace_periodic_rays(f, 3)
        checked = 0
        for a, tr in traces.items():
            tr3 = traces[(3 * a) % 1]
            if tr.status == "Landed" and tr3.status == "Landed":
                worst = max(worst,
                            abs(evaluate(f, tr.landing) - tr3.landing))
                checked += 1
        assert checked > 0
    assert worst < 1e-5


def test_odd_map_landing_symmetry():
    traces = trace_periodic_rays(CubicMap(0.5 + 0j, 0j), 2)
    for a, tr in traces.items():
        tr2 = traces[(a + Fraction(1, 2)) % 1]
        if tr.status == "Landed" and tr2.status == "Landed":
            assert abs(tr.landing + tr2.landing) < 1e-6


def test_census_cube_empty():
    assert colanding_census(CubicMap(0j, 0j), 3) == []


def test_census_capture_example():
    f = CubicMap(0.6 + 0j, 2.0 + 0.7j)
    pairs = colanding_census(f, 3)
    assert pairs
    traces = trace_periodic_rays(f, 3)
    for p in pairs:
        # cluster radius sanity and the repelling periodic invariants
        assert abs(traces[p.alpha].landing - traces[p.beta].landing) < 2e-5
        x = p.landing_point
        mu = 1.0 + 0j
        z = x
        for _ in range(p.period):
            mu *= derivative(f, z)
            z = evaluate(f, z)
        assert abs(z - x) < 1e-6
        assert abs(mu) > 1.0


def test_census_validates_cap():
    with pytest.raises(ValueError):
        colanding_census(CubicMap(0j, 0j), 5)


def test_persistence_witness():
    f = CubicMap(1.0 + 0j, 1.925j)
    rep = cutpoint_persistence(f, (1e-2, 1e-3, 1e-4))
    assert rep["eps"] == [1e-2, 1e-3, 1e-4]
    assert rep["witnesses"]
    w = {(m["alpha"], m["beta"]): m for m in rep["witnesses"]}
    key = (Fraction(7, 13), Fraction(25, 26))
    assert key in w
    assert w[key]["period"] == 3
    assert len(w[key]["landings"]) == 3
    assert w[key]["gaps"][-1] < 1e-4
    assert rep["message"] is None


def test_persistence_rejects_non_parabolic():
    with pytest.raises(ValueError):
        cutpoint_persistence(CubicMap(0.5 + 0j, 0j), (1e-2,))


def test_persistence_rejects_non_capture_perturbation():
    # the perturbed map escapes here, so the experiment has no subject
    with pytest.raises(ValueError):
        cutpoint_persistence(CubicMap(1.0 + 0j, 1.85j), (1e-2, 1e-3))
    with pytest.raises(ValueError):
        cutpoint_persistence(CubicMap(1.0 + 0j, 0j), (1e-2,))
