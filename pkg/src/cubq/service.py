"""HTTP facade over the computational modules.

GET /api/slice     binary slice tile, cached on disk under its content key;
                   a tile still computing past the synchronous wait answers
                   503 with Retry-After
GET /api/dynamics  dynamical-plane tile in the same container: the header
                   pair holds b, the u8 plane fate codes (0 undecided,
                   1 converged to the chosen attractor, 2 escaped), the u16
                   plane 4-connected fate labels
GET /api/classify  verdict JSON for one parameter
GET /api/petal     parabolic germ report JSON
GET /api/rays      co-landing census JSON with ray polylines
GET /api/health    version JSON

Validation failures answer 400.  Tile jobs run on a bounded FIFO pool, so
request handling never blocks on computation.
"""

from __future__ import annotations

import json
import os
import threading
from concurrent.futures import Future, ThreadPoolExecutor
from concurrent.futures import TimeoutError as JobTimeout
from dataclasses import asdict

import numpy as np
from fastapi import FastAPI, Response
from fastapi.responses import JSONResponse
from scipy import ndimage

from . import __version__, backend, fates, petals, rays, slices, tileio
from .cli import _jsonable
from .config import Settings
from .core import CubicMap, derivative
from .fates import Budgets

SYNC_WAIT_S = 30.0
RETRY_AFTER_S = 5
MAX_RES = 4096
MAX_BUDGET = 10_000_000

_TILE_MEDIA = "application/octet-stream"


def _check(ok: bool, message: str):
    if not ok:
        raise ValueError(message)


def _validate_window(x0, y0, x1, y1):
    _check(x0 < x1 and y0 < y1, "window must have x0 < x1 and y0 < y1")


def _validate_lam(lam: complex):
    _check(abs(lam) <= 1.0 + 1e-12, "multiplier outside closed unit disk")


def _code_labels(codes: np.ndarray) -> np.ndarray:
    """Number 4-connected equal-code regions, mirroring basin rasters."""
    labels = np.zeros(codes.shape, dtype=np.int32)
    nxt = 1
    for code in (0, 1, 2):
        lab, n = ndimage.label(codes == code)
        labels[lab > 0] = lab[lab > 0] + (nxt - 1)
        nxt += n
    return labels


def _best_attracting_fixed_point(f: CubicMap) -> complex | None:
    candidates = [0j] + [complex(r) for r in np.roots([1.0, f.b, f.lam - 1.0])]
    best, best_mu = None, 1.0 - 1e-9
    for p in candidates:
        mu = abs(derivative(f, p))
        if mu < best_mu:
            best, best_mu = p, mu
    return best


def _dynamics_tile(f: CubicMap, window, resolution, budget) -> bytes:
    target = _best_attracting_fixed_point(f)
    if target is not None:
        raster = fates.basin_raster(f, target, window, resolution, budget)
        codes, labels = raster.codes, raster.labels
    else:
        # nothing attracts: the escape silhouette is still worth painting
        codes, _ = backend.target_grid(f.lam, f.b, 0j, 1e-12, window,
                                       resolution, budget)
        labels = _code_labels(codes)
    return tileio.pack_planes(f.b, window, resolution, codes,
                              np.minimum(labels, 0xFFFF))


def build_app(settings: Settings | None = None,
              sync_wait: float = SYNC_WAIT_S) -> FastAPI:
    settings = settings or Settings()
    cache_dir = settings.cache_path
    cache_dir.mkdir(parents=True, exist_ok=True)
    executor = ThreadPoolExecutor(max_workers=settings.workers)
    jobs: dict[str, Future] = {}
    lock = threading.Lock()

    app = FastAPI(title="cubq", version=__version__)

    @app.exception_handler(ValueError)
    def _bad_request(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__,
                "workers": settings.workers}

    def _compute_tile(lam, window, res, budgets, path):
        raster = slices.compute_slice(lam, window, (res, res), budgets)
        meta = {"budgets": asdict(budgets), "version": __version__}
        tileio.sidecar_path(path).write_text(json.dumps(meta, sort_keys=True))
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_bytes(tileio.encode_tile(raster))
        os.replace(tmp, path)

    @app.get("/api/slice")
    def api_slice(lambda_re: float, lambda_im: float = 0.0,
                  x0: float = -2.5, y0: float = -2.5,
                  x1: float = 2.5, y1: float = 2.5,
                  res: int = 512, budget: int = 4096):
        lam = complex(lambda_re, lambda_im)
        window = (x0, y0, x1, y1)
        _validate_lam(lam)
        _validate_window(*window)
        _check(1 <= res <= MAX_RES, "res must be in 1..%d" % MAX_RES)
        _check(1 <= budget <= MAX_BUDGET, "budget out of range")
        budgets = Budgets(iterations=budget)
        key = tileio.content_key(lam, window, (res, res), budgets)
        path = cache_dir / (key + ".cubq")
        if not path.exists():
            with lock:
                fut = jobs.get(key)
                if fut is None:
                    fut = executor.submit(_compute_tile, lam, window, res,
                                          budgets, path)
                    jobs[key] = fut
            try:
                fut.result(timeout=sync_wait)
            except JobTimeout:
                return Response(status_code=503,
                                headers={"Retry-After": str(RETRY_AFTER_S)})
            finally:
                if fut.done():
                    with lock:
                        jobs.pop(key, None)
        return Response(path.read_bytes(), media_type=_TILE_MEDIA,
                        headers={"X-Content-Key": key})

    @app.get("/api/dynamics")
    def api_dynamics(lambda_re: float, lambda_im: float = 0.0,
                     b_re: float = 0.0, b_im: float = 0.0,
                     x0: float = -2.0, y0: float = -2.0,
                     x1: float = 2.0, y1: float = 2.0,
                     res: int = 256, budget: int = 512):
        window = (x0, y0, x1, y1)
        _validate_window(*window)
        _check(1 <= res <= 1024, "res must be in 1..1024")
        _check(1 <= budget <= 100_000, "budget out of range")
        f = CubicMap(complex(lambda_re, lambda_im), complex(b_re, b_im))
        return Response(_dynamics_tile(f, window, (res, res), budget),
                        media_type=_TILE_MEDIA)

    @app.get("/api/classify")
    def api_classify(lambda_re: float, lambda_im: float = 0.0,
                     b_re: float = 0.0, b_im: float = 0.0):
        f = CubicMap(complex(lambda_re, lambda_im), complex(b_re, b_im))
        _validate_lam(f.lam)
        report = fates.classify(f)
        return _jsonable({"tag": report.tag, "evidence": report.evidence})

    @app.get("/api/petal")
    def api_petal(lambda_re: float, lambda_im: float = 0.0,
                  b_re: float = 0.0, b_im: float = 0.0, check: int = 0):
        f = CubicMap(complex(lambda_re, lambda_im), complex(b_re, b_im))
        spec = petals.parabolic_germ(f)
        payload = {"spec": asdict(spec),
                   "repelling_vectors": petals.repelling_vectors(spec)}
        if check:
            payload["violations"] = petals.check_petal_properties(
                f, spec, n_samples=check)
        return _jsonable(payload)

    @app.get("/api/rays")
    def api_rays(lambda_re: float, lambda_im: float = 0.0,
                 b_re: float = 0.0, b_im: float = 0.0, max_period: int = 3):
        f = CubicMap(complex(lambda_re, lambda_im), complex(b_re, b_im))
        traces = rays.trace_periodic_rays(f, max_period)
        pairs = rays.colanding_census(f, max_period, traces)
        return _jsonable({
            "pairs": [asdict(p) for p in pairs],
            "rays": [{"angle": angle, "status": t.status,
                      "landing": t.landing, "points": t.points}
                     for angle, t in sorted(traces.items())],
        })

    return app


def serve(settings: Settings | None = None):
    import uvicorn
    settings = settings or Settings()
    uvicorn.run(build_app(settings), host="127.0.0.1", port=settings.port)
