"""HTTP endpoints: tile bytes, caching, validation, JSON reports."""

import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

from cubq import __version__, slices, tileio
from cubq.config import Settings
from cubq.service import build_app

GOLDEN_RE, GOLDEN_IM = np.exp(2j * np.pi * ((5 ** 0.5 - 1) / 2)).real, \
    np.exp(2j * np.pi * ((5 ** 0.5 - 1) / 2)).imag

SLICE_Q = {"lambda_re": 0, "lambda_im": 0, "x0": -3.2, "y0": -3.2,
           "x1": 3.2, "y1": 3.2, "res": 16, "budget": 256}


@pytest.fixture()
def client(tmp_path):
    app = build_app(Settings(cache_dir=str(tmp_path / "cache"), workers=1))
    with TestClient(app) as c:
        yield c


def test_health(client):
    r = client.get("/api/health")
    assert r.status_code == 200
    body = r.json()
    assert body["status"] == "ok"
    assert body["version"] == __version__


def test_slice_tile_bytes_and_cache(client):
    r1 = client.get("/api/slice", params=SLICE_Q)
    assert r1.status_code == 200
    assert r1.content[:4] == b"CUBQ"
    raster = tileio.decode_tile(r1.content)
    assert raster.lam == 0j
    assert raster.resolution == (16, 16)
    # identical request: served from cache, byte-identical
    r2 = client.get("/api/slice", params=SLICE_Q)
    assert r2.content == r1.content
    assert r2.headers["X-Content-Key"] == r1.headers["X-Content-Key"]
    # cached bytes equal a fresh recomputation
    from cubq.fates import Budgets
    fresh = slices.compute_slice(0j, (-3.2, -3.2, 3.2, 3.2), (16, 16),
                                 Budgets(iterations=256))
    assert tileio.encode_tile(fresh) == r1.content


def test_slice_validation(client):
    r = client.get("/api/slice", params=dict(SLICE_Q, lambda_re=1.2))
    assert r.status_code == 400
    assert r.json()["detail"] == "multiplier outside closed unit disk"
    assert client.get("/api/slice",
                      params=dict(SLICE_Q, res=0)).status_code == 400
    assert client.get("/api/slice",
                      params=dict(SLICE_Q, x0=5)).status_code == 400
    # missing required parameter
    assert client.get("/api/slice").status_code == 422


def test_slice_503_while_computing(tmp_path, monkeypatch):
    real = slices.compute_slice

    def slow(*args, **kwargs):
        time.sleep(0.3)
        return real(*args, **kwargs)

    monkeypatch.setattr(slices, "compute_slice", slow)
    app = build_app(Settings(cache_dir=str(tmp_path / "cache"), workers=1),
                    sync_wait=0.01)
    with TestClient(app) as c:
        r = c.get("/api/slice", params=SLICE_Q)
        assert r.status_code == 503
        assert "retry-after" in r.headers
        deadline = time.time() + 5.0
        while r.status_code == 503 and time.time() < deadline:
            time.sleep(0.05)
            r = c.get("/api/slice", params=SLICE_Q)
        assert r.status_code == 200
        assert r.content[:4] == b"CUBQ"


def test_dynamics_attracting(client):
    r = client.get("/api/dynamics", params={
        "lambda_re": 0.5, "b_re": 0, "res": 32, "budget": 256})
    assert r.status_code == 200
    pair, window, resolution, codes, labels = tileio.unpack_planes(r.content)
    assert pair == 0j
    assert resolution == (32, 32)
    assert set(np.unique(codes)) <= {0, 1, 2}
    assert (codes == 1).any() and (codes == 2).any()
    # labels refine codes: one label never spans two codes
    for lab in np.unique(labels[labels > 0]):
        assert len(np.unique(codes[labels == lab])) == 1


def test_dynamics_without_attractor(client):
    r = client.get("/api/dynamics", params={
        "lambda_re": GOLDEN_RE, "lambda_im": GOLDEN_IM,
        "b_re": 0.1, "res": 24, "budget": 256})
    assert r.status_code == 200
    pair, _, resolution, codes, _ = tileio.unpack_planes(r.content)
    assert pair == 0.1 + 0j
    assert resolution == (24, 24)
    assert (codes == 2).any()


def test_classify_endpoint(client):
    r = client.get("/api/classify", params={"lambda_re": 0, "b_re": 0})
    assert r.status_code == 200
    assert r.json()["tag"] == "InPHD"
    r = client.get("/api/classify", params={"lambda_re": 1.2})
    assert r.status_code == 400
    assert r.json()["detail"] == "multiplier outside closed unit disk"


def test_petal_endpoint(client):
    r = client.get("/api/petal", params={"lambda_re": 1})
    assert r.status_code == 200
    assert r.json()["spec"]["m"] == 2
    assert client.get("/api/petal",
                      params={"lambda_re": 0.5}).status_code == 400


def test_rays_endpoint(client):
    r = client.get("/api/rays", params={"lambda_re": 0.6, "b_re": 2,
                                        "b_im": 0.7, "max_period": 2})
    assert r.status_code == 200
    body = r.json()
    assert len(body["pairs"]) == 2
    assert all(isinstance(t["points"], list) and t["points"]
               for t in body["rays"])
    assert client.get("/api/rays", params={
        "lambda_re": 0, "max_period": 9}).status_code == 400
