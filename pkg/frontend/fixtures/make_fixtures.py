"""Regenerate the committed UI fixtures from the tile service.

Run from the repository root after any change to the tile container or the
classifier's JSON shape:

    python3 frontend/fixtures/make_fixtures.py

The service is exercised in-process through its HTTP interface, so the
fixtures record exactly the bytes and JSON a browser would receive.
"""

import hashlib
import json
import struct
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

from cubq.config import Settings
from cubq.service import build_app

HERE = Path(__file__).resolve().parent
GOLDEN = HERE.parent.parent / "tests" / "golden"

SLICE_QUERY = {
    "lambda_re": "0",
    "lambda_im": "0",
    "x0": "-2.5",
    "y0": "-2.5",
    "x1": "2.5",
    "y1": "2.5",
    "res": "64",
    "budget": "1024",
}

DYNAMICS_QUERY = {
    "lambda_re": "0",
    "lambda_im": "0",
    "b_re": "0",
    "b_im": "0",
    "res": "32",
    "budget": "256",
}

HEADER = struct.Struct("<4sH6d2I")


def probe_pixels(body: bytes) -> list[dict]:
    """Record a few pixels straight from the wire bytes so the TS decoder
    test can check values, not just the container roundtrip."""
    magic, version, pre, pim, x0, y0, x1, y1, nx, ny = HEADER.unpack_from(body)
    assert magic == b"CUBQ" and version == 1
    n = nx * ny
    u8 = body[HEADER.size:HEADER.size + n]
    u16 = body[HEADER.size + n:]
    points = [(0.0, 0.0), (2.3, 0.0), (-2.3, 0.0), (0.0, 2.3), (0.0, 1.5),
              (1.2, -0.8)]
    out = []
    for re, im in points:
        x = int((re - x0) / (x1 - x0) * nx)
        y = int((im - y0) / (y1 - y0) * ny)
        if not (0 <= x < nx and 0 <= y < ny):
            continue
        i = y * nx + x
        out.append({
            "b": [re, im],
            "y": y,
            "x": x,
            "u8": u8[i],
            "u16": struct.unpack_from("<H", u16, 2 * i)[0],
        })
    return out


def component_probe(client: TestClient) -> None:
    """Classify the deepest pixel of the largest recorded hull component and
    store it next to the component's own verdict, so the UI test can check
    that a click inside a component reproduces the component report."""
    tile_path = GOLDEN / "main_theorem_slice.cubq"
    comp_path = GOLDEN / "main_theorem_components.json"
    if not tile_path.exists() or not comp_path.exists():
        print("golden slice not recorded yet; skipping classify_component.json")
        return
    import numpy as np
    from scipy import ndimage

    from cubq import tileio

    raster = tileio.read_tile(tile_path)
    report = json.loads(comp_path.read_text())[0]
    cid = report["component_id"]
    mask = raster.component_id == cid
    depth = ndimage.distance_transform_edt(mask)
    iy, ix = np.unravel_index(int(depth.argmax()), depth.shape)
    x0, y0, x1, y1 = raster.window
    ny, nx = mask.shape
    b = complex(x0 + (ix + 0.5) / nx * (x1 - x0),
                y0 + (iy + 0.5) / ny * (y1 - y0))
    lam = raster.lam
    r = client.get("/api/classify", params={
        "lambda_re": repr(lam.real), "lambda_im": repr(lam.imag),
        "b_re": repr(b.real), "b_im": repr(b.imag),
    })
    r.raise_for_status()
    out = {
        "lambda": [lam.real, lam.imag],
        "b": [b.real, b.imag],
        "component_id": cid,
        "component_verdict": report["verdict"],
        "response": r.json(),
    }
    assert out["response"]["tag"] == report["verdict"], out
    (HERE / "classify_component.json").write_text(
        json.dumps(out, indent=2, sort_keys=True) + "\n")


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        app = build_app(Settings(cache_dir=tmp, workers=1), sync_wait=600.0)
        with TestClient(app) as client:
            r = client.get("/api/slice", params=SLICE_QUERY)
            r.raise_for_status()
            body = r.content
            (HERE / "slice_lam0_64.cubq").write_bytes(body)
            meta = {
                "query": SLICE_QUERY,
                "bytes": len(body),
                "sha256": hashlib.sha256(body).hexdigest(),
                "pixels": probe_pixels(body),
            }
            (HERE / "slice_lam0_64.json").write_text(
                json.dumps(meta, indent=2) + "\n")

            for name, b in [("origin", (0.0, 0.0)), ("escape", (3.0, 0.0))]:
                r = client.get("/api/classify", params={
                    "lambda_re": "0", "lambda_im": "0",
                    "b_re": str(b[0]), "b_im": str(b[1]),
                })
                r.raise_for_status()
                (HERE / f"classify_{name}.json").write_text(
                    json.dumps(r.json(), indent=2, sort_keys=True) + "\n")

            r = client.get("/api/dynamics", params=DYNAMICS_QUERY)
            r.raise_for_status()
            (HERE / "dynamics_origin.cubq").write_bytes(r.content)

            # both critical orbits escape here, so external rays are traceable
            r = client.get("/api/rays", params={
                "lambda_re": "0.6", "lambda_im": "0",
                "b_re": "2", "b_im": "0.7", "max_period": "2",
            })
            r.raise_for_status()
            (HERE / "rays_escaping.json").write_text(
                json.dumps(r.json(), indent=2, sort_keys=True) + "\n")

            component_probe(client)

    for p in sorted(HERE.glob("*.cubq")) + sorted(HERE.glob("*.json")):
        print(f"{p.name}: {p.stat().st_size} bytes")


if __name__ == "__main__":
    main()
