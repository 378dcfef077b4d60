"""Binary tile files for slice rasters.

Layout, little-endian throughout:

    magic    4 bytes   "CUBQ"
    version  u16
    lam      2 x f64   re, im
    window   4 x f64   x0, y0, x1, y1
    res      2 x u32   nx, ny
    flags    ny*nx u8, row-major: bit0 escape1, bit1 escape2, bit2 in_M3,
             bit3 in_PHD, bit4 in_P_closure, bit5 in_hull
    ids      ny*nx u16, row-major component ids

A JSON sidecar next to the tile records the budgets and code version that
produced it, so a tile can be re-derived bit for bit.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .fates import Budgets
from .slices import SliceRaster

MAGIC = b"CUBQ"
TILE_VERSION = 1
FLAG_BITS = ("escape1", "escape2", "in_M3", "in_PHD", "in_P_closure",
             "in_hull")

_HEADER = struct.Struct("<4sH6d2I")


def pack_planes(pair: complex, window, resolution, u8_plane,
                u16_plane) -> bytes:
    """Pack the generic container: header, a u8 plane, a u16 plane.

    Slice tiles store lam and the flag bitfield here; dynamical-plane tiles
    reuse the container with b in the pair slot and fate codes in the u8
    plane.
    """
    nx, ny = resolution
    head = _HEADER.pack(MAGIC, TILE_VERSION, pair.real, pair.imag,
                        *(float(v) for v in window), nx, ny)
    u8 = np.ascontiguousarray(u8_plane, dtype=np.uint8)
    u16 = np.ascontiguousarray(u16_plane).astype("<u2")
    return head + u8.tobytes() + u16.tobytes()


def unpack_planes(buf: bytes):
    if buf[:4] != MAGIC:
        raise ValueError("not a tile: bad magic")
    _, version, pre, pim, x0, y0, x1, y1, nx, ny = _HEADER.unpack_from(buf)
    if version != TILE_VERSION:
        raise ValueError("unsupported tile version %d" % version)
    n = nx * ny
    expected = _HEADER.size + n + 2 * n
    if len(buf) != expected:
        raise ValueError("tile is %d bytes, expected %d" % (len(buf),
                                                            expected))
    u8 = np.frombuffer(buf, dtype=np.uint8, count=n,
                       offset=_HEADER.size).reshape(ny, nx)
    u16 = np.frombuffer(buf, dtype="<u2", count=n,
                        offset=_HEADER.size + n).reshape(ny, nx)
    return (complex(pre, pim), (x0, y0, x1, y1), (int(nx), int(ny)),
            u8, u16.astype(np.uint16))


def encode_tile(raster: SliceRaster) -> bytes:
    nx, ny = raster.resolution
    flags = np.zeros((ny, nx), dtype=np.uint8)
    for bit, name in enumerate(FLAG_BITS):
        flags |= getattr(raster, name).astype(np.uint8) << np.uint8(bit)
    return pack_planes(raster.lam, raster.window, raster.resolution, flags,
                       raster.component_id)


def decode_tile(buf: bytes) -> SliceRaster:
    lam, window, resolution, flags, ids = unpack_planes(buf)
    layers = {name: ((flags >> bit) & 1).astype(bool)
              for bit, name in enumerate(FLAG_BITS)}
    return SliceRaster(lam=lam, window=window, resolution=resolution,
                       component_id=ids, **layers)


def sidecar_path(path) -> Path:
    return Path(str(path) + ".json")


def write_tile(raster: SliceRaster, path, budgets: Budgets | None = None):
    """Write the tile plus its JSON sidecar; returns the tile path."""
    path = Path(path)
    path.write_bytes(encode_tile(raster))
    meta = {"budgets": asdict(budgets or Budgets()), "version": __version__}
    sidecar_path(path).write_text(json.dumps(meta, sort_keys=True))
    return path


def read_tile(path) -> SliceRaster:
    return decode_tile(Path(path).read_bytes())


def read_sidecar(path) -> dict:
    return json.loads(sidecar_path(path).read_text())


def content_key(lam, window, resolution, budgets: Budgets | None = None):
    """Cache key for a tile: hash of every input that shapes its bytes,
    including the code version."""
    spec = json.dumps({"lam": [complex(lam).real, complex(lam).imag],
                       "window": [float(v) for v in window],
                       "resolution": [int(v) for v in resolution],
                       "budgets": asdict(budgets or Budgets()),
                       "version": __version__}, sort_keys=True)
    return hashlib.sha256(spec.encode()).hexdigest()
