"""Command-line front end.

Exit codes: 0 on success, 2 on validation errors (bad flags or parameters
outside the supported domain), 1 on runtime failures.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from fractions import Fraction

import numpy as np

from . import __version__, config, fates, petals, rays, slices, tileio
from .core import CubicMap
from .fates import Budgets


def _jsonable(x):
    """Recursively convert report objects into JSON-serializable values."""
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (complex, np.complexfloating)):
        x = complex(x)
        return [x.real, x.imag]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def _emit(payload, out):
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _map_args(p, with_b=False):
    p.add_argument("--lambda-re", type=float, required=True)
    p.add_argument("--lambda-im", type=float, default=0.0)
    if with_b:
        p.add_argument("--b-re", type=float, default=0.0)
        p.add_argument("--b-im", type=float, default=0.0)


def _the_map(args) -> CubicMap:
    return CubicMap(complex(args.lambda_re, args.lambda_im),
                    complex(args.b_re, args.b_im))


def _cmd_slice(args):
    lam = complex(args.lambda_re, args.lambda_im)
    window = tuple(args.window)
    resolution = (args.res, args.res)
    budgets = Budgets(iterations=args.budget)
    raster = slices.compute_slice(lam, window, resolution, budgets)
    out = args.out or "slice-%s.cubq" % tileio.content_key(
        lam, window, resolution, budgets)[:12]
    tileio.write_tile(raster, out, budgets)
    print(out)
    return 0


def _cmd_classify(args):
    f = _the_map(args)
    if abs(f.lam) > 1.0 + 1e-12:
        raise ValueError("multiplier outside closed unit disk")
    report = fates.classify(f)
    _emit({"tag": report.tag, "evidence": report.evidence}, args.out)
    return 0


def _cmd_petal(args):
    f = _the_map(args)
    spec = petals.parabolic_germ(f)
    payload = {"spec": asdict(spec),
               "repelling_vectors": petals.repelling_vectors(spec)}
    if args.check:
        payload["violations"] = petals.check_petal_properties(
            f, spec, n_samples=args.check)
    _emit(payload, args.out)
    return 0


def _cmd_rays(args):
    f = _the_map(args)
    traces = rays.trace_periodic_rays(f, args.max_period)
    pairs = rays.colanding_census(f, args.max_period, traces)
    payload = {
        "pairs": [asdict(p) for p in pairs],
        "rays": [{"angle": angle, "status": t.status, "landing": t.landing,
                  "points": t.points if args.polylines else len(t.points)}
                 for angle, t in sorted(traces.items())],
    }
    _emit(payload, args.out)
    return 0


def _cmd_hull(args):
    raster = tileio.read_tile(args.tile)
    redone = slices.topological_hull(raster, flag=args.flag)
    tileio.write_tile(redone, args.out or args.tile)
    return 0


def _cmd_serve(args):
    settings = config.load_settings(args.config, port=args.port,
                                    workers=args.workers,
                                    cache_dir=args.cache_dir)
    from . import service
    service.serve(settings)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubq",
        description="Parameter-plane laboratory for the cubic family "
                    "lam*z + b*z^2 + z^3.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("slice", help="rasterize one multiplier slice")
    _map_args(p)
    p.add_argument("--window", type=float, nargs=4,
                   default=list(slices.DEFAULT_WINDOW),
                   metavar=("X0", "Y0", "X1", "Y1"))
    p.add_argument("--res", type=int, default=1024)
    p.add_argument("--budget", type=int, default=4096)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_slice)

    p = sub.add_parser("classify", help="verdict for one parameter")
    _map_args(p, with_b=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("petal", help="parabolic germ and petal report")
    _map_args(p, with_b=True)
    p.add_argument("--check", type=int, default=0, metavar="N",
                   help="also sample N petal points per property")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_petal)

    p = sub.add_parser("rays", help="trace periodic rays, co-landing census")
    _map_args(p, with_b=True)
    p.add_argument("--max-period", type=int, default=3)
    p.add_argument("--polylines", action="store_true",
                   help="include full ray polylines in the output")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_rays)

    p = sub.add_parser("hull", help="recompute the hull of a tile file")
    p.add_argument("tile")
    p.add_argument("--flag", default="in_P_closure",
                   choices=list(tileio.FLAG_BITS))
    p.add_argument("--out")
    p.set_defaults(func=_cmd_hull)

    p = sub.add_parser("serve", help="run the tile service")
    p.add_argument("--config")
    p.add_argument("--port", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--cache-dir")
    p.set_defaults(func=_cmd_serve)
    return parser


def cli_dispatch(argv) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, FileNotFoundError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except Exception as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1


def main():
    sys.exit(cli_dispatch(sys.argv[1:]))
