"""Command-line entry point wiring scenes, integration, estimation, and
transforms, with JSON and SVG emission."""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .complexes import ConstructibleFunction, CubicalComplex, SimplicialComplex, read_pgm, write_pgm
from .integrate import integrate_by_excursions, integrate_by_level_sets, integrate_cf
from .network import (
    disc_hole,
    estimate_network_dual,
    estimate_triangulated,
    harmonic_fill,
    hole_bounds,
    smooth_and_integrate,
)
from .realval import (
    PLFunction,
    integrate_bracket,
    integrate_ceil,
    integrate_floor,
    rota_chen_integrate,
)
from .scene import (
    NetworkSample,
    Scene,
    Trajectory,
    add_noise,
    rasterize_counting_function,
    sample_network,
    simulate_vehicle_counts,
)
from .transforms import (
    beam_model_kernels,
    bessel_transform,
    convolve,
    fourier_field,
    fredholm_transform,
    halfline_model_kernels,
    radon_invert,
    wavelet_transform,
)


def load_cf(path) -> ConstructibleFunction:
    """Load a constructible function from a PGM raster or a JSON payload."""
    if str(path).endswith(".pgm"):
        pixels, origin, pitch = read_pgm(path, with_geometry=True)
        grid = CubicalComplex((pixels.shape[1], pixels.shape[0]), origin=origin, pitch=pitch)
        return ConstructibleFunction.from_pixels(grid, pixels)
    with open(path, "r", encoding="utf8") as fh:
        payload = json.load(fh)
    return cf_from_json(payload)


def cf_from_json(payload) -> ConstructibleFunction:
    kind = payload.get("kind", "cubical")
    if kind == "cubical":
        pixels = np.asarray(payload["pixels"], dtype=np.int64)
        grid = CubicalComplex(
            (pixels.shape[1], pixels.shape[0]),
            origin=tuple(payload.get("origin", (0.0, 0.0))),
            pitch=payload.get("pitch", 1.0),
        )
        return ConstructibleFunction.from_pixels(grid, pixels)
    if kind == "cubical-cells":
        values = np.asarray(payload["values"], dtype=np.int64)
        shape = ((values.shape[1] - 1) // 2, (values.shape[0] - 1) // 2)
        grid = CubicalComplex(
            shape,
            origin=tuple(payload.get("origin", (0.0, 0.0))),
            pitch=payload.get("pitch", 1.0),
        )
        return ConstructibleFunction(grid, values)
    raise ValueError(f"unknown constructible-function kind {kind!r}")


def cf_to_json(h: ConstructibleFunction):
    grid = h.complex
    return {
        "kind": "cubical-cells",
        "origin": list(grid.origin),
        "pitch": grid.pitch,
        "values": h.values.tolist(),
    }


def load_pl(path) -> PLFunction:
    with open(path, "r", encoding="utf8") as fh:
        payload = json.load(fh)
    complex = SimplicialComplex.from_json(payload["complex"])
    return PLFunction(complex, np.asarray(payload["vertex_values"], dtype=float))


def heatmap_svg(values, cell=6) -> str:
    """Self-contained SVG heatmap of a 2D value array."""
    values = np.asarray(values, dtype=float)
    lo, hi = float(values.min()), float(values.max())
    span = hi - lo if hi > lo else 1.0
    stops = [(0.267, 0.005, 0.329), (0.229, 0.322, 0.546), (0.128, 0.567, 0.551),
             (0.369, 0.789, 0.383), (0.993, 0.906, 0.144)]

    def color(v):
        t = (v - lo) / span * (len(stops) - 1)
        i = min(int(t), len(stops) - 2)
        f = t - i
        rgb = [stops[i][k] * (1 - f) + stops[i + 1][k] * f for k in range(3)]
        return "#" + "".join(f"{int(round(255 * c)):02x}" for c in rgb)

    ny, nx = values.shape
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{nx * cell}" height="{ny * cell}" '
        f'viewBox="0 0 {nx * cell} {ny * cell}">'
    ]
    for i in range(ny):
        for j in range(nx):
            parts.append(
                f'<rect x="{j * cell}" y="{(ny - 1 - i) * cell}" width="{cell}" height="{cell}" '
                f'fill="{color(values[i, j])}"/>'
            )
    parts.append("</svg>")
    return "\n".join(parts)


def _emit(args, payload, plain):
    if getattr(args, "json", False):
        print(json.dumps(payload))
    else:
        print(plain)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_integrate(args):
    h = load_cf(args.input)
    method = {
        "cells": integrate_cf,
        "levels": integrate_by_level_sets,
        "excursions": integrate_by_excursions,
    }[args.method]
    val = method(h)
    _emit(args, {"integral": val, "method": args.method}, str(val))
    return 0


def cmd_rint(args):
    if args.measure == "rota-chen":
        try:
            h = load_pl(args.input)
        except (KeyError, json.JSONDecodeError):
            h = load_cf(args.input)
        val = rota_chen_integrate(h)
    else:
        h = load_pl(args.input)
        val = {"floor": integrate_floor, "ceil": integrate_ceil, "bracket": integrate_bracket}[
            args.measure
        ](h)
    _emit(args, {"integral": val, "measure": args.measure}, str(val))
    return 0


def cmd_scene_rasterize(args):
    with open(args.scene, "r", encoding="utf8") as fh:
        scene = Scene.from_json(fh.read())
    h = rasterize_counting_function(scene, args.resolution)
    write_pgm(args.output, h.pixel_values(), origin=h.complex.origin, pitch=h.complex.pitch)
    _emit(args, {"output": args.output, "integral": integrate_cf(h)},
          f"wrote {args.output} (integral {integrate_cf(h)})")
    return 0


def cmd_scene_sample(args):
    with open(args.scene, "r", encoding="utf8") as fh:
        scene = Scene.from_json(fh.read())
    ns = sample_network(scene, args.nodes, args.radius, rng_seed=args.seed)
    if args.noise > 0:
        ns = add_noise(ns, args.noise, rng_seed=args.seed + 1)
    with open(args.output, "w", encoding="utf8") as fh:
        json.dump(ns.to_json(), fh)
    _emit(args, {"output": args.output, "nodes": ns.n_nodes, "edges": int(len(ns.edges))},
          f"wrote {args.output} ({ns.n_nodes} nodes, {len(ns.edges)} edges)")
    return 0


def cmd_scene_vehicles(args):
    with open(args.input, "r", encoding="utf8") as fh:
        payload = json.load(fh)
    domain = tuple(payload.get("domain", (0, 0, 1, 1)))
    trajectories = [
        Trajectory(
            waypoints=tuple(tuple(p) for p in t["waypoints"]),
            times=tuple(t["times"]),
            footprint_radius=t["radius"],
        )
        for t in payload["vehicles"]
    ]
    pitch = (domain[2] - domain[0]) / args.resolution
    ny = max(1, round((domain[3] - domain[1]) / pitch))
    grid = CubicalComplex((args.resolution, ny), origin=(domain[0], domain[1]), pitch=pitch)
    h = simulate_vehicle_counts(trajectories, grid, args.dt)
    write_pgm(args.output, h.pixel_values(), origin=grid.origin, pitch=grid.pitch)
    _emit(args, {"output": args.output, "integral": integrate_cf(h)},
          f"wrote {args.output} (integral {integrate_cf(h)})")
    return 0


def cmd_estimate_dual(args):
    with open(args.network, "r", encoding="utf8") as fh:
        ns = NetworkSample.from_json(fh.read())
    est = estimate_network_dual(ns)
    payload = {"estimate": est}
    plain = str(est)
    if args.truth:
        truth = integrate_cf(load_cf(args.truth))
        payload.update({"truth": truth, "match": est == truth})
        plain = f"estimate {est} truth {truth} match {est == truth}"
    _emit(args, payload, plain)
    return 0


def cmd_estimate_triangulated(args):
    with open(args.mesh, "r", encoding="utf8") as fh:
        payload = json.load(fh)
    complex = SimplicialComplex.from_json(payload["complex"])
    est = estimate_triangulated(np.asarray(payload["vertex_values"], dtype=np.int64), complex)
    _emit(args, {"estimate": est}, str(est))
    return 0


def _load_hole(args, grid):
    with open(args.hole, "r", encoding="utf8") as fh:
        spec = json.load(fh)
    return disc_hole(grid, tuple(spec["center"]), spec["radius"])


def cmd_hole_bounds(args):
    h = load_cf(args.raster)
    hole = _load_hole(args, h.complex)
    lower, upper = hole_bounds(h, hole)
    _emit(args, {"lower": lower, "upper": upper}, f"{lower} {upper}")
    return 0


def cmd_hole_harmonic(args):
    h = load_cf(args.raster)
    hole = _load_hole(args, h.complex)
    pl = harmonic_fill(h, hole, tol=args.tol, max_iters=args.max_iters)
    val = integrate_floor(pl)
    _emit(args, {"integral": val}, str(val))
    return 0


def cmd_smooth(args):
    if args.input.endswith(".pgm"):
        data = load_cf(args.input)
    else:
        with open(args.input, "r", encoding="utf8") as fh:
            data = NetworkSample.from_json(fh.read())
    val = smooth_and_integrate(data, args.radius)
    _emit(args, {"integral": val}, str(val))
    return 0


def cmd_transform_bessel(args):
    with open(args.scene, "r", encoding="utf8") as fh:
        scene = Scene.from_json(fh.read())
    field = bessel_transform(scene, args.nx, args.ny, r_step=args.r_step)
    if args.output:
        with open(args.output, "w", encoding="utf8") as fh:
            fh.write("x,y,value\n")
            for i, y in enumerate(field.ys):
                for j, x in enumerate(field.xs):
                    fh.write(f"{x},{y},{field.values[i, j]}\n")
    if args.svg:
        with open(args.svg, "w", encoding="utf8") as fh:
            fh.write(heatmap_svg(field.values))
    _emit(args, {"min": float(field.values.min()), "max": float(field.values.max())},
          f"bessel field {field.values.shape}, min {field.values.min():.6g} max {field.values.max():.6g}")
    return 0


def cmd_transform_fourier(args):
    with open(args.scene, "r", encoding="utf8") as fh:
        scene = Scene.from_json(fh.read())
    vals = fourier_field(scene, args.directions, r_step=args.r_step)
    payload = {"directions": args.directions, "values": vals.tolist()}
    _emit(args, payload, " ".join(f"{v:.6g}" for v in vals))
    return 0


def cmd_transform_convolve(args):
    f = load_cf(args.f)
    g = load_cf(args.g)
    out = convolve(f, g)
    with open(args.output, "w", encoding="utf8") as fh:
        json.dump(cf_to_json(out), fh)
    _emit(args, {"output": args.output, "integral": integrate_cf(out)},
          f"wrote {args.output} (integral {integrate_cf(out)})")
    return 0


def cmd_transform_radon(args):
    targets = [int(t) for t in args.targets.split(",") if t != ""]
    if args.kernel and args.kernel_inv:
        from .transforms import FredholmKernel

        with open(args.kernel, "r", encoding="utf8") as fh:
            K = FredholmKernel.from_json(fh.read())
        with open(args.kernel_inv, "r", encoding="utf8") as fh:
            Kp = FredholmKernel.from_json(fh.read())
        mu, lam = args.mu, args.lam
        size = K.n_points
    elif args.model == "halfline":
        K, Kp, mu, lam = halfline_model_kernels(args.size)
        size = args.size
    else:
        K, Kp, mu, lam = beam_model_kernels(args.size)
        size = args.size
    h = np.zeros(size, dtype=np.int64)
    h[targets] = 1
    rh = fredholm_transform(h, K)
    rec = radon_invert(rh, K, Kp, mu, lam)
    ok = bool(np.array_equal(rec, h))
    _emit(args, {"model": args.model, "recovered": rec.tolist(), "exact": ok},
          f"recovered {rec.tolist()} exact {ok}")
    return 0


def cmd_transform_wavelet(args):
    h = load_cf(args.input)
    smin, smax = (int(p) for p in args.scales.split(":"))
    co = wavelet_transform(h, range(smin, smax + 1))
    entries = {f"{p}|{s}|{t}": v for (p, s, t), v in sorted(co.entries.items()) if v != 0}
    _emit(args, {"coefficients": entries}, json.dumps(entries, indent=1))
    return 0


def cmd_serve(args):
    import uvicorn

    from .service import create_app

    app = create_app(static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand's unset flag from clobbering the top-level one
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output")
    p = argparse.ArgumentParser(prog="euler-calc", description=__doc__, parents=[common])
    sub = p.add_subparsers(dest="command", required=True)

    def add_parser(where, name, **kw):
        return where.add_parser(name, parents=[common], **kw)

    s = add_parser(sub, "integrate", help="Euler integral of a raster or CF JSON")
    s.add_argument("input")
    s.add_argument("--method", choices=["cells", "levels", "excursions"], default="cells")
    s.set_defaults(fn=cmd_integrate)

    s = add_parser(sub, "rint", help="real-valued integrals of a PL function")
    s.add_argument("input")
    s.add_argument("--measure", choices=["floor", "ceil", "bracket", "rota-chen"], default="floor")
    s.set_defaults(fn=cmd_rint)

    sc = sub.add_parser("scene", help="scene synthesis").add_subparsers(dest="scene_cmd", required=True)
    s = add_parser(sc, "rasterize")
    s.add_argument("scene")
    s.add_argument("--resolution", type=int, default=256)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(fn=cmd_scene_rasterize)
    s = add_parser(sc, "sample")
    s.add_argument("scene")
    s.add_argument("--nodes", type=int, required=True)
    s.add_argument("--radius", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--noise", type=float, default=0.0)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(fn=cmd_scene_sample)
    s = add_parser(sc, "vehicles")
    s.add_argument("input")
    s.add_argument("--resolution", type=int, default=128)
    s.add_argument("--dt", type=float, default=0.01)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(fn=cmd_scene_vehicles)

    es = sub.add_parser("estimate", help="numerical estimators").add_subparsers(dest="est_cmd", required=True)
    s = add_parser(es, "dual")
    s.add_argument("network")
    s.add_argument("--truth")
    s.set_defaults(fn=cmd_estimate_dual)
    s = add_parser(es, "triangulated")
    s.add_argument("mesh")
    s.set_defaults(fn=cmd_estimate_triangulated)

    ho = sub.add_parser("hole", help="bounds and harmonic fill over holes").add_subparsers(dest="hole_cmd", required=True)
    s = add_parser(ho, "bounds")
    s.add_argument("raster")
    s.add_argument("hole")
    s.set_defaults(fn=cmd_hole_bounds)
    s = add_parser(ho, "harmonic")
    s.add_argument("raster")
    s.add_argument("hole")
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--max-iters", type=int, default=10**6)
    s.set_defaults(fn=cmd_hole_harmonic)

    s = add_parser(sub, "smooth", help="kernel smoothing + floor integral")
    s.add_argument("input")
    s.add_argument("--radius", type=float, required=True)
    s.set_defaults(fn=cmd_smooth)

    tr = sub.add_parser("transform", help="integral transforms").add_subparsers(dest="tr_cmd", required=True)
    s = add_parser(tr, "bessel")
    s.add_argument("scene")
    s.add_argument("--nx", type=int, default=64)
    s.add_argument("--ny", type=int, default=64)
    s.add_argument("--r-step", type=float, default=None)
    s.add_argument("-o", "--output")
    s.add_argument("--svg")
    s.set_defaults(fn=cmd_transform_bessel)
    s = add_parser(tr, "fourier")
    s.add_argument("scene")
    s.add_argument("--directions", type=int, default=64)
    s.add_argument("--r-step", type=float, default=None)
    s.set_defaults(fn=cmd_transform_fourier)
    s = add_parser(tr, "convolve")
    s.add_argument("f")
    s.add_argument("g")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(fn=cmd_transform_convolve)
    s = add_parser(tr, "radon")
    s.add_argument("--model", choices=["halfline", "beam"], default="halfline")
    s.add_argument("--size", type=int, default=10)
    s.add_argument("--targets", default="0")
    s.add_argument("--kernel", help="kernel JSON file (overrides --model)")
    s.add_argument("--kernel-inv", help="inverse kernel JSON file")
    s.add_argument("--mu", type=int, default=1)
    s.add_argument("--lam", type=int, default=0)
    s.set_defaults(fn=cmd_transform_radon)
    s = add_parser(tr, "wavelet")
    s.add_argument("input")
    s.add_argument("--scales", default="0:3")
    s.set_defaults(fn=cmd_transform_wavelet)

    s = add_parser(sub, "serve", help="run the explorer HTTP service")
    s.add_argument("--port", type=int, default=8765)
    s.add_argument("--host", default="127.0.0.1")
    s.add_argument("--static", default=None, help="directory of explorer assets to mount at /")
    s.set_defaults(fn=cmd_serve)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ValueError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - runtime failure channel
        print(f"runtime error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
