"""HTTP API for the interactive explorer.

Sessions hold a scene and a sampled network; every numeric answer is a
direct module call on the session state, so the service adds no numerics
of its own.  Mutations invalidate the cached raster and estimates.
"""

from __future__ import annotations

import itertools
import threading

import numpy as np
from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .integrate import integrate_cf
from .network import estimate_network_dual, per_level_beta0, smooth_and_integrate
from .scene import NetworkSample, Scene, add_noise, rasterize_counting_function, sample_network, shape_from_json
from .transforms import bessel_transform, fourier_field


class SessionCreate(BaseModel):
    scene: dict
    nodes: int = Field(default=600, gt=0)
    comm_radius: float | None = None
    seed: int = 0
    resolution: int = Field(default=128, gt=0)


class ShapeOp(BaseModel):
    op: str
    shape: dict | None = None
    index: int | None = None


class NoiseSpec(BaseModel):
    fraction: float = Field(ge=0.0, le=1.0)
    seed: int = 0


class SmoothSpec(BaseModel):
    radius: float = Field(gt=0.0)


class Session:
    def __init__(self, sid, scene: Scene, nodes, comm_radius, seed, resolution):
        self.id = sid
        self.scene = scene
        self.nodes = nodes
        self.seed = seed
        self.resolution = resolution
        x0, y0, x1, y1 = scene.domain
        area = (x1 - x0) * (y1 - y0)
        self.comm_radius = comm_radius or 2.2 * (area / max(nodes, 1)) ** 0.5
        self.noise = None  # (fraction, seed)
        self.smooth_radius = None
        self.lock = threading.Lock()
        self._positions = None
        self._cache = {}

    def invalidate(self):
        self._cache = {}

    def base_network(self) -> NetworkSample:
        if self._positions is None:
            ns = sample_network(self.scene, self.nodes, self.comm_radius, rng_seed=self.seed)
            self._positions = (ns.nodes, ns.edges)
            return ns
        pos, edges = self._positions
        return NetworkSample(nodes=pos, edges=edges, readings=self.scene.counting_values(pos))

    def current_network(self) -> NetworkSample:
        if "network" not in self._cache:
            ns = self.base_network()
            if self.noise:
                ns = add_noise(ns, self.noise[0], rng_seed=self.noise[1])
            self._cache["network"] = ns
        return self._cache["network"]

    def raster(self):
        if "raster" not in self._cache:
            self._cache["raster"] = rasterize_counting_function(self.scene, self.resolution)
        return self._cache["raster"]


def create_app(static_dir=None) -> FastAPI:
    app = FastAPI(title="euler-calc explorer service")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sessions: dict[str, Session] = {}
    counter = itertools.count(1)
    store_lock = threading.Lock()

    def get_session(sid) -> Session:
        try:
            return sessions[sid]
        except KeyError:
            raise HTTPException(status_code=404, detail="unknown session") from None

    @app.post("/sessions")
    def create_session(body: SessionCreate):
        try:
            scene = Scene.from_json(body.scene)
        except (ValueError, KeyError) as exc:
            raise HTTPException(status_code=422, detail=f"invalid scene: {exc}") from None
        with store_lock:
            sid = f"s{next(counter)}"
            sessions[sid] = Session(
                sid, scene, body.nodes, body.comm_radius, body.seed, body.resolution
            )
        return {"id": sid, "comm_radius": sessions[sid].comm_radius}

    @app.post("/sessions/{sid}/shapes")
    def mutate_shapes(sid: str, body: ShapeOp):
        s = get_session(sid)
        with s.lock:
            if body.op == "add":
                if body.shape is None:
                    raise HTTPException(status_code=422, detail="missing shape")
                try:
                    shape = shape_from_json(body.shape)
                    x0, y0, x1, y1 = s.scene.domain
                    bx0, by0, bx1, by1 = shape.bbox()
                    if bx0 < x0 or by0 < y0 or bx1 > x1 or by1 > y1:
                        raise ValueError("shape support leaves the session domain")
                    s.scene.shapes.append(shape)
                except (ValueError, KeyError) as exc:
                    raise HTTPException(status_code=422, detail=f"invalid geometry: {exc}") from None
            elif body.op == "remove":
                if body.index is None or not 0 <= body.index < len(s.scene.shapes):
                    raise HTTPException(status_code=422, detail="bad shape index")
                s.scene.shapes.pop(body.index)
            else:
                raise HTTPException(status_code=422, detail="op must be add or remove")
            s.invalidate()
            return {"shapes": [sh.to_json() for sh in s.scene.shapes]}

    @app.post("/sessions/{sid}/noise")
    def set_noise(sid: str, body: NoiseSpec):
        s = get_session(sid)
        with s.lock:
            s.noise = (body.fraction, body.seed) if body.fraction > 0 else None
            s.invalidate()
            return {"noise": s.noise}

    @app.post("/sessions/{sid}/smooth")
    def set_smooth(sid: str, body: SmoothSpec):
        s = get_session(sid)
        with s.lock:
            s.smooth_radius = body.radius
            s.invalidate()
            return {"radius": s.smooth_radius}

    @app.get("/sessions/{sid}/estimate")
    def estimate(sid: str):
        s = get_session(sid)
        with s.lock:
            ns = s.current_network()
            clipped = NetworkSample(
                nodes=ns.nodes, edges=ns.edges, readings=np.maximum(ns.readings, 0)
            )
            out = {
                "dual_estimate": estimate_network_dual(clipped),
                "true_integral": integrate_cf(s.raster()),
                "per_level_beta0": [
                    {"s": lev, "upper": up, "lower": lo}
                    for lev, up, lo in per_level_beta0(clipped)
                ],
            }
            if s.smooth_radius:
                out["smoothed_estimate"] = smooth_and_integrate(ns, s.smooth_radius)
            return out

    @app.get("/sessions/{sid}/levelset")
    def levelset(sid: str, s: int = 0):
        sess = get_session(sid)
        with sess.lock:
            ns = sess.current_network()
            readings = np.maximum(ns.readings, 0)
            upper_mask = readings > s
            lower_mask = readings <= s
            upper = _component_labels(ns, upper_mask)
            lower = _component_labels(ns, lower_mask)
            feats = [
                {
                    "id": int(i),
                    "xy": [float(ns.nodes[i, 0]), float(ns.nodes[i, 1])],
                    "reading": int(ns.readings[i]),
                    "upper_comp": upper.get(int(i)),
                    "lower_comp": lower.get(int(i)),
                }
                for i in range(ns.n_nodes)
            ]
            return {
                "s": s,
                "upper_count": len(set(upper.values())),
                "lower_count": len(set(lower.values())),
                "nodes": feats,
                "edges": ns.edges.tolist(),
            }

    @app.get("/sessions/{sid}/transform")
    def transform(sid: str, kind: str = "bessel", nx: int = 40, ny: int = 40, directions: int = 64):
        s = get_session(sid)
        with s.lock:
            if kind == "bessel":
                field = bessel_transform(s.scene, nx, ny)
                return {"kind": kind, **field.to_json()}
            if kind == "fourier":
                vals = fourier_field(s.scene, directions)
                return {"kind": kind, "values": vals.tolist()}
            raise HTTPException(status_code=422, detail="kind must be bessel or fourier")

    @app.get("/sessions/{sid}/scene")
    def get_scene(sid: str):
        s = get_session(sid)
        with s.lock:
            return s.scene.to_json()

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="explorer")
    return app


def _component_labels(ns: NetworkSample, mask):
    """node id -> component label over the induced subgraph."""
    idx = np.flatnonzero(mask)
    parent = {int(i): int(i) for i in idx}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in ns.edges:
        a, b = int(a), int(b)
        if a in parent and b in parent:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra
    labels = {}
    roots = {}
    for i in idx:
        r = find(int(i))
        roots.setdefault(r, len(roots) + 1)
        labels[int(i)] = roots[r]
    return labels
