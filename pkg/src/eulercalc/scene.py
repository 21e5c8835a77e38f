"""Synthetic target fields with exact geometry.

Shapes know how to answer the slice questions the transforms need --
chi of their intersection with a circle or a line -- analytically, so
transform inner loops never touch a raster.  Scenes bundle shapes over a
rectangular domain and rasterize to counting functions; trajectories
model moving footprints; NetworkSample is the coordinate-free ad hoc
network with integer readings at the nodes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .complexes import ConstructibleFunction, CubicalComplex

_TANGENT_EPS = 1e-12


# ---------------------------------------------------------------------------
# shapes
# ---------------------------------------------------------------------------


class Shape:
    """Interface: contains, boundary_distance, circle/line slice chi."""

    def contains(self, p) -> bool:
        raise NotImplementedError

    def contains_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.array([self.contains(p) for p in pts.reshape(-1, 2)]).reshape(pts.shape[:-1])

    def boundary_distance(self, p) -> float:
        raise NotImplementedError

    def circle_intersection_chi(self, center, r) -> int:
        """chi of the intersection with the circle of radius r about center."""
        raise NotImplementedError

    def circle_chi_breakpoints(self, center):
        """Radii at which the circle-slice chi can change (superset is fine)."""
        raise NotImplementedError

    def line_slice_chi(self, xi, offset) -> int:
        """chi of the intersection with the line {y : xi . y = offset}, |xi| = 1."""
        raise NotImplementedError

    def xi_breakpoints(self, xi):
        """Offsets at which the line-slice chi can change (superset is fine)."""
        raise NotImplementedError

    def halfplane_slice_chi(self, xi, offset) -> int:
        """chi of the intersection with the closed halfplane {xi . y >= offset}.

        Computed from line slices by Euler-integrating the fiberwise chi of
        the projection onto the xi axis over [offset, max): points count +1,
        open gaps between breakpoints count -1.
        """
        xi = _unit(xi)
        bps = sorted(b for b in set(self.xi_breakpoints(xi)) if b > offset + _TANGENT_EPS)
        pts = [offset] + bps
        total = 0
        for k, b in enumerate(pts):
            total += self.line_slice_chi(xi, b)
            if k + 1 < len(pts):
                total -= self.line_slice_chi(xi, 0.5 * (b + pts[k + 1]))
        return total

    def bounding_radius(self, center) -> float:
        """An upper bound for the distance from center to the shape."""
        raise NotImplementedError

    def bbox(self):
        """Axis-aligned bounding box (x0, y0, x1, y1)."""
        raise NotImplementedError

    def to_json(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Disc(Shape):
    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("disc radius must be positive")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    def contains(self, p):
        return _dist(p, self.center) <= self.radius

    def contains_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        d2 = (pts[..., 0] - self.center[0]) ** 2 + (pts[..., 1] - self.center[1]) ** 2
        return d2 <= self.radius**2

    def boundary_distance(self, p):
        return abs(_dist(p, self.center) - self.radius)

    def circle_intersection_chi(self, center, r):
        if r <= 0:
            return 1 if self.contains(center) else 0
        d = _dist(center, self.center)
        if abs(d - r) > self.radius:
            return 0
        if d + r <= self.radius:
            return 0  # whole circle inside: chi(S^1)
        return 1  # one closed arc

    def circle_chi_breakpoints(self, center):
        d = _dist(center, self.center)
        return [abs(d - self.radius), d + self.radius]

    def line_slice_chi(self, xi, offset):
        xi = _unit(xi)
        t = abs(_dot(xi, self.center) - offset)
        return 1 if t <= self.radius else 0

    def xi_breakpoints(self, xi):
        c = _dot(_unit(xi), self.center)
        return [c - self.radius, c, c + self.radius]

    def bounding_radius(self, center):
        return _dist(center, self.center) + self.radius

    def bbox(self):
        cx, cy = self.center
        return (cx - self.radius, cy - self.radius, cx + self.radius, cy + self.radius)

    def to_json(self):
        return {"type": "disc", "c": list(self.center), "r": self.radius}


@dataclass(frozen=True)
class ConvexPolygon(Shape):
    vertices: tuple  # CCW, strictly convex

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(pts) < 3:
            raise ValueError("polygon needs at least three vertices")
        n = len(pts)
        for i in range(n):
            a, b, c = pts[i], pts[(i + 1) % n], pts[(i + 2) % n]
            cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
            if cross <= 0:
                raise ValueError("vertices must be strictly convex in CCW order")
        object.__setattr__(self, "vertices", pts)

    def _edges(self):
        n = len(self.vertices)
        return [(self.vertices[i], self.vertices[(i + 1) % n]) for i in range(n)]

    def contains(self, p):
        for a, b in self._edges():
            if (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) < 0:
                return False
        return True

    def contains_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        ok = np.ones(pts.shape[:-1], dtype=bool)
        for a, b in self._edges():
            ok &= (b[0] - a[0]) * (pts[..., 1] - a[1]) - (b[1] - a[1]) * (pts[..., 0] - a[0]) >= 0
        return ok

    def boundary_distance(self, p):
        return min(_segment_distance(p, a, b) for a, b in self._edges())

    def circle_intersection_chi(self, center, r):
        """Number of boundary-free arcs of the circle inside the polygon.

        The circle minus the (merged) excluded arcs beyond each edge line;
        0 when the circle misses the polygon or lies entirely inside it.
        """
        if r <= 0:
            return 1 if self.contains(center) else 0
        dmin = 0.0 if self.contains(center) else min(
            _segment_distance(center, a, b) for a, b in self._edges()
        )
        dmax = max(_dist(center, v) for v in self.vertices)
        if r < dmin - _TANGENT_EPS or r > dmax + _TANGENT_EPS:
            return 0
        excluded = []
        for a, b in self._edges():
            # outward side of edge (a, b): right of the CCW direction
            ex, ey = b[0] - a[0], b[1] - a[1]
            norm = math.hypot(ex, ey)
            nx, ny = ey / norm, -ex / norm  # outward unit normal
            t = (center[0] - a[0]) * nx + (center[1] - a[1]) * ny  # signed, <0 inside
            if t > r:
                return 0  # circle entirely beyond this edge: misses the polygon
            if -t < r:
                # arc beyond the edge line, centered on the outward normal
                half = math.acos(max(-1.0, min(1.0, -t / r)))
                phi = math.atan2(ny, nx)
                excluded.append((phi - half, phi + half))
        if not excluded:
            return 0  # circle inside the polygon interior
        clusters = _circular_arc_clusters(excluded)
        if clusters is None:
            return 0  # excluded arcs cover the whole circle
        return clusters

    def circle_chi_breakpoints(self, center):
        bps = [0.0]
        for v in self.vertices:
            bps.append(_dist(center, v))
        for a, b in self._edges():
            bps.append(_segment_distance(center, a, b))
            # distance to the full edge line also marks tangency when the
            # perpendicular foot falls outside the segment
            bps.append(_line_distance(center, a, b))
        return bps

    def line_slice_chi(self, xi, offset):
        xi = _unit(xi)
        vals = [_dot(xi, v) for v in self.vertices]
        return 1 if min(vals) <= offset <= max(vals) else 0

    def xi_breakpoints(self, xi):
        xi = _unit(xi)
        return [_dot(xi, v) for v in self.vertices]

    def bounding_radius(self, center):
        return max(_dist(center, v) for v in self.vertices)

    def bbox(self):
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        return (min(xs), min(ys), max(xs), max(ys))

    def to_json(self):
        return {"type": "polygon", "pts": [list(v) for v in self.vertices]}


@dataclass(frozen=True)
class Annulus(Shape):
    center: tuple
    r_in: float
    r_out: float

    def __post_init__(self):
        if not 0 < self.r_in < self.r_out:
            raise ValueError("annulus requires 0 < r_in < r_out")
        object.__setattr__(self, "center", (float(self.center[0]), float(self.center[1])))

    def contains(self, p):
        d = _dist(p, self.center)
        return self.r_in <= d <= self.r_out

    def contains_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        d2 = (pts[..., 0] - self.center[0]) ** 2 + (pts[..., 1] - self.center[1]) ** 2
        return (d2 >= self.r_in**2) & (d2 <= self.r_out**2)

    def boundary_distance(self, p):
        d = _dist(p, self.center)
        return min(abs(d - self.r_in), abs(d - self.r_out))

    def circle_intersection_chi(self, center, r):
        """0, 1 or 2 arcs: distance to the annulus center is monotone on each
        half of the probing circle, so the slice has at most two components."""
        if r <= 0:
            return 1 if self.contains(center) else 0
        d = _dist(center, self.center)
        fmax, fmin = d + r, abs(d - r)
        if fmin > self.r_out or fmax < self.r_in:
            return 0
        if d < _TANGENT_EPS:
            return 0  # concentric circle: empty or a full circle either way
        merged_outer = fmax <= self.r_out  # arc closes up at phi = 0
        merged_inner = fmin >= self.r_in  # arc closes up at phi = pi
        if merged_outer and merged_inner:
            return 0  # whole circle inside the annulus
        if merged_outer or merged_inner:
            return 1
        return 2

    def circle_chi_breakpoints(self, center):
        d = _dist(center, self.center)
        bps = []
        for rr in (self.r_in, self.r_out):
            bps.extend([abs(d - rr), d + rr])
            if rr - d > 0:
                bps.append(rr - d)
        return bps

    def line_slice_chi(self, xi, offset):
        xi = _unit(xi)
        t = abs(_dot(xi, self.center) - offset)
        if t > self.r_out:
            return 0
        if t < self.r_in:
            return 2  # chord minus the open hole: two segments
        return 1

    def xi_breakpoints(self, xi):
        c = _dot(_unit(xi), self.center)
        return [c - self.r_out, c - self.r_in, c, c + self.r_in, c + self.r_out]

    def bounding_radius(self, center):
        return _dist(center, self.center) + self.r_out

    def bbox(self):
        cx, cy = self.center
        return (cx - self.r_out, cy - self.r_out, cx + self.r_out, cy + self.r_out)

    def to_json(self):
        return {
            "type": "annulus",
            "c": list(self.center),
            "r_in": self.r_in,
            "r_out": self.r_out,
        }


@dataclass(frozen=True)
class PathTube(Shape):
    """Closed radius-neighborhood of a polyline; radius 0 is the bare polyline."""

    path: tuple
    radius: float

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.path)
        if len(pts) < 2:
            raise ValueError("path needs at least two points")
        if self.radius < 0:
            raise ValueError("tube radius cannot be negative")
        object.__setattr__(self, "path", pts)

    def _segments(self):
        return list(zip(self.path[:-1], self.path[1:]))

    def path_distance(self, p):
        return min(_segment_distance(p, a, b) for a, b in self._segments())

    def contains(self, p):
        return self.path_distance(p) <= self.radius

    def contains_many(self, pts):
        pts = np.asarray(pts, dtype=float)
        d = np.full(pts.shape[:-1], np.inf)
        for a, b in self._segments():
            d = np.minimum(d, _segment_distance_many(pts, a, b))
        return d <= self.radius

    def boundary_distance(self, p):
        return abs(self.path_distance(p) - self.radius)

    def circle_intersection_chi(self, center, r, samples=720):
        """Arc count of {angle : dist(circle point, path) <= radius}.

        Sampled with bisection refinement; exact for the generic
        configurations the demos use.
        """
        if r <= 0:
            return 1 if self.contains(center) else 0
        if self.radius == 0.0:
            return self._circle_polyline_points(center, r)
        phis = np.linspace(0.0, 2 * math.pi, samples, endpoint=False)
        pts = np.stack(
            [center[0] + r * np.cos(phis), center[1] + r * np.sin(phis)], axis=-1
        )
        d = np.full(samples, np.inf)
        for a, b in self._segments():
            d = np.minimum(d, _segment_distance_many(pts, a, b))
        inside = d <= self.radius
        if inside.all():
            return 0
        if not inside.any():
            return 0
        flips = np.count_nonzero(inside != np.roll(inside, 1))
        return flips // 2

    def _circle_polyline_points(self, center, r):
        """Exact count of circle/polyline intersection points (radius-0 tube)."""
        pts = set()
        for a, b in self._segments():
            vx, vy = b[0] - a[0], b[1] - a[1]
            cx, cy = a[0] - center[0], a[1] - center[1]
            qa = vx * vx + vy * vy
            qb = 2 * (cx * vx + cy * vy)
            qc = cx * cx + cy * cy - r * r
            disc = qb * qb - 4 * qa * qc
            if disc < 0:
                continue
            s = math.sqrt(disc)
            for t in ((-qb - s) / (2 * qa), (-qb + s) / (2 * qa)):
                if -_TANGENT_EPS <= t <= 1 + _TANGENT_EPS:
                    pts.add((round(a[0] + t * vx, 9), round(a[1] + t * vy, 9)))
        return len(pts)

    def circle_chi_breakpoints(self, center):
        bps = [0.0]
        cand = [_dist(center, v) for v in self.path]
        for a, b in self._segments():
            cand.append(_segment_distance(center, a, b))
        for c in cand:
            bps.append(abs(c - self.radius))
            bps.append(c + self.radius)
        return bps

    def line_slice_chi(self, xi, offset):
        """Component count of the line-slice, via exact quadratic intervals."""
        xi = _unit(xi)
        # param the line as q(t) = p0 + t * dir with dir = rot90(xi)
        dirv = (-xi[1], xi[0])
        p0 = (offset * xi[0], offset * xi[1])
        intervals = []
        for a, b in self._segments():
            intervals.extend(_segment_tube_line_intervals(p0, dirv, a, b, self.radius))
        if not intervals:
            return 0
        intervals.sort()
        merged = 1
        hi = intervals[0][1]
        for lo, h in intervals[1:]:
            if lo > hi + _TANGENT_EPS:
                merged += 1
            hi = max(hi, h)
        return merged

    def xi_breakpoints(self, xi):
        xi = _unit(xi)
        bps = []
        for v in self.path:
            c = _dot(xi, v)
            bps.extend([c - self.radius, c, c + self.radius])
        return bps

    def bounding_radius(self, center):
        return max(_dist(center, v) for v in self.path) + self.radius

    def bbox(self):
        xs = [v[0] for v in self.path]
        ys = [v[1] for v in self.path]
        r = self.radius
        return (min(xs) - r, min(ys) - r, max(xs) + r, max(ys) + r)

    def to_json(self):
        return {"type": "tube", "path": [list(v) for v in self.path], "r": self.radius}


# ---------------------------------------------------------------------------
# scenes
# ---------------------------------------------------------------------------


@dataclass
class Scene:
    shapes: list
    domain: tuple = (0.0, 0.0, 1.0, 1.0)  # x0, y0, x1, y1
    allow_clipped: bool = False

    def __post_init__(self):
        x0, y0, x1, y1 = self.domain
        if not (x1 > x0 and y1 > y0):
            raise ValueError("domain must be a nonempty rectangle")
        if not self.allow_clipped:
            for s in self.shapes:
                bx0, by0, bx1, by1 = s.bbox()
                if bx0 < x0 or by0 < y0 or bx1 > x1 or by1 > y1:
                    raise ValueError(
                        "shape support leaves the domain; pass allow_clipped=True to permit truncation"
                    )

    def counting_values(self, pts):
        """Number of shapes containing each point."""
        pts = np.asarray(pts, dtype=float)
        out = np.zeros(pts.shape[:-1], dtype=np.int64)
        for s in self.shapes:
            out += s.contains_many(pts)
        return out

    def diameter_bound(self, center):
        if not self.shapes:
            return 0.0
        return max(s.bounding_radius(center) for s in self.shapes)

    def to_json(self):
        return {"domain": list(self.domain), "shapes": [s.to_json() for s in self.shapes]}

    @classmethod
    def from_json(cls, payload):
        if isinstance(payload, (str, bytes)):
            payload = json.loads(payload)
        return cls(
            shapes=[shape_from_json(s) for s in payload.get("shapes", [])],
            domain=tuple(payload.get("domain", (0.0, 0.0, 1.0, 1.0))),
            allow_clipped=bool(payload.get("allow_clipped", False)),
        )


def shape_from_json(s):
    kind = s["type"]
    if kind == "disc":
        return Disc(tuple(s["c"]), s["r"])
    if kind == "polygon":
        return ConvexPolygon(tuple(tuple(p) for p in s["pts"]))
    if kind == "annulus":
        return Annulus(tuple(s["c"]), s["r_in"], s["r_out"])
    if kind == "tube":
        return PathTube(tuple(tuple(p) for p in s["path"]), s["r"])
    raise ValueError(f"unknown shape type {kind!r}")


def rasterize_counting_function(scene: Scene, resolution: int) -> ConstructibleFunction:
    """Counting function on a grid: pixel value = shapes containing the center.

    resolution is the pixel count along x; square pixels, so the y count
    follows from the domain aspect ratio.
    """
    if resolution <= 0:
        raise ValueError("resolution must be positive")
    x0, y0, x1, y1 = scene.domain
    pitch = (x1 - x0) / resolution
    ny = max(1, round((y1 - y0) / pitch))
    grid = CubicalComplex((resolution, ny), origin=(x0, y0), pitch=pitch)
    pixels = scene.counting_values(grid.pixel_centers())
    return ConstructibleFunction.from_pixels(grid, pixels)


# ---------------------------------------------------------------------------
# moving vehicles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Trajectory:
    """Waypoint path with strictly increasing timestamps and a disc footprint."""

    waypoints: tuple  # ((x, y), ...)
    times: tuple
    footprint_radius: float

    def __post_init__(self):
        w = tuple((float(x), float(y)) for x, y in self.waypoints)
        t = tuple(float(v) for v in self.times)
        if len(w) != len(t) or len(w) < 2:
            raise ValueError("need matching waypoints and times, at least two")
        if any(t2 <= t1 for t1, t2 in zip(t, t[1:])):
            raise ValueError("timestamps must be strictly increasing")
        if self.footprint_radius <= 0:
            raise ValueError("footprint radius must be positive")
        object.__setattr__(self, "waypoints", w)
        object.__setattr__(self, "times", t)

    def position(self, t):
        ts = self.times
        if t <= ts[0]:
            return self.waypoints[0]
        if t >= ts[-1]:
            return self.waypoints[-1]
        k = int(np.searchsorted(ts, t, side="right")) - 1
        t0, t1 = ts[k], ts[k + 1]
        a, b = self.waypoints[k], self.waypoints[k + 1]
        u = (t - t0) / (t1 - t0)
        return (a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1]))


def simulate_vehicle_counts(trajectories, grid: CubicalComplex, dt: float) -> ConstructibleFunction:
    """Per-pixel count of footprint-entry intervals, summed over vehicles.

    Precondition (documented, not checked): dt is small enough that
    distinct entry/exit events at any one node are separated by more than
    one time step; intervals merging within dt read as one interval.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    centers = grid.pixel_centers()
    readings = np.zeros(centers.shape[:-1], dtype=np.int64)
    for traj in trajectories:
        t0, t1 = traj.times[0], traj.times[-1]
        nsteps = max(2, int(math.ceil((t1 - t0) / dt)) + 1)
        prev_inside = np.zeros(centers.shape[:-1], dtype=bool)
        r2 = traj.footprint_radius**2
        for t in np.linspace(t0, t1, nsteps):
            px, py = traj.position(t)
            inside = (centers[..., 0] - px) ** 2 + (centers[..., 1] - py) ** 2 <= r2
            readings += inside & ~prev_inside
            prev_inside = inside
    return ConstructibleFunction.from_pixels(grid, readings)


# ---------------------------------------------------------------------------
# ad hoc networks
# ---------------------------------------------------------------------------


@dataclass
class NetworkSample:
    """Planar graph with integer readings at the nodes."""

    nodes: np.ndarray  # (n, 2) positions, or None for coordinate-free graphs
    edges: np.ndarray  # (m, 2) node-id pairs
    readings: np.ndarray  # (n,) ints

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        self.readings = np.asarray(self.readings, dtype=np.int64)
        if self.nodes is not None:
            self.nodes = np.asarray(self.nodes, dtype=float)
            if self.readings.shape != (self.nodes.shape[0],):
                raise ValueError("need one reading per node")

    @property
    def n_nodes(self):
        return self.readings.shape[0]

    def to_json(self):
        return {
            "nodes": self.nodes.tolist() if self.nodes is not None else None,
            "edges": self.edges.tolist(),
            "readings": self.readings.tolist(),
        }

    @classmethod
    def from_json(cls, payload):
        if isinstance(payload, (str, bytes)):
            payload = json.loads(payload)
        nodes = payload.get("nodes")
        return cls(
            nodes=np.asarray(nodes, dtype=float) if nodes is not None else None,
            edges=np.asarray(payload.get("edges", []), dtype=np.int64).reshape(-1, 2),
            readings=np.asarray(payload["readings"], dtype=np.int64),
        )


def sample_network(scene: Scene, nodes: int, comm_radius: float, rng_seed=0) -> NetworkSample:
    """Uniform random nodes over the domain, edges within comm_radius,
    readings equal to the exact shape count at each node."""
    if nodes <= 0:
        raise ValueError("need a positive number of nodes")
    rng = np.random.default_rng(rng_seed)
    x0, y0, x1, y1 = scene.domain
    pos = rng.uniform((x0, y0), (x1, y1), size=(nodes, 2))
    tree = cKDTree(pos)
    pairs = sorted(tree.query_pairs(comm_radius))
    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    readings = scene.counting_values(pos)
    return NetworkSample(nodes=pos, edges=edges, readings=readings)


def network_from_positions(scene: Scene, positions, comm_radius: float) -> NetworkSample:
    """Network over given node positions (for hand-built adversarial samples)."""
    pos = np.asarray(positions, dtype=float)
    tree = cKDTree(pos)
    pairs = sorted(tree.query_pairs(comm_radius))
    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    return NetworkSample(nodes=pos, edges=edges, readings=scene.counting_values(pos))


def add_noise(sample: NetworkSample, flip_fraction: float, rng_seed=0) -> NetworkSample:
    """Perturb a random subset of readings by +-1 (the sparse error model)."""
    if not 0.0 <= flip_fraction <= 1.0:
        raise ValueError("flip_fraction must be within [0, 1]")
    rng = np.random.default_rng(rng_seed)
    n = sample.n_nodes
    hit = rng.random(n) < flip_fraction
    sign = rng.integers(0, 2, size=n) * 2 - 1
    readings = sample.readings + hit * sign
    return NetworkSample(nodes=sample.nodes, edges=sample.edges, readings=readings)


# ---------------------------------------------------------------------------
# low-level geometry
# ---------------------------------------------------------------------------


def _dist(p, q):
    return math.hypot(p[0] - q[0], p[1] - q[1])


def _dot(a, b):
    return a[0] * b[0] + a[1] * b[1]


def _unit(xi):
    n = math.hypot(xi[0], xi[1])
    if abs(n - 1.0) > 1e-9:
        raise ValueError("xi must be a unit vector")
    return (xi[0] / n, xi[1] / n)


def _segment_distance(p, a, b):
    ax, ay = a
    bx, by = b
    px, py = p[0], p[1]
    vx, vy = bx - ax, by - ay
    L2 = vx * vx + vy * vy
    if L2 == 0:
        return math.hypot(px - ax, py - ay)
    t = ((px - ax) * vx + (py - ay) * vy) / L2
    t = max(0.0, min(1.0, t))
    return math.hypot(px - (ax + t * vx), py - (ay + t * vy))


def _segment_distance_many(pts, a, b):
    pts = np.asarray(pts, dtype=float)
    ax, ay = a
    vx, vy = b[0] - ax, b[1] - ay
    L2 = vx * vx + vy * vy
    if L2 == 0:
        return np.hypot(pts[..., 0] - ax, pts[..., 1] - ay)
    t = ((pts[..., 0] - ax) * vx + (pts[..., 1] - ay) * vy) / L2
    t = np.clip(t, 0.0, 1.0)
    return np.hypot(pts[..., 0] - (ax + t * vx), pts[..., 1] - (ay + t * vy))


def _line_distance(p, a, b):
    vx, vy = b[0] - a[0], b[1] - a[1]
    L = math.hypot(vx, vy)
    return abs((p[0] - a[0]) * vy - (p[1] - a[1]) * vx) / L


def _circular_arc_clusters(arcs):
    """Count of merged clusters of open arcs on the circle; None if they
    cover it.  Equals the component count of the complement, which is what
    the circle-slice chi needs.

    Arcs are (lo, hi) in radians with width hi - lo in (0, 2*pi).
    """
    if not arcs:
        return None
    two_pi = 2 * math.pi
    spans = []
    for lo, hi in arcs:
        w = hi - lo
        lo %= two_pi
        spans.append((lo, lo + w))
    # copy one period left and right, merge on the line; each circular gap
    # then shows up exactly once with its start inside [0, 2pi)
    events = sorted(
        [(lo + k * two_pi, hi + k * two_pi) for lo, hi in spans for k in (-1, 0, 1)]
    )
    merged = []
    cur_lo, cur_hi = events[0]
    for lo, hi in events[1:]:
        if lo <= cur_hi + _TANGENT_EPS:
            cur_hi = max(cur_hi, hi)
        else:
            merged.append((cur_lo, cur_hi))
            cur_lo, cur_hi = lo, hi
    merged.append((cur_lo, cur_hi))
    gaps = 0
    for (_, end), (start, _) in zip(merged, merged[1:]):
        if 0.0 <= end < two_pi:
            gaps += 1
    return gaps if gaps > 0 else None


def _segment_tube_line_intervals(p0, dirv, a, b, radius):
    """Intervals of t where p0 + t*dirv lies within radius of segment ab."""
    out = []
    ax, ay = a
    bx, by = b
    vx, vy = bx - ax, by - ay
    L = math.hypot(vx, vy)
    ux, uy = vx / L, vy / L
    # endpoint discs: |p0 + t d - e|^2 <= r^2, quadratic in t with |d| = 1
    for ex, ey in (a, b):
        cx, cy = p0[0] - ex, p0[1] - ey
        bq = cx * dirv[0] + cy * dirv[1]
        cq = cx * cx + cy * cy - radius * radius
        disc = bq * bq - cq
        if disc >= 0:
            s = math.sqrt(disc)
            out.append((-bq - s, -bq + s))
    # perpendicular band: |cross(u, p - a)| <= r and 0 <= dot(u, p - a) <= L
    crs0 = ux * (p0[1] - ay) - uy * (p0[0] - ax)
    crs1 = ux * dirv[1] - uy * dirv[0]
    prj0 = ux * (p0[0] - ax) + uy * (p0[1] - ay)
    prj1 = ux * dirv[0] + uy * dirv[1]
    band = _solve_linear_band(crs0, crs1, -radius, radius)
    along = _solve_linear_band(prj0, prj1, 0.0, L)
    if band is not None and along is not None:
        lo = max(band[0], along[0])
        hi = min(band[1], along[1])
        if lo <= hi:
            out.append((lo, hi))
    return out


def _solve_linear_band(c0, c1, lo, hi):
    """t range with lo <= c0 + c1 t <= hi; None if empty, +-inf when constant."""
    if abs(c1) < 1e-15:
        return (-math.inf, math.inf) if lo <= c0 <= hi else None
    t0, t1 = (lo - c0) / c1, (hi - c0) / c1
    return (min(t0, t1), max(t0, t1))
