"""Numerical Euler integration from discrete samples.

The triangulation estimator evaluates the excursion formula on a
min-extension of vertex readings; the planar ad hoc estimator replaces
excursion chi by connected-component counts through Alexander duality;
holes get bounds and harmonic interpolation; noisy readings get smoothed
through a radial kernel before floor integration, guarded by the
constructible feature size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import convolve2d
from scipy.spatial import Delaunay

from .complexes import ConstructibleFunction
from .complexes.cubical import CubicalComplex, _shift2d
from .complexes.simplicial import SimplicialComplex
from .integrate import integrate_cf
from .realval import PLFunction, integrate_floor
from .scene import Disc, NetworkSample, Scene, rasterize_counting_function

# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------


def estimate_triangulated(vertex_values, triangulation: SimplicialComplex) -> int:
    """Excursion-formula estimate from vertex samples on a 2D triangulation.

    The integrand is extended to open simplices by the minimum of the
    boundary vertex values; summing #V - #E + #F of the above-s subcomplex
    over integer levels s collapses to an alternating sum of per-simplex
    minima.
    """
    vals = np.asarray(vertex_values, dtype=np.int64)
    if vals.shape != (triangulation.n_vertices,):
        raise ValueError("need one value per vertex")
    if (vals < 0).any():
        raise ValueError("the estimator assumes non-negative readings")
    if triangulation.cell_dims.max() > 2:
        raise ValueError("the estimator is for 2D triangulations")
    total = 0
    for cell, sign in zip(triangulation.cells, triangulation.cell_signs):
        total += int(sign) * int(min(vals[v] for v in cell))
    return total


def _graph_beta0(n_nodes, edges, node_mask) -> int:
    """Components of the node-induced subgraph on the selected nodes."""
    idx = np.flatnonzero(node_mask)
    if idx.size == 0:
        return 0
    parent = {int(i): int(i) for i in idx}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, b in edges:
        a, b = int(a), int(b)
        if node_mask[a] and node_mask[b]:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra
    return len({find(int(i)) for i in idx})


def estimate_network_dual(sample: NetworkSample) -> int:
    """Planar duality estimate: sum over levels of
    beta0{h > s} - beta0{h <= s} + 1.

    Readings must be non-negative (the integrand is assumed u.s.c.); the
    sum runs from 0 to max(h) - 1, beyond which terms vanish.  When no
    reading is <= s, the lower count is taken as 1: the sampled window
    then lies inside the support and the far field supplies the single
    unbounded complement component of the plane.
    """
    readings = sample.readings
    if (readings < 0).any():
        raise ValueError("duality estimator requires non-negative readings")
    total = 0
    for s in range(int(readings.max()) if readings.size else 0):
        upper = _graph_beta0(sample.n_nodes, sample.edges, readings > s)
        lower = _graph_beta0(sample.n_nodes, sample.edges, readings <= s)
        if lower == 0:
            lower = 1
        total += upper - lower + 1
    return total


def per_level_beta0(sample: NetworkSample):
    """[(s, beta0 upper, beta0 lower)] for s = 0 .. max(h) - 1."""
    out = []
    for s in range(int(sample.readings.max()) if sample.readings.size else 0):
        up = _graph_beta0(sample.n_nodes, sample.edges, sample.readings > s)
        lo = _graph_beta0(sample.n_nodes, sample.edges, sample.readings <= s)
        out.append((s, up, max(lo, 1)))
    return out


# ---------------------------------------------------------------------------
# holes: bounds and harmonic interpolation
# ---------------------------------------------------------------------------


@dataclass
class HoleSpec:
    """A closed region of unknown readings and its topological boundary."""

    complex: CubicalComplex
    region: np.ndarray  # bool over the doubled lattice, closed cell set
    boundary: np.ndarray  # cells of region whose open star leaves it

    @property
    def interior(self):
        return self.region & ~self.boundary


def disc_hole(grid: CubicalComplex, center, radius) -> HoleSpec:
    """Hole spanned by the grid vertices within the given metric disc."""
    coords = grid.vertex_coords()
    inside = (coords[..., 0] - center[0]) ** 2 + (coords[..., 1] - center[1]) ** 2 < radius**2
    return _hole_from_vertex_mask(grid, inside)


def square_hole(grid: CubicalComplex, center, half_width) -> HoleSpec:
    """Hole spanned by the vertices within a Chebyshev ball (a square)."""
    coords = grid.vertex_coords()
    inside = np.maximum(
        np.abs(coords[..., 0] - center[0]), np.abs(coords[..., 1] - center[1])
    ) <= half_width
    return _hole_from_vertex_mask(grid, inside)


def _hole_from_vertex_mask(grid, vertex_inside):
    region = np.zeros(grid.dshape, dtype=bool)
    region[0::2, 0::2] = vertex_inside
    # a cell joins the region when all its corner vertices do
    region[0::2, 1::2] = vertex_inside[:, :-1] & vertex_inside[:, 1:]
    region[1::2, 0::2] = vertex_inside[:-1, :] & vertex_inside[1:, :]
    region[1::2, 1::2] = (
        vertex_inside[:-1, :-1]
        & vertex_inside[:-1, 1:]
        & vertex_inside[1:, :-1]
        & vertex_inside[1:, 1:]
    )
    # interior cells have their whole open star inside the region; a shift
    # by (di, dj) is a coface only across even coordinates
    star_ok = np.ones_like(region)
    n_i, n_j = grid.dshape
    rows_even = np.arange(n_i) % 2 == 0
    cols_even = np.arange(n_j) % 2 == 0
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            neighb = _shift2d(region.astype(np.int8), di, dj) > 0
            applies = np.ones_like(region)
            if di != 0:
                applies &= rows_even[:, None]
            if dj != 0:
                applies &= cols_even[None, :]
            star_ok &= np.where(applies, neighb, True)
    interior = region & star_ok
    boundary = region & ~interior
    if not boundary.any():
        raise ValueError("hole has empty boundary")
    return HoleSpec(complex=grid, region=region, boundary=boundary)


def hole_bounds(h: ConstructibleFunction, hole: HoleSpec):
    """(lower, upper) bounds for the integral with the hole unknown.

    Filling the closed hole with the boundary max cannot overcount;
    filling the open hole with the boundary min cannot undercount.
    """
    if not isinstance(h.complex, CubicalComplex):
        raise TypeError("hole bounds are implemented on grid functions")
    if (h.values < 0).any():
        raise ValueError("hole bounds assume non-negative readings")
    if not hole.boundary.any():
        raise ValueError("hole has empty boundary")
    count, _ = h.complex.components(hole.region)
    if count != 1 or h.complex.euler_characteristic(hole.region) != 1:
        raise ValueError("hole region must be a contractible disc")
    bmax = int(h.values[hole.boundary].max())
    bmin = int(h.values[hole.boundary].min())
    upper_vals = h.values.copy()
    upper_vals[hole.interior] = bmin
    lower_vals = h.values.copy()
    lower_vals[hole.region] = bmax
    lower = integrate_cf(ConstructibleFunction(h.complex, lower_vals))
    upper = integrate_cf(ConstructibleFunction(h.complex, upper_vals))
    return lower, upper


def harmonic_fill(h: ConstructibleFunction, hole: HoleSpec, tol=1e-9, max_iters=10**6) -> PLFunction:
    """Dirichlet fill of the hole by iterative neighbor averaging.

    Interior grid vertices relax to the mean of their four neighbors until
    the largest update drops below tol; the result is the PL function on
    the triangulated grid agreeing with the readings outside the hole.
    Averaging admits no strict interior extrema, so the filled integrand
    respects the hole bounds.
    """
    grid = h.complex
    if not isinstance(grid, CubicalComplex) or grid.ndim != 2:
        raise TypeError("harmonic fill is implemented on 2D grids")
    u = h.values[0::2, 0::2].astype(float)
    free = hole.interior[0::2, 0::2]
    if not free.any():
        raise ValueError("hole has no interior vertices to fill")
    if free[0, :].any() or free[-1, :].any() or free[:, 0].any() or free[:, -1].any():
        raise ValueError("hole touches the grid border")
    u[free] = float(h.values[hole.boundary].min())
    for _ in range(max_iters):
        avg = 0.25 * (
            np.roll(u, 1, axis=0) + np.roll(u, -1, axis=0)
            + np.roll(u, 1, axis=1) + np.roll(u, -1, axis=1)
        )
        delta = np.abs(avg - u)[free].max()
        u[free] = avg[free]
        if delta < tol:
            break
    else:
        raise RuntimeError(f"harmonic fill did not converge within {max_iters} iterations")
    w, hh = grid.pixel_shape
    tri = SimplicialComplex.triangulated_grid(w, hh, origin=grid.origin, pitch=grid.pitch)
    return PLFunction(tri, u.reshape(-1))


# ---------------------------------------------------------------------------
# smoothing and the constructible feature size
# ---------------------------------------------------------------------------


def _bump(d, radius):
    """Truncated quadratic bump profile on [0, radius]."""
    x = np.clip(np.asarray(d, dtype=float) / radius, 0.0, None)
    return np.where(x < 1.0, 1.0 - x**2, 0.0)


def smooth_raster(h: ConstructibleFunction, kernel_radius: float) -> PLFunction:
    """Radially weighted average of pixel readings, as a PL function on the
    triangulated pixel-center lattice."""
    grid = h.complex
    if not isinstance(grid, CubicalComplex) or grid.ndim != 2:
        raise TypeError("raster smoothing expects a 2D grid function")
    if kernel_radius <= 0:
        raise ValueError("kernel radius must be positive")
    pix = h.pixel_values().astype(float)
    reach = int(math.floor(kernel_radius / grid.pitch))
    offs = np.arange(-reach, reach + 1)
    dy, dx = np.meshgrid(offs, offs, indexing="ij")
    stamp = _bump(np.hypot(dx, dy) * grid.pitch, kernel_radius)
    weight = convolve2d(np.ones_like(pix), stamp, mode="same")
    smooth = convolve2d(pix, stamp, mode="same") / weight
    w, hh = grid.pixel_shape
    tri = SimplicialComplex.triangulated_grid(
        w - 1, hh - 1,
        origin=(grid.origin[0] + grid.pitch / 2, grid.origin[1] + grid.pitch / 2),
        pitch=grid.pitch,
    )
    return PLFunction(tri, smooth.reshape(-1))


def smooth_network(sample: NetworkSample, kernel_radius: float) -> PLFunction:
    """Radially weighted average of node readings on a Delaunay triangulation."""
    if sample.nodes is None:
        raise ValueError("network smoothing needs node coordinates")
    if kernel_radius <= 0:
        raise ValueError("kernel radius must be positive")
    pos = sample.nodes
    vals = sample.readings.astype(float)
    out = np.empty(len(pos))
    for i, p in enumerate(pos):
        d = np.hypot(pos[:, 0] - p[0], pos[:, 1] - p[1])
        w = _bump(d, kernel_radius)
        out[i] = float(np.dot(w, vals) / w.sum())
    tri = Delaunay(pos)
    complex = SimplicialComplex(
        [tuple(int(v) for v in s) for s in tri.simplices], vertex_coords=pos
    )
    return PLFunction(complex, out)


def smooth_and_integrate(data, kernel_radius: float) -> float:
    """Smooth readings with a radial bump of the given support radius, then
    take the floor Euler integral of the induced PL function.

    Raster inputs run in exact rational arithmetic (integer kernel weights
    and readings), so the noiseless guarantee of the feature-size theorem
    is met bit-exactly rather than to float tolerance.
    """
    if isinstance(data, ConstructibleFunction):
        return _smooth_raster_floor_exact(data, kernel_radius)
    if isinstance(data, NetworkSample):
        return integrate_floor(smooth_network(data, kernel_radius))
    raise TypeError("expected a raster function or a network sample")


def _smooth_raster_floor_exact(h: ConstructibleFunction, kernel_radius: float) -> float:
    """Floor integral of the smoothed raster with Fraction vertex values.

    The quadratic bump is realised with integer weights K - d**2 on pixel
    offsets (K = floor((radius/pitch)**2)), whose support radius is at
    most the requested one.
    """
    from fractions import Fraction

    grid = h.complex
    if not isinstance(grid, CubicalComplex) or grid.ndim != 2:
        raise TypeError("raster smoothing expects a 2D grid function")
    if kernel_radius <= 0:
        raise ValueError("kernel radius must be positive")
    K = int(math.floor((kernel_radius / grid.pitch) ** 2))
    if K < 1:
        raise ValueError("kernel radius is below one pixel")
    pix = h.pixel_values().astype(np.int64)
    reach = int(math.floor(math.sqrt(K)))
    offs = np.arange(-reach, reach + 1)
    dy, dx = np.meshgrid(offs, offs, indexing="ij")
    stamp = np.maximum(0, K - (dx**2 + dy**2)).astype(np.int64)
    num = convolve2d(pix, stamp, mode="same")
    den = convolve2d(np.ones_like(pix), stamp, mode="same")
    hh, w = pix.shape
    frac = [[Fraction(int(num[iy, ix]), int(den[iy, ix])) for ix in range(w)] for iy in range(hh)]
    total = Fraction(0)
    for iy in range(hh):  # vertices
        for ix in range(w):
            total += frac[iy][ix]
    for iy in range(hh):  # horizontal edges
        for ix in range(w - 1):
            total -= min(frac[iy][ix], frac[iy][ix + 1])
    for iy in range(hh - 1):  # vertical edges
        for ix in range(w):
            total -= min(frac[iy][ix], frac[iy + 1][ix])
    for iy in range(hh - 1):  # diagonals and the two triangles per square
        for ix in range(w - 1):
            a, b = frac[iy][ix], frac[iy][ix + 1]
            c, d = frac[iy + 1][ix], frac[iy + 1][ix + 1]
            total -= min(a, d)
            total += min(a, b, d) + min(a, d, c)
    return float(total)


@dataclass
class CfsEstimate:
    value: float
    method: str = "disc-scene-brute-force"

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("feature size cannot be negative")


def estimate_cfs(scene: Scene, probe_step=None, radii=None, boundary_samples=180,
                 raster_resolution=192) -> CfsEstimate:
    """Brute-force lower estimate of the constructible feature size.

    For disc scenes only: samples outward normals along every excursion
    component boundary, then finds the largest probe radius under which no
    component shows normals positively spanning zero inside any probe
    ball.  Returns the largest verified radius on the search grid.
    """
    for s in scene.shapes:
        if not isinstance(s, Disc):
            raise ValueError("feature-size estimation supports disc scenes only")
    if not scene.shapes:
        return CfsEstimate(value=math.inf)
    x0, y0, x1, y1 = scene.domain
    span = max(x1 - x0, y1 - y0)
    if probe_step is None:
        probe_step = span / 24
    if radii is None:
        # seed the grid with the natural thresholds: disc radii (center
        # probes), sqrt(2) radii (boundary probes), half-gaps (pair probes)
        cand = set(np.linspace(span / 64, span, 64))
        for i, a in enumerate(scene.shapes):
            cand.add(a.radius)
            cand.add(a.radius * math.sqrt(2))
            for b in scene.shapes[i + 1:]:
                d = math.hypot(a.center[0] - b.center[0], a.center[1] - b.center[1])
                gap = d - a.radius - b.radius
                if gap > 0:
                    cand.add(gap / 2)
        radii = np.array(sorted(cand))

    raster = rasterize_counting_function(scene, raster_resolution)
    grid = raster.complex
    max_level = int(raster.values.max())
    labels_by_level = {}
    for s in range(max_level):
        _, up = grid.components(raster.values > s)
        _, lo = grid.components(raster.values <= s)
        labels_by_level[s] = (up, lo)

    def label_at(labels, p):
        px = int((p[0] - grid.origin[0]) / grid.pitch)
        py = int((p[1] - grid.origin[1]) / grid.pitch)
        px = min(max(px, 0), grid.pixel_shape[0] - 1)
        py = min(max(py, 0), grid.pixel_shape[1] - 1)
        return labels[2 * py + 1, 2 * px + 1]

    pts = []
    normals = []
    tags = []
    eps = grid.pitch * 1.5
    for i, disc in enumerate(scene.shapes):
        cx, cy = disc.center
        for k in range(boundary_samples):
            ang = 2 * math.pi * (k + 0.5) / boundary_samples
            nx, ny = math.cos(ang), math.sin(ang)
            p = (cx + disc.radius * nx, cy + disc.radius * ny)
            level = int(scene.counting_values(np.array([p]))[0]) - 1
            if level < 0 or level >= max_level:
                continue
            up_labels, lo_labels = labels_by_level[level]
            inside_pt = (p[0] - eps * nx, p[1] - eps * ny)
            outside_pt = (p[0] + eps * nx, p[1] + eps * ny)
            up_comp = label_at(up_labels, inside_pt)
            lo_comp = label_at(lo_labels, outside_pt)
            if up_comp > 0:
                pts.append(p)
                normals.append(ang)
                tags.append((level, "up", int(up_comp)))
            if lo_comp > 0:
                pts.append(p)
                normals.append((ang + math.pi) % (2 * math.pi))
                tags.append((level, "lo", int(lo_comp)))
    pts = np.asarray(pts)
    normals = np.asarray(normals)
    tag_ids = {t: i for i, t in enumerate(sorted(set(tags)))}
    tagv = np.array([tag_ids[t] for t in tags])

    xs = np.arange(x0, x1 + probe_step / 2, probe_step)
    ys = np.arange(y0, y1 + probe_step / 2, probe_step)
    radii = np.sort(np.asarray(radii, dtype=float))
    best = radii[-1]
    for px in xs:
        for py in ys:
            d = np.hypot(pts[:, 0] - px, pts[:, 1] - py)
            lo_idx, hi_idx = 0, len(radii)
            # probe balls are open (strict inequality); the first violating
            # radius is monotone, so binary search
            while lo_idx < hi_idx:
                mid = (lo_idx + hi_idx) // 2
                if _normals_span_zero(normals, tagv, d < radii[mid] - 1e-12):
                    hi_idx = mid
                else:
                    lo_idx = mid + 1
            largest_safe = radii[lo_idx - 1] if lo_idx > 0 else 0.0
            best = min(best, largest_safe)
    return CfsEstimate(value=float(best))


def _normals_span_zero(normals, tags, subset) -> bool:
    """True if, for some boundary component, the selected normals positively
    span the origin (largest circular gap below pi)."""
    if not subset.any():
        return False
    for t in np.unique(tags[subset]):
        angs = np.sort(normals[subset & (tags == t)] % (2 * math.pi))
        if angs.size < 2:
            continue
        gaps = np.diff(np.concatenate([angs, [angs[0] + 2 * math.pi]]))
        if gaps.max() < math.pi - 1e-9:
            return True
    return False
