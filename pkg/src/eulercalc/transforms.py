"""Euler-calculus integral transforms.

Convolution with respect to chi (with duality-based deconvolution),
weighted Fredholm/Radon transforms with the mu/lambda inversion identity,
hybrid Bessel and Fourier transforms with exact slice geometry, the
polygonal curvature average, and the dyadic Haar wavelet transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import convolve2d

from .complexes import ConstructibleFunction
from .complexes.cubical import CubicalComplex
from .complexes.simplicial import SimplicialComplex
from .realval import dual
from .scene import ConvexPolygon, Disc, Scene

# ---------------------------------------------------------------------------
# convolution and deconvolution
# ---------------------------------------------------------------------------


def convolve(f: ConstructibleFunction, g: ConstructibleFunction) -> ConstructibleFunction:
    """Euler convolution of grid functions: (f*g)(x) = integral of f(t)g(x-t).

    Works on the doubled lattice: the result cell at doubled index a + c
    collects f(a)g(c) weighted by the chi of the intersection of the two
    translated open cells; per axis that is +1 at offset 0 except when both
    cells are open intervals, which contribute -1 at offsets -1, 0, +1.
    """
    fc, gc = f.complex, g.complex
    if not (isinstance(fc, CubicalComplex) and isinstance(gc, CubicalComplex)):
        raise TypeError("convolution is defined for grid functions")
    if fc.ndim != gc.ndim:
        raise ValueError("mixed grid dimensions")
    if abs(fc.pitch - gc.pitch) > 1e-12:
        raise ValueError("mismatched lattice pitch")
    if fc.ndim == 1:
        F, G = f.values[None, :], g.values[None, :]
    else:
        F, G = f.values, g.values
    out = np.zeros((F.shape[0] + G.shape[0] - 1, F.shape[1] + G.shape[1] - 1), dtype=np.int64)
    masks = {}
    for par_i in (0, 1):
        for par_j in (0, 1):
            for name, arr in (("F", F), ("G", G)):
                m = np.zeros_like(arr)
                m[par_i::2, par_j::2] = arr[par_i::2, par_j::2]
                masks[(name, par_i, par_j)] = m
    k3 = np.array([-1, -1, -1], dtype=np.int64)
    k1 = np.array([1], dtype=np.int64)
    for fi in (0, 1):
        for fj in (0, 1):
            Fm = masks[("F", fi, fj)]
            if not Fm.any():
                continue
            for gi in (0, 1):
                for gj in (0, 1):
                    Gm = masks[("G", gi, gj)]
                    if not Gm.any():
                        continue
                    conv = convolve2d(Fm, Gm, mode="full")
                    ky = k3 if (fi == 1 and gi == 1) else k1
                    kx = k3 if (fj == 1 and gj == 1) else k1
                    kernel = np.outer(ky, kx)
                    if kernel.shape != (1, 1):
                        conv = convolve2d(conv, kernel, mode="same")
                    out += conv
    if fc.ndim == 1:
        grid = CubicalComplex(
            (fc.pixel_shape[0] + gc.pixel_shape[0],),
            origin=(fc.origin[0] + gc.origin[0],),
            pitch=fc.pitch,
        )
        return ConstructibleFunction(grid, out[0])
    grid = CubicalComplex(
        (fc.pixel_shape[0] + gc.pixel_shape[0], fc.pixel_shape[1] + gc.pixel_shape[1]),
        origin=(fc.origin[0] + gc.origin[0], fc.origin[1] + gc.origin[1]),
        pitch=fc.pitch,
    )
    return ConstructibleFunction(grid, out)


def reflect(f: ConstructibleFunction) -> ConstructibleFunction:
    """The function t -> f(-t) on the reflected lattice."""
    fc = f.complex
    if not isinstance(fc, CubicalComplex):
        raise TypeError("reflect is defined for grid functions")
    if fc.ndim == 1:
        origin = (-(fc.origin[0] + fc.pixel_shape[0] * fc.pitch),)
        grid = CubicalComplex(fc.pixel_shape, origin=origin, pitch=fc.pitch)
        return ConstructibleFunction(grid, f.values[::-1].copy())
    w, h = fc.pixel_shape
    origin = (-(fc.origin[0] + w * fc.pitch), -(fc.origin[1] + h * fc.pitch))
    grid = CubicalComplex(fc.pixel_shape, origin=origin, pitch=fc.pitch)
    return ConstructibleFunction(grid, f.values[::-1, ::-1].copy())


def delta_function(ndim=2, pitch=1.0) -> ConstructibleFunction:
    """Indicator of the origin vertex on a minimal centered grid."""
    if ndim == 1:
        grid = CubicalComplex((2,), origin=(-pitch,), pitch=pitch)
        vals = np.zeros(5, dtype=np.int64)
        vals[2] = 1
        return ConstructibleFunction(grid, vals)
    grid = CubicalComplex((2, 2), origin=(-pitch, -pitch), pitch=pitch)
    vals = grid.zeros()
    vals[2, 2] = 1
    return ConstructibleFunction(grid, vals)


def deconvolve_convex(f: ConstructibleFunction, a: ConstructibleFunction) -> ConstructibleFunction:
    """Undo convolution by the indicator of a convex closed lattice shape.

    The convolution inverse of an indicator 1_A with A convex closed with
    nonempty interior is the dual of the reflected indicator, so this is
    f * dual(1_{-A}).
    """
    _require_convex_indicator(a)
    return convolve(f, dual(reflect(a)))


def _require_convex_indicator(a: ConstructibleFunction):
    vals = a.values
    if not np.isin(vals, (0, 1)).all():
        raise ValueError("expected an indicator function")
    nz = np.argwhere(vals != 0)
    if len(nz) == 1 and all(int(c) % 2 == 0 for c in nz[0]):
        return  # a single point is its own convolution unit
    if isinstance(a.complex, CubicalComplex) and a.complex.ndim == 2:
        pix = a.pixel_values()
        if pix.sum() == 0:
            raise ValueError("indicator must have nonempty interior")
        if not _lattice_convex(pix.astype(bool)):
            raise ValueError("deconvolution requires a convex shape")
        # closedness: the u.s.c. hull of the pixel set must match the values
        expected = a.complex.usc_extend(pix)
        if not np.array_equal(expected, vals):
            raise ValueError("indicator must be the closed hull of its pixels")
    elif isinstance(a.complex, CubicalComplex) and a.complex.ndim == 1:
        ones = np.flatnonzero(vals)
        if ones.size == 0 or (np.diff(ones) != 1).any():
            raise ValueError("1D convex support must be a closed interval")


def _lattice_convex(mask) -> bool:
    """Pixel set equals the lattice points of its convex hull."""
    pts = np.argwhere(mask)
    if len(pts) == 0:
        return False
    hull = _convex_hull(pts.astype(float))
    ys, xs = np.nonzero(np.ones_like(mask))
    inside = np.array(
        [_point_in_hull((y, x), hull) for y, x in zip(ys, xs)]
    ).reshape(mask.shape)
    return bool((inside == mask).all())


def _convex_hull(pts):
    pts = sorted(map(tuple, pts))
    if len(pts) <= 2:
        return pts
    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], p) <= 0:
                out.pop()
            out.append(p)
        return out
    lower = half(pts)
    upper = half(reversed(pts))
    return lower[:-1] + upper[:-1]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _point_in_hull(p, hull, eps=1e-9):
    if len(hull) == 1:
        return abs(p[0] - hull[0][0]) < eps and abs(p[1] - hull[0][1]) < eps
    if len(hull) == 2:
        a, b = hull
        if abs(_cross(a, b, p)) > eps:
            return False
        lo0, hi0 = sorted((a[0], b[0]))
        lo1, hi1 = sorted((a[1], b[1]))
        return lo0 - eps <= p[0] <= hi0 + eps and lo1 - eps <= p[1] <= hi1 + eps
    n = len(hull)
    return all(_cross(hull[i], hull[(i + 1) % n], p) >= -eps for i in range(n))


# ---------------------------------------------------------------------------
# Fredholm / Radon transforms and the weighted inversion identity
# ---------------------------------------------------------------------------


def point_space(n: int) -> SimplicialComplex:
    """A 0-dimensional complex of n isolated points."""
    return SimplicialComplex([(i,) for i in range(n)])


@dataclass
class FredholmKernel:
    """Integer kernel on W x X with W a finite point set and X a cell complex.

    weights[w, c] is the kernel value on {w} x (cell c); each row is a
    constructible function on X.
    """

    n_points: int
    space: object  # CellComplex carrying the X side
    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.int64)
        n_cells = self.space.n_cells
        if self.weights.shape != (self.n_points, n_cells):
            raise ValueError("weights must be (n_points, n_cells)")

    def column_cf(self, w) -> ConstructibleFunction:
        vals = self.weights[w]
        if isinstance(self.space, CubicalComplex):
            vals = vals.reshape(self.space.dshape)
        return ConstructibleFunction(self.space, vals)

    def fiber_chis(self):
        """Euler integral of each row over X (the target-support chis)."""
        signs = np.asarray(self.space.cell_signs).reshape(-1)
        return self.weights @ signs

    def to_json(self):
        if isinstance(self.space, SimplicialComplex):
            x_complex = self.space.to_json()
        else:
            raise TypeError("kernel JSON carries a simplicial X side")
        return {
            "W_points": self.n_points,
            "X_complex": x_complex,
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_json(cls, payload):
        import json as _json

        if isinstance(payload, (str, bytes)):
            payload = _json.loads(payload)
        space = SimplicialComplex.from_json(payload["X_complex"])
        return cls(
            n_points=int(payload["W_points"]),
            space=space,
            weights=np.asarray(payload["weights"], dtype=np.int64),
        )


def fredholm_transform(h, kernel: FredholmKernel) -> np.ndarray:
    """Push h in CF(W) through the kernel: flat cell values over X.

    chi on the finite point set W is counting, so the fiber integral is a
    plain weighted sum of the kernel columns.
    """
    h = np.asarray(h, dtype=np.int64)
    if h.shape != (kernel.n_points,):
        raise ValueError("h must assign one integer per W point")
    return h @ kernel.weights


def adjoint_transform(g_cells, kernel: FredholmKernel) -> np.ndarray:
    """Transform back from CF(X) to CF(W): per w, the Euler integral of
    g * K(.,w) over X (cell signs included)."""
    g = np.asarray(g_cells, dtype=np.int64).reshape(-1)
    signs = np.asarray(kernel.space.cell_signs).reshape(-1)
    return kernel.weights @ (signs * g)


def _same_space(a, b) -> bool:
    if a is b:
        return True
    if isinstance(a, SimplicialComplex) and isinstance(b, SimplicialComplex):
        return a.cells == b.cells
    if isinstance(a, CubicalComplex) and isinstance(b, CubicalComplex):
        return a.dshape == b.dshape and a.origin == b.origin and a.pitch == b.pitch
    return False


def kernel_product_matrix(K: FredholmKernel, K_inv: FredholmKernel) -> np.ndarray:
    """M[w, w'] = integral over X of K(w, .) K'(., w') dchi."""
    if not _same_space(K.space, K_inv.space):
        raise ValueError("kernels must share the X space")
    signs = np.asarray(K.space.cell_signs).reshape(-1)
    return (K.weights * signs[None, :]) @ K_inv.weights.T


def verify_inversion_pair(K, K_inv, mu: int, lam: int) -> bool:
    """Brute-force the delta condition: K K' integrates to
    (mu - lam) * delta + lam on every pair of W points."""
    m = kernel_product_matrix(K, K_inv)
    n = K.n_points
    expected = np.full((n, n), lam, dtype=np.int64)
    np.fill_diagonal(expected, mu)
    return bool(np.array_equal(m, expected))


def radon_invert(rh_cells, K: FredholmKernel, K_inv: FredholmKernel, mu: int, lam: int):
    """Recover h from its transform using the weighted inversion identity.

    Applying the inverse kernel gives (mu - lam) h + lam (integral of h) 1;
    the total integral is recovered from the fiber-chi scaling when needed.
    """
    if mu == lam:
        raise ValueError("non-invertible kernel pair (mu == lam)")
    if not verify_inversion_pair(K, K_inv, mu, lam):
        raise ValueError("kernel pair fails the delta compatibility condition")
    back = adjoint_transform(rh_cells, K_inv)
    if lam != 0:
        fibers = K.fiber_chis()
        if not (fibers == fibers[0]).all() or fibers[0] == 0:
            raise ValueError("fibers are not chi-constant; total integral unavailable")
        signs = np.asarray(K.space.cell_signs).reshape(-1)
        total_rh = int(np.dot(np.asarray(rh_cells).reshape(-1), signs))
        total_h, rem = divmod(total_rh, int(fibers[0]))
        if rem:
            raise ValueError("transform is not in the image of the kernel")
        back = back - lam * total_h
    h, rem = np.divmod(back, mu - lam)
    if rem.any():
        raise ValueError("transform is not in the image of the kernel")
    return h


def verify_cocycle(K1: FredholmKernel, K2: FredholmKernel, K3: FredholmKernel) -> bool:
    """Check R_{K2} o R_{K1} = R_{K3} on every delta function of W1.

    K1 must land on a point space that carries K2's W side.
    """
    mid = K1.space
    if not isinstance(mid, SimplicialComplex) or mid.cell_dims.max() != 0:
        raise ValueError("the middle space must be a finite point set")
    if mid.n_cells != K2.n_points:
        raise ValueError("K1 target and K2 source sizes differ")
    if K3.n_points != K1.n_points or not _same_space(K3.space, K2.space):
        raise ValueError("K3 must map W1 into K2's target space")
    for w in range(K1.n_points):
        delta = np.zeros(K1.n_points, dtype=np.int64)
        delta[w] = 1
        mid_vals = fredholm_transform(delta, K1)
        composed = fredholm_transform(mid_vals, K2)
        direct = fredholm_transform(delta, K3)
        if not np.array_equal(composed, direct):
            return False
    return True


def compose_kernels(K1: FredholmKernel, K2: FredholmKernel) -> FredholmKernel:
    """The cocycle composite: K3(w, c) = sum over the middle points of
    K1(w, .) K2(., c)."""
    mid = K1.space
    if not isinstance(mid, SimplicialComplex) or mid.cell_dims.max() != 0:
        raise ValueError("the middle space must be a finite point set")
    return FredholmKernel(K1.n_points, K2.space, K1.weights @ K2.weights)


def identity_kernel(n: int) -> FredholmKernel:
    return FredholmKernel(n, point_space(n), np.eye(n, dtype=np.int64))


def halfline_model_kernels(m: int, dressed: bool = False):
    """Synthetic hyperplane-style pair with mu = 1, lam = 0.

    Sensor j counts the targets in the discrete halfspace {w <= j}; the
    inverse kernel differences consecutive sensors, so the product matrix
    is the identity.  With dressed=True the X side is a disjoint union of
    closed edges (chi checks then exercise the cell signs).
    """
    K = np.tril(np.ones((m, m), dtype=np.int64)).T  # K[w, j] = 1 iff j >= w
    Kp = np.eye(m, dtype=np.int64) - np.eye(m, k=-1, dtype=np.int64)  # row w': d_{w'} - d_{w'-1}
    if not dressed:
        X = point_space(m)
        return FredholmKernel(m, X, K), FredholmKernel(m, X, Kp), 1, 0
    X = SimplicialComplex([(2 * j, 2 * j + 1) for j in range(m)])
    KX = _paint_on_edges(K, X, m)
    KpX = _paint_on_edges(Kp, X, m)
    return FredholmKernel(m, X, KX), FredholmKernel(m, X, KpX), 1, 0


def beam_model_kernels(m: int):
    """Synthetic even-dimension beam pair with mu = 0, lam = 2.

    Each sensor sees every target but its own position (fiber chi m - 1);
    doubling the identity as the inverse kernel gives the product
    2J - 2I, matching mu = 0, lam = 2.
    """
    if m < 2:
        raise ValueError("beam model needs at least two points")
    X = point_space(m)
    K = np.ones((m, m), dtype=np.int64) - np.eye(m, dtype=np.int64)
    Kp = 2 * np.eye(m, dtype=np.int64)
    return FredholmKernel(m, X, K), FredholmKernel(m, X, Kp), 0, 2


def _paint_on_edges(M, X, m):
    """Spread column j of M over the cells of the j-th closed edge of X.

    A closed edge has chi 1, so integrals match the point-space model while
    the (-1)**dim weights genuinely participate.
    """
    out = np.zeros((M.shape[0], X.n_cells), dtype=np.int64)
    for j in range(m):
        cells = [X.index[(2 * j,)], X.index[(2 * j + 1,)], X.index[(2 * j, 2 * j + 1)]]
        for c in cells:
            out[:, c] = M[:, j]
    return out


# ---------------------------------------------------------------------------
# Bessel and Fourier hybrid transforms
# ---------------------------------------------------------------------------


@dataclass
class TransformField:
    """Real values over a rectangular evaluation grid."""

    xs: np.ndarray
    ys: np.ndarray
    values: np.ndarray  # (len(ys), len(xs))

    def to_json(self):
        return {"xs": self.xs.tolist(), "ys": self.ys.tolist(), "values": self.values.tolist()}


def _integrate_piecewise(breakpoints, integrand, lo=0.0):
    """Exact Lebesgue integral over [lo, inf) of a piecewise-constant
    integrand whose jumps lie among the given breakpoints."""
    bps = sorted(set(float(b) for b in breakpoints if b > lo))
    pts = [lo] + bps
    total = 0.0
    for a, b in zip(pts, pts[1:]):
        total += (b - a) * integrand(0.5 * (a + b))
    return total


def bessel_at(scene: Scene, x, r_step=None) -> float:
    """Bessel transform at x: Lebesgue integral over r of the Euler
    integral of the counting function over the circle of radius r.

    With r_step=None the radial integral is exact (the slice chi is
    piecewise constant with analytically known breakpoints); a positive
    r_step switches to midpoint quadrature at that step.
    """
    if not scene.shapes:
        return 0.0
    rmax = scene.diameter_bound(x)

    def chi_sum(r):
        return float(sum(s.circle_intersection_chi(x, r) for s in scene.shapes))

    if r_step is None:
        bps = [rmax]
        for s in scene.shapes:
            bps.extend(b for b in s.circle_chi_breakpoints(x) if 0.0 < b <= rmax)
        return _integrate_piecewise(bps, chi_sum)
    if r_step <= 0:
        raise ValueError("r_step must be positive")
    total = 0.0
    r = 0.5 * r_step
    while r < rmax:
        total += r_step * chi_sum(r)
        r += r_step
    return total


def bessel_transform(scene: Scene, nx: int, ny: int, r_step=None) -> TransformField:
    """Bessel field over an evaluation grid spanning the scene domain."""
    x0, y0, x1, y1 = scene.domain
    xs = np.linspace(x0, x1, nx)
    ys = np.linspace(y0, y1, ny)
    vals = np.empty((ny, nx))
    for i, y in enumerate(ys):
        for j, x in enumerate(xs):
            vals[i, j] = bessel_at(scene, (x, y), r_step=r_step)
    return TransformField(xs=xs, ys=ys, values=vals)


def bessel_index(shape, x) -> float:
    """The boundary floor-integral of the distance function, evaluated from
    its critical points: sum of local maxima minus sum of local minima of
    d_x on the shape boundary.  For a ball or any probe seeing a single
    max/min pair this is max - min of the boundary distance.
    """
    if isinstance(shape, Disc):
        d = math.hypot(x[0] - shape.center[0], x[1] - shape.center[1])
        return (d + shape.radius) - abs(d - shape.radius)
    if isinstance(shape, ConvexPolygon):
        verts = shape.vertices
        n = len(verts)
        total = 0.0
        for i, v in enumerate(verts):
            d = math.hypot(v[0] - x[0], v[1] - x[1])
            prev_v = verts[(i - 1) % n]
            next_v = verts[(i + 1) % n]
            der_next = _edge_derivative(v, next_v, x)
            der_prev = _edge_derivative(v, prev_v, x)
            if der_next < 0 and der_prev < 0:
                total += d  # local max of d_x at the vertex
            elif der_next > 0 and der_prev > 0:
                total -= d  # local min at the vertex
        for i, v in enumerate(verts):
            w = verts[(i + 1) % n]
            foot = _foot_parameter(x, v, w)
            if 0.0 < foot < 1.0:
                px = (v[0] + foot * (w[0] - v[0]), v[1] + foot * (w[1] - v[1]))
                total -= math.hypot(px[0] - x[0], px[1] - x[1])  # interior foot: min
        return total
    raise TypeError("bessel_index requires a convex shape (disc or convex polygon)")


def _edge_derivative(v, other, x):
    """Sign of d/dt |v + t u - x| at t = 0+ along the edge direction u."""
    ux, uy = other[0] - v[0], other[1] - v[1]
    norm = math.hypot(ux, uy)
    return ((v[0] - x[0]) * ux + (v[1] - x[1]) * uy) / norm


def _foot_parameter(x, v, w):
    vx, vy = w[0] - v[0], w[1] - v[1]
    L2 = vx * vx + vy * vy
    return ((x[0] - v[0]) * vx + (x[1] - v[1]) * vy) / L2


def fourier_at(scene: Scene, xi, r_step=None) -> float:
    """Fourier transform along a unit covector: sweep the hyperplane slices
    across all offsets and Lebesgue-integrate their Euler integrals.

    The slice chi per shape is exact; offsets run over the whole support
    (the transform of a compactly supported integrand is insensitive to
    the offset origin, and the projected-width identity needs the full
    sweep).
    """
    if not scene.shapes:
        return 0.0
    bps = []
    for s in scene.shapes:
        bps.extend(s.xi_breakpoints(xi))
    lo, hi = min(bps) - 1.0, max(bps)

    def chi_sum(r):
        return float(sum(s.line_slice_chi(xi, r) for s in scene.shapes))

    if r_step is None:
        return _integrate_piecewise(sorted(set(bps)) + [hi], chi_sum, lo=lo)
    if r_step <= 0:
        raise ValueError("r_step must be positive")
    total = 0.0
    r = lo + 0.5 * r_step
    while r < hi + 1.0:
        total += r_step * chi_sum(r)
        r += r_step
    return total


def fourier_field(scene: Scene, n_directions: int, r_step=None) -> np.ndarray:
    """Fourier transform sampled over n uniformly spaced unit covectors."""
    out = np.empty(n_directions)
    for k in range(n_directions):
        ang = 2 * math.pi * k / n_directions
        out[k] = fourier_at(scene, (math.cos(ang), math.sin(ang)), r_step=r_step)
    return out


# ---------------------------------------------------------------------------
# polygonal Gauss-Bonnet via the microlocal transform
# ---------------------------------------------------------------------------


def microlocal_vertex_chi(polygon_pts, vertex_index: int, xi_angle: float) -> int:
    """chi of (open ball) n (polygon) n {xi . (y - x) >= 0} at a vertex.

    Counted stratum by stratum: the vertex itself, the two boundary rays
    that lie in the closed halfplane, the wedge components of the open
    cone inside the open halfplane, and the halfplane boundary segments
    strictly inside the cone.
    """
    pts = polygon_pts
    n = len(pts)
    v = pts[vertex_index]
    nxt = pts[(vertex_index + 1) % n]
    prv = pts[(vertex_index - 1) % n]
    a_next = math.atan2(nxt[1] - v[1], nxt[0] - v[0])
    a_prev = math.atan2(prv[1] - v[1], prv[0] - v[0])
    theta = (a_prev - a_next) % (2 * math.pi)  # interior angle, CCW polygon
    chi = 1  # the vertex itself always belongs
    for ray in (a_next, a_prev):
        if math.cos(ray - xi_angle) >= 0.0:
            chi -= 1
    chi += _open_arc_components(a_next, theta, xi_angle - math.pi / 2, math.pi)
    for perp in (xi_angle - math.pi / 2, xi_angle + math.pi / 2):
        if 0.0 < (perp - a_next) % (2 * math.pi) < theta:
            chi -= 1
    return chi


def _open_arc_components(start_a, width_a, start_b, width_b) -> int:
    """Components of the intersection of two open arcs on the circle."""
    count = 0
    sa = start_a % (2 * math.pi)
    sb = start_b % (2 * math.pi)
    for k in (-1, 0, 1):
        lo = max(sa, sb + 2 * math.pi * k)
        hi = min(sa + width_a, sb + width_b + 2 * math.pi * k)
        if hi - lo > 1e-14:
            count += 1
    return count


def gauss_bonnet_polygon(polygon_pts, n_directions: int):
    """Exterior angles and the direction-averaged microlocal total.

    Returns a dict with the per-vertex exterior angles (exact), their sum
    over 2 pi, and the numerically averaged microlocal total, which
    converges to 2 pi chi.  The direction average scans n_directions
    midpoints and locates the jump angles of the piecewise-constant
    integrand by bisection, so the quadrature is exact up to jump
    localisation error.
    """
    pts = [(float(x), float(y)) for x, y in polygon_pts]
    if n_directions < 3:
        raise ValueError("need at least three directions")
    n = len(pts)
    if n < 3 or abs(_polygon_area(pts)) < 1e-12:
        raise ValueError("degenerate polygon")
    if _polygon_area(pts) < 0:
        raise ValueError("polygon must be CCW oriented")
    exterior = []
    for i in range(n):
        v, nxt, prv = pts[i], pts[(i + 1) % n], pts[(i - 1) % n]
        a_next = math.atan2(nxt[1] - v[1], nxt[0] - v[0])
        a_prev = math.atan2(prv[1] - v[1], prv[0] - v[0])
        theta = (a_prev - a_next) % (2 * math.pi)
        exterior.append(math.pi - theta)

    def total(ang):
        return sum(microlocal_vertex_chi(pts, i, ang) for i in range(n))

    def total_vec(angles):
        out = np.zeros(len(angles), dtype=np.int64)
        for i in range(n):
            out += _microlocal_vertex_chi_vec(pts, i, angles)
        return out

    averaged = _integrate_circle_piecewise_constant(total, n_directions, scan_vec=total_vec)
    return {
        "exterior_angles": exterior,
        "angle_total_over_2pi": sum(exterior) / (2 * math.pi),
        "averaged_total": averaged,
    }


def _microlocal_vertex_chi_vec(pts, vertex_index, angles):
    """Vectorized microlocal_vertex_chi over an array of directions."""
    angles = np.asarray(angles, dtype=float)
    n = len(pts)
    v = pts[vertex_index]
    nxt = pts[(vertex_index + 1) % n]
    prv = pts[(vertex_index - 1) % n]
    a_next = math.atan2(nxt[1] - v[1], nxt[0] - v[0])
    a_prev = math.atan2(prv[1] - v[1], prv[0] - v[0])
    theta = (a_prev - a_next) % (2 * math.pi)
    chi = np.ones(len(angles), dtype=np.int64)
    for ray in (a_next, a_prev):
        chi -= (np.cos(ray - angles) >= 0.0).astype(np.int64)
    # wedge components: open cone (a_next, a_next+theta) meets open halfplane
    # arc (angles - pi/2, angles + pi/2); count per period copy
    sa = a_next % (2 * math.pi)
    sb = (angles - math.pi / 2) % (2 * math.pi)
    for k in (-1, 0, 1):
        lo = np.maximum(sa, sb + 2 * math.pi * k)
        hi = np.minimum(sa + theta, sb + math.pi + 2 * math.pi * k)
        chi += (hi - lo > 1e-14).astype(np.int64)
    for sign in (-1.0, 1.0):
        rel = (angles + sign * math.pi / 2 - a_next) % (2 * math.pi)
        chi -= ((rel > 0.0) & (rel < theta)).astype(np.int64)
    return chi


def _integrate_circle_piecewise_constant(fn, n_samples, refine=48, scan_vec=None):
    """Integral over [0, 2pi) of an integer-valued piecewise-constant
    function: scan at midpoints, bisect detected jumps."""
    step = 2 * math.pi / n_samples
    angles = [(k + 0.5) * step for k in range(n_samples)]
    if scan_vec is not None:
        values = list(scan_vec(np.array(angles)))
    else:
        values = [fn(a) for a in angles]
    total = 0.0
    for k in range(n_samples):
        a0, v0 = angles[k], values[k]
        a1 = angles[(k + 1) % n_samples] + (2 * math.pi if k + 1 == n_samples else 0)
        v1 = values[(k + 1) % n_samples]
        if v0 == v1:
            total += (a1 - a0) * v0
            continue
        lo, hi = a0, a1
        for _ in range(refine):
            mid = 0.5 * (lo + hi)
            if fn(mid) == v0:
                lo = mid
            else:
                hi = mid
        cut = 0.5 * (lo + hi)
        total += (cut - a0) * v0 + (a1 - cut) * v1
    return total


def _polygon_area(pts):
    n = len(pts)
    area = 0.0
    for i in range(n):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % n]
        area += x0 * y1 - x1 * y0
    return 0.5 * area


# ---------------------------------------------------------------------------
# Euler-Haar wavelets on dyadic lattices
# ---------------------------------------------------------------------------


def dyadic_grid_1d(k0: int, k1: int, level: int) -> CubicalComplex:
    """Lattice over [k0, k1] / 2**level with dyadic vertices."""
    if k1 <= k0:
        raise ValueError("empty window")
    pitch = 0.5**level
    return CubicalComplex((k1 - k0,), origin=(k0 * pitch,), pitch=pitch)


def _h0_values_on_line(grid: CubicalComplex, s: int, t: int):
    """H0_{s,t} (the atom at t / 2**s) sampled on the cells of a 1D grid."""
    out = np.zeros(grid.dshape[0], dtype=np.int64)
    point = t / 2.0**s
    idx = (point - grid.origin[0]) / (grid.pitch / 2)
    k = round(idx)
    if abs(idx - k) < 1e-9 and 0 <= k < grid.dshape[0] and k % 2 == 0:
        out[k] = 1
    return out


def _h1_values_on_line(grid: CubicalComplex, s: int, t: int):
    """H1_{s,t}: +1 on the first open half of [t, t+1] / 2**s, -1 on the second."""
    out = np.zeros(grid.dshape[0], dtype=np.int64)
    lo = t / 2.0**s
    mid = (t + 0.5) / 2.0**s
    hi = (t + 1.0) / 2.0**s
    half = grid.pitch / 2
    for k in range(grid.dshape[0]):
        x = grid.origin[0] + k * half
        if k % 2 == 1:  # open interval cell centered between lattice vertices
            if lo < x < mid:
                out[k] = 1
            elif mid < x < hi:
                out[k] = -1
        else:  # vertex cell: H1 vanishes at dyadic breakpoints, else steps
            if lo < x < mid:
                out[k] = 1
            elif mid < x < hi:
                out[k] = -1
    return out


def _wavelet_line_values(grid, p, s, t):
    return _h0_values_on_line(grid, s, t) if p == 0 else _h1_values_on_line(grid, s, t)


def _translation_range(grid: CubicalComplex, p: int, s: int):
    x0 = grid.origin[0]
    x1 = grid.origin[0] + grid.pixel_shape[0] * grid.pitch
    if p == 0:
        return range(math.ceil(2.0**s * x0 - 1e-9), math.floor(2.0**s * x1 + 1e-9) + 1)
    return range(math.floor(2.0**s * x0 - 1e-9) - 0, math.floor(2.0**s * x1 + 1e-9) + 1)


@dataclass
class WaveletCoefficients:
    """Euler-Haar transform values keyed by (p, s, t) tuples."""

    entries: dict
    scales: tuple

    def __eq__(self, other):
        if not isinstance(other, WaveletCoefficients):
            return NotImplemented
        keys = set(self.entries) | set(other.entries)
        return all(self.entries.get(k, 0) == other.entries.get(k, 0) for k in keys)

    def nonzero(self):
        return {k: v for k, v in self.entries.items() if v != 0}


def _refine_line_values(vals):
    """One dyadic refinement of a 1D cell-value line: old open edges split
    into edge/vertex/edge triples carrying the same value."""
    n = vals.shape[0]
    out = np.empty(2 * n - 1, dtype=vals.dtype)
    out[0::2] = vals
    for j in range(1, 2 * n - 1, 2):
        k0, k1 = (j - 1) // 2, (j + 1) // 2
        out[j] = vals[k0] if k0 % 2 == 1 else vals[k1]
    return out


def _refined_for_scales(f: ConstructibleFunction, scales):
    """Refine a dyadic grid function until every requested wavelet scale is
    cellwise constant on the lattice."""
    grid = f.complex
    level = round(-math.log2(grid.pitch))
    if abs(grid.pitch - 0.5**level) > 1e-12:
        raise ValueError("grid pitch must be a dyadic 2**-L")
    need = max(0, max(scales) + 1 - level)
    if need > 10:
        raise ValueError("scale window exceeds the lattice resolution by too much")
    vals = f.values
    for _ in range(need):
        if grid.ndim == 1:
            vals = _refine_line_values(vals)
        else:
            vals = np.apply_along_axis(_refine_line_values, 1, vals)
            vals = np.apply_along_axis(_refine_line_values, 0, vals)
        level += 1
    if grid.ndim == 1:
        fine = CubicalComplex((vals.shape[0] // 2,), origin=grid.origin, pitch=0.5**level)
    else:
        fine = CubicalComplex(
            (vals.shape[1] // 2, vals.shape[0] // 2), origin=grid.origin, pitch=0.5**level
        )
    return ConstructibleFunction(fine, vals)


def wavelet_transform(f: ConstructibleFunction, scales) -> WaveletCoefficients:
    """Euler inner products of f with every Haar atom and step function in
    the scale window, over the translations meeting f's dyadic window.

    The lattice is refined as needed so every requested wavelet is
    cellwise constant; the grid origin and pitch must be dyadic.
    """
    if not isinstance(f.complex, CubicalComplex):
        raise TypeError("wavelet transform expects a dyadic grid function")
    scales = tuple(scales)
    f = _refined_for_scales(f, scales)
    grid = f.complex
    entries = {}
    if grid.ndim == 1:
        signs = grid.cell_signs
        for p in (0, 1):
            for s in scales:
                for t in _translation_range(grid, p, s):
                    hv = _wavelet_line_values(grid, p, s, t)
                    entries[((p,), (s,), (t,))] = int(np.dot(signs * f.values, hv))
        return WaveletCoefficients(entries=entries, scales=scales)
    # 2D: separable kernels over the product lattice
    gx = CubicalComplex((grid.pixel_shape[0],), origin=(grid.origin[0],), pitch=grid.pitch)
    gy = CubicalComplex((grid.pixel_shape[1],), origin=(grid.origin[1],), pitch=grid.pitch)
    sx = gx.cell_signs
    sy = gy.cell_signs
    for px in (0, 1):
        for py in (0, 1):
            for s1 in scales:
                for s2 in scales:
                    for t1 in _translation_range(gx, px, s1):
                        hx = _wavelet_line_values(gx, px, s1, t1) * sx
                        if not hx.any():
                            continue
                        for t2 in _translation_range(gy, py, s2):
                            hy = _wavelet_line_values(gy, py, s2, t2) * sy
                            if not hy.any():
                                continue
                            val = int(hy @ f.values @ hx)
                            entries[((px, py), (s1, s2), (t1, t2))] = val
    return WaveletCoefficients(entries=entries, scales=scales)


def wavelet_distinguish(f: ConstructibleFunction, g: ConstructibleFunction, scales) -> bool:
    """True iff some Euler-Haar coefficient differs within the window."""
    return wavelet_transform(f, scales) != wavelet_transform(g, scales)


def wavelet_resynthesize(coeffs: WaveletCoefficients, grid: CubicalComplex) -> ConstructibleFunction:
    """Naive Fourier-series style resynthesis: sum coefficient * wavelet.

    The Haar family is not orthonormal under the Euler product, so this is
    NOT an inverse; it exists to reproduce that failure.
    """
    if grid.ndim != 1:
        raise ValueError("resynthesis demo is 1D")
    out = np.zeros(grid.dshape[0], dtype=np.int64)
    for ((p,), (s,), (t,)), c in coeffs.entries.items():
        if c:
            out += c * _wavelet_line_values(grid, p, s, t)
    return ConstructibleFunction(grid, out)


def wavelet_reconstruct_bruteforce(coeffs: WaveletCoefficients, grid: CubicalComplex,
                                   value_range, scales) -> list:
    """All CF functions on a small 1D window whose transform matches.

    Pure search at desk scale (no synthesis formula exists); refuses
    windows with more than a dozen cells.
    """
    n = grid.dshape[0]
    if n > 12:
        raise ValueError("brute-force reconstruction is desk-scale only")
    values = list(value_range)
    matches = []
    stack = [()]
    for assignment in _product_streams(values, n):
        f = ConstructibleFunction(grid, np.array(assignment, dtype=np.int64))
        if wavelet_transform(f, scales) == coeffs:
            matches.append(f)
    return matches


def _product_streams(values, n):
    if n == 0:
        yield ()
        return
    for rest in _product_streams(values, n - 1):
        for v in values:
            yield rest + (v,)
