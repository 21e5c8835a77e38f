"""Shared mesh builders and scene fixtures."""

import math

import numpy as np
import pytest

from eulercalc.complexes import CubicalComplex, ConstructibleFunction, SimplicialComplex
from eulercalc.scene import Disc, Scene


def tetrahedron_boundary():
    """Triangulated S^2 as the boundary of a tetrahedron."""
    return SimplicialComplex([(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)])


def octahedron():
    """Triangulated S^2; vertices 0/1 are the poles."""
    return SimplicialComplex(
        [(0, 2, 4), (0, 4, 3), (0, 3, 5), (0, 5, 2), (1, 2, 4), (1, 4, 3), (1, 3, 5), (1, 5, 2)],
        vertex_coords=[(0, 0, 1), (0, 0, -1), (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)],
    )


def icosahedron():
    t = (1 + math.sqrt(5)) / 2
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    return SimplicialComplex(faces, vertex_coords=verts)


def circle_complex(n):
    """Triangulated circle with n vertices."""
    return SimplicialComplex([(i, (i + 1) % n) for i in range(n)])


def torus_grid(n=4, m=4):
    """Triangulated flat torus on an n x m wraparound lattice."""
    def vid(i, j):
        return (i % n) * m + (j % m)
    tris = []
    for i in range(n):
        for j in range(m):
            tris.append((vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)))
            tris.append((vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)))
    return SimplicialComplex(tris)


def six_disc_scene():
    shapes = [Disc((1.5 + 3 * (k % 3), 1.5 + 3 * (k // 3)), 1.0) for k in range(6)]
    return Scene(shapes, domain=(0, 0, 9, 6))


def eleven_disc_scene():
    """Eleven disjoint contractible targets spread over the domain."""
    centers = [
        (1.6, 1.6), (4.4, 1.4), (7.3, 1.7), (10.3, 1.5),
        (1.5, 4.4), (4.6, 4.6), (7.5, 4.3), (10.4, 4.6),
        (2.9, 7.2), (6.1, 7.4), (9.3, 7.2),
    ]
    return Scene([Disc(c, 0.9) for c in centers], domain=(0, 0, 12, 9))


def random_convex_polygon(rng, center=(0.0, 0.0), rmin=0.6, rmax=1.6, kmin=4, kmax=9):
    """Strictly convex CCW polygon from radial samples of a convex curve."""
    from eulercalc.scene import ConvexPolygon

    while True:
        k = int(rng.integers(kmin, kmax + 1))
        angs = np.sort(rng.uniform(0, 2 * math.pi, k))
        if np.min(np.diff(angs)) < 0.15:
            continue
        a, b = rng.uniform(rmin, rmax, 2)
        pts = [
            (center[0] + a * math.cos(t), center[1] + b * math.sin(t))
            for t in angs
        ]
        try:
            return ConvexPolygon(tuple(pts))
        except ValueError:
            continue


def random_cf_on_grid(rng, max_side=6, span=3):
    w, h = int(rng.integers(1, max_side)), int(rng.integers(1, max_side))
    grid = CubicalComplex((w, h))
    vals = rng.integers(-span, span + 1, size=grid.dshape)
    return ConstructibleFunction(grid, vals)


def cf_nonzero_support(f):
    """Nonzero cell values keyed by absolute half-lattice coordinates."""
    out = {}
    grid = f.complex
    half = grid.pitch / 2
    it = np.argwhere(f.values != 0)
    for idx in it:
        if grid.ndim == 1:
            key = (round((grid.origin[0] + idx[0] * half) / half),)
        else:
            i, j = idx
            key = (
                round((grid.origin[0] + j * half) / half),
                round((grid.origin[1] + i * half) / half),
            )
        out[key] = int(f.values[tuple(idx)])
    return out


def cf_equal_as_functions(f, g):
    """Equality of grid CFs as functions of the plane (lattice-independent)."""
    return cf_nonzero_support(f) == cf_nonzero_support(g)


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
