"""The Euler integral of constructible functions and its pushforward.

Three equivalent formulas are provided: the cellwise alternating sum,
the level-set sum, and the excursion-set sum (the form used on sampled
data).  Pushforward along cellular maps gives the Fubini theorem; target
counts divide the integral by the common support chi.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .complexes import ConstructibleFunction
from .complexes.cubical import CubicalComplex


def integrate_cf(h: ConstructibleFunction) -> int:
    """Euler integral: sum over cells of value * (-1)**dim."""
    signs = h.complex.cell_signs
    return int((h.values * signs).sum())


def integrate_by_level_sets(h: ConstructibleFunction) -> int:
    """Euler integral as sum over s of s * chi{h = s}."""
    total = 0
    for s in np.unique(h.values):
        if s != 0:
            total += int(s) * h.complex.euler_characteristic(h.level_mask(s))
    return total


def integrate_by_excursions(h: ConstructibleFunction) -> int:
    """Euler integral as sum over s >= 0 of chi{h > s} - chi{h < -s}.

    The formally infinite sum is truncated at span(h): all later terms
    vanish on a finite complex.
    """
    total = 0
    for s in range(h.span):
        total += h.complex.euler_characteristic(h.values > s)
        total -= h.complex.euler_characteristic(h.values < -s)
    return total


def count_targets(h: ConstructibleFunction, support_chi: int) -> Fraction:
    """Number of targets when every support has chi == support_chi != 0."""
    if support_chi == 0:
        raise ValueError("Euler-measure-zero supports; count undefined")
    return Fraction(integrate_cf(h), support_chi)


@dataclass(frozen=True)
class CellularMap:
    """A cellwise map between complexes: each source cell lands on a target cell.

    Cells are assumed to map trivially (the fiber of an interior point of
    the image cell is an open cell of complementary dimension), which is
    the situation for identity maps, axis projections of product grids,
    and disjoint-union collapses.
    """

    source: object
    target: object
    cell_image: np.ndarray  # flat source-cell-id -> flat target-cell-id

    def __post_init__(self):
        img = np.asarray(self.cell_image, dtype=np.int64)
        if img.shape != (_n_cells(self.source),):
            raise ValueError("cell_image must assign every source cell")
        if img.min() < 0 or img.max() >= _n_cells(self.target):
            raise ValueError("cell_image references unknown target cells")
        object.__setattr__(self, "cell_image", img)
        src_dims = _flat_dims(self.source)
        tgt_dims = _flat_dims(self.target)
        if (tgt_dims[img] > src_dims).any():
            raise ValueError("cellular maps cannot raise dimension")
        # face compatibility: the image of a face lies in the closure of the
        # image of the cell
        if isinstance(self.source, CubicalComplex) and isinstance(self.target, CubicalComplex):
            if not _faces_compatible_cubical(self.source, self.target, img):
                raise ValueError("map is not face-compatible")
        else:
            for cid in range(_n_cells(self.source)):
                target_closure = _closure_flat(self.target, int(img[cid]))
                for fid in _facets_flat(self.source, cid):
                    if int(img[fid]) not in target_closure:
                        raise ValueError("map is not face-compatible")


def identity_map(complex) -> CellularMap:
    n = _n_cells(complex)
    return CellularMap(complex, complex, np.arange(n))


def projection_map(grid: CubicalComplex, axis: int) -> CellularMap:
    """Axis projection of a 2D product grid onto one of its 1D factors.

    axis=0 projects onto the x line (collapsing y), axis=1 onto y.
    """
    if grid.ndim != 2:
        raise ValueError("projection_map expects a 2D grid")
    w, h = grid.pixel_shape
    if axis == 0:
        line = CubicalComplex((w,), origin=(grid.origin[0],), pitch=grid.pitch)
        j = np.arange(grid.dshape[1])
        img2d = np.broadcast_to(j[None, :], grid.dshape)
    elif axis == 1:
        line = CubicalComplex((h,), origin=(grid.origin[1],), pitch=grid.pitch)
        i = np.arange(grid.dshape[0])
        img2d = np.broadcast_to(i[:, None], grid.dshape)
    else:
        raise ValueError("axis must be 0 or 1")
    return CellularMap(grid, line, img2d.reshape(-1))


def pushforward(h: ConstructibleFunction, fmap: CellularMap) -> ConstructibleFunction:
    """Fiberwise Euler integration of h along a cellular map.

    The value on a target cell y is the Euler integral of h over the
    preimage of an interior point of y; with cellwise-trivial maps that is
    sum over source cells mapping to y of value * (-1)**(dim difference).
    """
    if h.complex is not fmap.source:
        raise ValueError("function does not live on the map's source complex")
    src_vals = h.values.reshape(-1)
    src_dims = _flat_dims(fmap.source)
    tgt_dims = _flat_dims(fmap.target)
    rel = src_dims - tgt_dims[fmap.cell_image]
    weights = np.where(rel % 2 == 0, 1, -1).astype(np.int64)
    out = np.zeros(_n_cells(fmap.target), dtype=np.int64)
    np.add.at(out, fmap.cell_image, src_vals * weights)
    if isinstance(fmap.target, CubicalComplex):
        out = out.reshape(fmap.target.dshape)
    return ConstructibleFunction(fmap.target, out)


def _n_cells(complex):
    return complex.n_cells


def _flat_dims(complex):
    return np.asarray(complex.cell_dims).reshape(-1)


def _faces_compatible_cubical(source, target, img):
    """Vectorized face check for grid-to-grid maps: along every axis where a
    source cell is extended, both shrunk faces must map into the coordinate
    closure of the cell's image."""
    src_shape = source.dshape if source.ndim == 2 else (source.dshape[0], 1)
    tgt_shape = target.dshape if target.ndim == 2 else (target.dshape[0], 1)
    img2 = img.reshape(src_shape)
    if target.ndim == 2:
        ti, tj = np.unravel_index(img2.reshape(-1), target.dshape)
        ti = ti.reshape(src_shape)
        tj = tj.reshape(src_shape)
    else:
        ti, tj = img2, np.zeros_like(img2)
    for axis in (0, 1):
        n = src_shape[axis]
        if n == 1:
            continue
        odd = (np.arange(n) % 2 == 1)
        sel = odd[:, None] * np.ones(src_shape, dtype=bool) if axis == 0 else (
            np.ones(src_shape, dtype=bool) * odd[None, :]
        )
        for d in (-1, 1):
            fi = np.roll(ti, -d, axis=axis)
            fj = np.roll(tj, -d, axis=axis)
            ok = (np.abs(fi - ti) <= ti % 2) & (np.abs(fj - tj) <= tj % 2)
            if not ok[sel].all():
                return False
    return True


def _facets_flat(complex, cid):
    """Codimension-1 faces of a cell, as flat ids."""
    if isinstance(complex, CubicalComplex):
        if complex.ndim == 1:
            idx = (cid,)
            shape = complex.dshape
        else:
            shape = complex.dshape
            idx = np.unravel_index(cid, shape)
        out = []
        for axis, coord in enumerate(idx):
            if coord % 2 == 1:  # odd coordinates shrink to faces
                for d in (-1, 1):
                    nxt = list(idx)
                    nxt[axis] = coord + d
                    out.append(int(np.ravel_multi_index(nxt, shape)))
        return out
    return complex.facets(cid)


def _closure_flat(complex, cid):
    """All cells in the closure of a cell (including itself), as flat ids."""
    if isinstance(complex, CubicalComplex):
        shape = complex.dshape
        idx = np.unravel_index(cid, shape) if complex.ndim == 2 else (cid,)
        ranges = [
            range(c - 1, c + 2) if c % 2 == 1 else range(c, c + 1) for c in idx
        ]
        out = set()
        for combo in np.ndindex(*[len(r) for r in ranges]):
            coords = tuple(ranges[k][combo[k]] for k in range(len(ranges)))
            out.add(int(np.ravel_multi_index(coords, shape)))
        return out
    cell = complex.cells[cid]
    return {complex.index[f] for k in range(1, len(cell) + 1)
            for f in combinations(cell, k)}
