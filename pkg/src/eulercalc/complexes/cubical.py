"""Finite axis-aligned cubical grid complexes.

A 2D grid of w x h pixels is stored on the *doubled index lattice*: an
array of shape (2h+1, 2w+1) whose entry (i, j) is one open cell of the
complex.  Parities give the cell dimension:

    (even, even) -> vertex          (odd, odd)  -> open square (pixel)
    (even, odd)  -> open x-edge     (odd, even) -> open y-edge

Two cells are face/coface adjacent exactly when their doubled indices
differ by 1 in one coordinate, so connected-component labelling reduces
to standard 4-connectivity on the doubled array.  1D grids use the same
scheme on a (2n+1,) line.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

_LABEL_STRUCTURE_2D = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)


class CubicalComplex:
    """Cubical grid complex on the doubled index lattice (1D or 2D).

    Parameters
    ----------
    pixel_shape : tuple
        (w,) for a line of w segments, or (w, h) for a w x h pixel grid.
    origin : tuple
        Coordinates of the lower-left vertex.
    pitch : float
        Side length of a pixel.
    """

    kind = "cubical-grid"

    def __init__(self, pixel_shape, origin=None, pitch=1.0):
        if isinstance(pixel_shape, int):
            pixel_shape = (pixel_shape,)
        pixel_shape = tuple(int(n) for n in pixel_shape)
        if len(pixel_shape) not in (1, 2) or any(n < 1 for n in pixel_shape):
            raise ValueError("pixel_shape must be (w,) or (w, h) with positive sizes")
        self.pixel_shape = pixel_shape
        self.ndim = len(pixel_shape)
        if self.ndim == 1:
            self.dshape = (2 * pixel_shape[0] + 1,)
        else:
            w, h = pixel_shape
            self.dshape = (2 * h + 1, 2 * w + 1)  # rows are y, columns are x
        self.origin = tuple(origin) if origin is not None else (0.0,) * self.ndim
        self.pitch = float(pitch)
        self.n_cells = int(np.prod(self.dshape))
        self._dims = None
        self._signs = None

    # -- basic cell data ---------------------------------------------------

    @property
    def cell_dims(self):
        """Array over the doubled lattice with the dimension of each cell."""
        if self._dims is None:
            if self.ndim == 1:
                idx = np.arange(self.dshape[0])
                self._dims = (idx % 2).astype(np.int8)
            else:
                i = np.arange(self.dshape[0])[:, None] % 2
                j = np.arange(self.dshape[1])[None, :] % 2
                self._dims = (i + j).astype(np.int8)
        return self._dims

    @property
    def cell_signs(self):
        """(-1)**dim per cell, the weights of combinatorial chi."""
        if self._signs is None:
            self._signs = np.where(self.cell_dims % 2 == 0, 1, -1).astype(np.int64)
        return self._signs

    def zeros(self, dtype=np.int64):
        return np.zeros(self.dshape, dtype=dtype)

    # -- chi and components ------------------------------------------------

    def euler_characteristic(self, mask) -> int:
        """Compactly-supported chi of a cell subset: sum of (-1)**dim."""
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != self.dshape:
            raise ValueError("mask shape does not match the doubled lattice")
        return int(self.cell_signs[mask].sum())

    def components(self, mask):
        """Connected components of a cell subset through shared faces.

        Returns (count, labels) where labels is an int array over the
        doubled lattice, 0 on unselected cells and 1..count on selected.
        """
        mask = np.asarray(mask, dtype=bool)
        if self.ndim == 1:
            labels, count = ndimage.label(mask, structure=np.ones(3, dtype=bool))
        else:
            labels, count = ndimage.label(mask, structure=_LABEL_STRUCTURE_2D)
        return int(count), labels

    # -- upper semicontinuous extension from top cells ----------------------

    def usc_extend(self, top_values):
        """Extend per-pixel readings to all cells by the max over incident pixels.

        Keeps upper excursion sets {h >= s} closed, which the excursion
        formulas assume for sampled data.
        """
        top = np.asarray(top_values)
        if self.ndim == 1:
            (w,) = self.pixel_shape
            if top.shape != (w,):
                raise ValueError("expected one value per segment")
            out = np.empty(self.dshape, dtype=top.dtype)
            out[1::2] = top
            out[0:1] = top[0]
            out[-1:] = top[-1]
            out[2:-1:2] = np.maximum(top[:-1], top[1:])
            return out
        w, h = self.pixel_shape
        if top.shape != (h, w):
            raise ValueError(f"expected pixel array of shape {(h, w)}")
        neg = np.iinfo(top.dtype).min if np.issubdtype(top.dtype, np.integer) else -np.inf
        padded = np.full((h + 2, w + 2), neg, dtype=top.dtype)
        padded[1:-1, 1:-1] = top
        out = np.empty(self.dshape, dtype=top.dtype)
        out[1::2, 1::2] = top
        # x-edges sit between vertically adjacent pixels, y-edges between
        # horizontally adjacent ones; vertices take the max of four pixels.
        out[0::2, 1::2] = np.maximum(padded[:-1, 1:-1], padded[1:, 1:-1])
        out[1::2, 0::2] = np.maximum(padded[1:-1, :-1], padded[1:-1, 1:])
        corners = np.maximum(
            np.maximum(padded[:-1, :-1], padded[:-1, 1:]),
            np.maximum(padded[1:, :-1], padded[1:, 1:]),
        )
        out[0::2, 0::2] = corners
        return out

    # -- geometry ------------------------------------------------------------

    def pixel_centers(self):
        """Coordinates of pixel centers; shape (h, w, 2) in 2D, (w,) in 1D."""
        if self.ndim == 1:
            (w,) = self.pixel_shape
            return self.origin[0] + self.pitch * (np.arange(w) + 0.5)
        w, h = self.pixel_shape
        xs = self.origin[0] + self.pitch * (np.arange(w) + 0.5)
        ys = self.origin[1] + self.pitch * (np.arange(h) + 0.5)
        out = np.empty((h, w, 2))
        out[:, :, 0] = xs[None, :]
        out[:, :, 1] = ys[:, None]
        return out

    def vertex_coords(self):
        """Coordinates of grid vertices; shape (h+1, w+1, 2) in 2D."""
        if self.ndim == 1:
            (w,) = self.pixel_shape
            return self.origin[0] + self.pitch * np.arange(w + 1)
        w, h = self.pixel_shape
        xs = self.origin[0] + self.pitch * np.arange(w + 1)
        ys = self.origin[1] + self.pitch * np.arange(h + 1)
        out = np.empty((h + 1, w + 1, 2))
        out[:, :, 0] = xs[None, :]
        out[:, :, 1] = ys[:, None]
        return out

    # -- duality -------------------------------------------------------------

    def star_sum(self, values, signed=True):
        """Per cell, the (-1)**dim weighted sum of values over its open star.

        The star of a cell c is every cell whose closure contains c; on the
        doubled lattice that is the set of cells within one step of c in
        each coordinate where c has even index.  This is the combinatorial
        dual operator on constructible functions.
        """
        vals = np.asarray(values)
        if vals.shape != self.dshape:
            raise ValueError("values shape does not match the doubled lattice")
        signs = self.cell_signs if signed else np.ones(self.dshape, dtype=np.int64)
        weighted = vals * signs
        out = np.zeros(self.dshape, dtype=weighted.dtype)
        if self.ndim == 1:
            n = self.dshape[0]
            even = np.arange(n) % 2 == 0
            for d in (-1, 0, 1):
                lo, hi = max(0, -d), min(n, n - d)
                contrib = np.zeros(n, dtype=weighted.dtype)
                contrib[lo:hi] = weighted[lo + d:hi + d]
                if d != 0:
                    contrib[~even] = 0
                out += contrib
            return out
        rows = np.arange(self.dshape[0]) % 2 == 0
        cols = np.arange(self.dshape[1]) % 2 == 0
        for di in (-1, 0, 1):
            for dj in (-1, 0, 1):
                shifted = _shift2d(weighted, di, dj)
                if di != 0:
                    shifted[~rows, :] = 0
                if dj != 0:
                    shifted[:, ~cols] = 0
                out += shifted
        return out

    def __repr__(self):
        return f"CubicalComplex(pixels={self.pixel_shape}, origin={self.origin}, pitch={self.pitch})"


def _shift2d(a, di, dj):
    """a shifted so out[i, j] = a[i+di, j+dj], zero-filled at the borders."""
    out = np.zeros_like(a)
    src_i = slice(max(0, di), a.shape[0] + min(0, di))
    src_j = slice(max(0, dj), a.shape[1] + min(0, dj))
    dst_i = slice(max(0, -di), a.shape[0] + min(0, -di))
    dst_j = slice(max(0, -dj), a.shape[1] + min(0, -dj))
    out[dst_i, dst_j] = a[src_i, src_j]
    return out


def read_pgm(path, with_geometry=False):
    """Read a plain (P2) PGM file into an int array of pixel readings.

    A `# geometry x0 y0 pitch` comment, when present, records the world
    placement of the raster; with_geometry=True returns (pixels, origin,
    pitch) with defaults origin (0, 0) and pitch 1.
    """
    origin, pitch = (0.0, 0.0), 1.0
    with open(path, "r", encoding="ascii") as fh:
        tokens = []
        for line in fh:
            if line.lstrip().startswith("#"):
                parts = line.split()
                if len(parts) >= 5 and parts[1] == "geometry":
                    origin = (float(parts[2]), float(parts[3]))
                    pitch = float(parts[4])
                continue
            line = line.split("#", 1)[0]
            tokens.extend(line.split())
    if not tokens or tokens[0] != "P2":
        raise ValueError("only plain PGM (P2) rasters are supported")
    width, height = int(tokens[1]), int(tokens[2])
    values = np.array([int(t) for t in tokens[4:4 + width * height]], dtype=np.int64)
    if values.size != width * height:
        raise ValueError("PGM pixel count does not match header")
    pixels = values.reshape(height, width)
    if with_geometry:
        return pixels, origin, pitch
    return pixels


def write_pgm(path, pixels, origin=None, pitch=None) -> None:
    """Write integer pixel readings as a plain (P2) PGM file."""
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise ValueError("expected a 2D pixel array")
    if (pixels < 0).any():
        raise ValueError("PGM cannot store negative readings")
    h, w = pixels.shape
    maxval = max(1, int(pixels.max()))
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"P2\n")
        if origin is not None and pitch is not None:
            fh.write(f"# geometry {origin[0]} {origin[1]} {pitch}\n")
        fh.write(f"{w} {h}\n{maxval}\n")
        for row in pixels:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")
