"""Constructible functions: one bounded integer per open cell of a complex."""

from __future__ import annotations

import numpy as np

from .cubical import CubicalComplex
from .simplicial import SimplicialComplex


class ConstructibleFunction:
    """Integer value per open cell of a CubicalComplex or SimplicialComplex.

    Values are stored as an array shaped like the carrier: the doubled
    lattice for cubical grids, a flat per-cell-id vector for simplicial
    complexes.  Instances are treated as immutable values; operations
    return new functions.
    """

    def __init__(self, complex, values):
        values = np.asarray(values)
        if isinstance(complex, CubicalComplex):
            if values.shape != complex.dshape:
                raise ValueError("values must cover the doubled lattice")
        elif isinstance(complex, SimplicialComplex):
            values = values.reshape(-1)
            if values.shape != (complex.n_cells,):
                raise ValueError("values must cover every cell")
        else:
            raise TypeError("unsupported complex type")
        if not np.issubdtype(values.dtype, np.integer):
            raise TypeError("constructible functions take integer values")
        self.complex = complex
        self.values = values.astype(np.int64)
        self.values.setflags(write=False)

    @classmethod
    def from_pixels(cls, grid: CubicalComplex, pixels):
        """Raster readings on top cells, extended u.s.c. by the max rule."""
        pixels = np.asarray(pixels, dtype=np.int64)
        return cls(grid, grid.usc_extend(pixels))

    @classmethod
    def zero(cls, complex):
        if isinstance(complex, CubicalComplex):
            return cls(complex, complex.zeros())
        return cls(complex, np.zeros(complex.n_cells, dtype=np.int64))

    @classmethod
    def indicator(cls, complex, mask):
        mask = np.asarray(mask, dtype=bool)
        return cls(complex, mask.astype(np.int64))

    # -- bounds and masks -----------------------------------------------------

    @property
    def span(self) -> int:
        """max |value|, the truncation bound for excursion sums."""
        return int(np.abs(self.values).max()) if self.values.size else 0

    def upper_mask(self, s):
        """{h > s} as a boolean cell mask."""
        return self.values > s

    def lower_mask(self, s):
        """{h <= s} as a boolean cell mask."""
        return self.values <= s

    def level_mask(self, s):
        return self.values == s

    def pixel_values(self):
        if not isinstance(self.complex, CubicalComplex) or self.complex.ndim != 2:
            raise TypeError("pixel_values is only defined for 2D grids")
        return self.values[1::2, 1::2]

    # -- arithmetic (CF is a ring of functions) ---------------------------------

    def _check_same(self, other):
        if self.complex is not other.complex:
            raise ValueError("functions live on different complexes")

    def __add__(self, other):
        if isinstance(other, ConstructibleFunction):
            self._check_same(other)
            return ConstructibleFunction(self.complex, self.values + other.values)
        return ConstructibleFunction(self.complex, self.values + int(other))

    def __sub__(self, other):
        if isinstance(other, ConstructibleFunction):
            self._check_same(other)
            return ConstructibleFunction(self.complex, self.values - other.values)
        return ConstructibleFunction(self.complex, self.values - int(other))

    def __mul__(self, other):
        if isinstance(other, ConstructibleFunction):
            self._check_same(other)
            return ConstructibleFunction(self.complex, self.values * other.values)
        return ConstructibleFunction(self.complex, self.values * int(other))

    __rmul__ = __mul__

    def __neg__(self):
        return ConstructibleFunction(self.complex, -self.values)

    def __eq__(self, other):
        return (
            isinstance(other, ConstructibleFunction)
            and self.complex is other.complex
            and np.array_equal(self.values, other.values)
        )

    def __repr__(self):
        return f"ConstructibleFunction(span={self.span}, on {self.complex!r})"


def euler_characteristic(complex, subset) -> int:
    """chi of a cell subset: sum over selected open cells of (-1)**dim.

    subset may be a boolean mask over cells or a predicate on cell
    descriptors (doubled-lattice index pairs for grids, vertex tuples for
    simplicial complexes).
    """
    mask = _as_mask(complex, subset)
    return complex.euler_characteristic(mask)


def connected_components(complex, subset):
    """Component count and labelling of a cell subset joined through faces."""
    mask = _as_mask(complex, subset)
    return complex.components(mask)


def usc_extension(top_values, grid: CubicalComplex) -> ConstructibleFunction:
    """Per-pixel readings extended u.s.c. (max rule) to the full grid."""
    return ConstructibleFunction.from_pixels(grid, top_values)


def _as_mask(complex, subset):
    if callable(subset):
        if isinstance(complex, CubicalComplex):
            mask = np.zeros(complex.dshape, dtype=bool)
            for idx in np.ndindex(complex.dshape):
                mask[idx] = bool(subset(idx))
            return mask
        mask = np.zeros(complex.n_cells, dtype=bool)
        for cid, cell in enumerate(complex.cells):
            mask[cid] = bool(subset(cell))
        return mask
    return np.asarray(subset, dtype=bool)
