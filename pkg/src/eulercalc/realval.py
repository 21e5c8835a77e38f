"""Real-valued Euler integration of piecewise-linear functions.

The floor measure integrates (-1)**dim times the infimum of the integrand
over each open simplex, the ceiling measure the supremum; for affine data
those extrema are vertex values, so both integrals are finite weighted
vertex sums.  The same sums arise from stratified Morse indices, which
this module also computes, together with the Rota-Chen jump integral and
the duality/link operators.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import ConstructibleFunction
from .complexes.cubical import CubicalComplex
from .complexes.simplicial import SimplicialComplex


@dataclass
class PLFunction:
    """Real value per vertex of a simplicial complex, affine on open simplices."""

    complex: SimplicialComplex
    vertex_values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.vertex_values, dtype=float).reshape(-1)
        if vals.shape != (self.complex.n_vertices,):
            raise ValueError("need one value per vertex")
        self.vertex_values = vals

    def cell_min(self):
        """Per cell, min of the closure vertex values (= inf over the open cell)."""
        return np.array([self.vertex_values[list(c)].min() for c in self.complex.cells])

    def cell_max(self):
        return np.array([self.vertex_values[list(c)].max() for c in self.complex.cells])

    def __neg__(self):
        return PLFunction(self.complex, -self.vertex_values)

    def scaled(self, factor):
        return PLFunction(self.complex, factor * self.vertex_values)


# ---------------------------------------------------------------------------
# floor / ceiling / bracket integrals
# ---------------------------------------------------------------------------


def integrate_floor(h: PLFunction) -> float:
    """Lower Euler integral: sum over open simplices of (-1)**dim * inf."""
    signs = h.complex.cell_signs
    return float(np.dot(signs, h.cell_min()))


def integrate_ceil(h: PLFunction) -> float:
    """Upper Euler integral: (-1)**dim * sup per simplex; conjugate of floor."""
    signs = h.complex.cell_signs
    return float(np.dot(signs, h.cell_max()))


def integrate_bracket(h: PLFunction) -> float:
    """Average of the floor and ceiling integrals (the linear combination)."""
    return 0.5 * (integrate_floor(h) + integrate_ceil(h))


def integrate_excursion_floor(h: PLFunction, step: float) -> float:
    """Floor integral by quadrature over excursion levels.

    Integrates chi{h >= s} - chi{h < -s} over s >= 0 with midpoint samples
    at the given step; converges to integrate_floor as step -> 0.  For
    generic s the excursion chi is the chi of the fully-above (resp.
    not-fully-at-or-above) subcomplex, since simplices crossed by the level
    contribute an open piece and its relatively open face, which cancel.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    mins = h.cell_min()
    signs = h.complex.cell_signs
    bound = float(np.abs(h.vertex_values).max()) if h.vertex_values.size else 0.0
    total = 0.0
    s = 0.5 * step
    while s <= bound:
        total += step * float(signs[mins > s].sum())  # chi{h >= s}
        total -= step * float(signs[mins < -s].sum())  # chi{h < -s}
        s += step
    return total


def total_variation_circle(h: PLFunction) -> float:
    """Total variation of h along a triangulated 1-manifold (sum of |jumps|)."""
    edges = [c for c in h.complex.cells if len(c) == 2]
    return float(
        sum(abs(h.vertex_values[a] - h.vertex_values[b]) for a, b in edges)
    )


# ---------------------------------------------------------------------------
# Rota-Chen jump integral
# ---------------------------------------------------------------------------


def rota_chen_integrate(h) -> float:
    """Jump integral: subtract the mean of one-sided limits, then integrate.

    Continuous functions are in the kernel; on grids the transform is
    applied axis by axis.  Accepts a ConstructibleFunction on a 1D or 2D
    cubical grid, or a PLFunction on a complex embedded in the line
    (which, being continuous, integrates to zero).
    """
    if isinstance(h, PLFunction):
        # one-sided limits of a continuous function agree with the value
        return 0.0
    if not isinstance(h, ConstructibleFunction) or not isinstance(h.complex, CubicalComplex):
        raise TypeError("rota_chen_integrate expects a cubical CF or a PLFunction")
    vals = h.values.astype(float)
    if h.complex.ndim == 1:
        return _rota_chen_line(vals)
    rows = np.array([_rota_chen_line(vals[i, :]) for i in range(vals.shape[0])])
    return _rota_chen_line(rows)


def _rota_chen_line(vals):
    """1D pass: cells alternate vertex, open edge, vertex, ...; jumps live
    at vertices, with value 0 assumed beyond the ends (compact support)."""
    n = vals.shape[0]
    total = 0.0
    for i in range(0, n, 2):
        left = vals[i - 1] if i - 1 >= 0 else 0.0
        right = vals[i + 1] if i + 1 < n else 0.0
        total += vals[i] - 0.5 * (left + right)
    return total


# ---------------------------------------------------------------------------
# stratified Morse indices
# ---------------------------------------------------------------------------


@dataclass
class MorseIndexReport:
    values: np.ndarray
    index_star: np.ndarray  # 1 - chi(lower link)
    index_costar: np.ndarray  # 1 - chi(upper link) = index_star of -h


def _link_chi_below(h: PLFunction, v: int) -> int:
    """chi of the sublink spanned by link vertices lexicographically below v.

    Ties in vertex values are broken by vertex id (simulation of
    simplicity), matching the argmin convention of the floor integral.
    """
    vals = h.vertex_values
    key_v = (vals[v], v)
    chi = 0
    for cell in h.complex.link_of_vertex(v):
        if all((vals[u], u) < key_v for u in cell):
            chi += 1 if (len(cell) - 1) % 2 == 0 else -1
    return chi


def _link_chi_above(h: PLFunction, v: int) -> int:
    vals = h.vertex_values
    key_v = (vals[v], v)
    chi = 0
    for cell in h.complex.link_of_vertex(v):
        if all((vals[u], u) > key_v for u in cell):
            chi += 1 if (len(cell) - 1) % 2 == 0 else -1
    return chi


def morse_index(h: PLFunction) -> MorseIndexReport:
    """Euler-Poincare index and co-index per vertex of a PL function."""
    nv = h.complex.n_vertices
    star = np.empty(nv, dtype=np.int64)
    costar = np.empty(nv, dtype=np.int64)
    for v in range(nv):
        star[v] = 1 - _link_chi_below(h, v)
        costar[v] = 1 - _link_chi_above(h, v)
    return MorseIndexReport(values=h.vertex_values.copy(), index_star=star, index_costar=costar)


def integrate_by_index(h: PLFunction, which: str = "floor") -> float:
    """Integrate via the vertex-index pairing.

    The floor integral weights each vertex value by the co-index, the
    ceiling integral by the index; regrouping the per-simplex extrema by
    their arg-extremum vertex shows the sums agree exactly with
    integrate_floor / integrate_ceil.
    """
    report = morse_index(h)
    if which == "floor":
        return float(np.dot(report.values, report.index_costar))
    if which == "ceil":
        return float(np.dot(report.values, report.index_star))
    raise ValueError("which must be 'floor' or 'ceil'")


# ---------------------------------------------------------------------------
# duality and link
# ---------------------------------------------------------------------------


@dataclass
class CellwiseAffine:
    """A function affine on each open cell, allowed to jump across cells.

    Per cell, the affine form is recorded by its values at the closure
    vertices of that cell.  PL functions embed (all cells then share the
    global vertex data); duals of PL functions live here, since duality
    destroys continuity on non-manifold complexes.
    """

    complex: SimplicialComplex
    coeffs: dict  # cell id -> {vertex: value}

    @classmethod
    def from_pl(cls, h: PLFunction):
        coeffs = {
            cid: {v: float(h.vertex_values[v]) for v in cell}
            for cid, cell in enumerate(h.complex.cells)
        }
        return cls(h.complex, coeffs)

    def value_on_cell(self, cid, vertex):
        return self.coeffs[cid][vertex]

    def allclose(self, other, tol=0.0):
        if self.complex is not other.complex:
            return False
        for cid, forms in self.coeffs.items():
            for v, x in forms.items():
                if abs(x - other.coeffs[cid][v]) > tol:
                    return False
        return True


def dual(h):
    """Duality operator: the limit of Euler integrals over shrinking balls.

    On a cell c it evaluates to the (-1)**dim weighted sum, over the cells
    whose closure contains c, of their limiting values at c.  Constructible
    functions map to constructible functions; PL functions map to cellwise
    affine functions (and those to each other, involutively).
    """
    if isinstance(h, ConstructibleFunction):
        if isinstance(h.complex, CubicalComplex):
            return ConstructibleFunction(h.complex, h.complex.star_sum(h.values))
        out = np.empty(h.complex.n_cells, dtype=np.int64)
        signs = h.complex.cell_signs
        for cid in range(h.complex.n_cells):
            out[cid] = sum(signs[sid] * h.values[sid] for sid in h.complex.stars[cid])
        return ConstructibleFunction(h.complex, out)
    if isinstance(h, PLFunction):
        h = CellwiseAffine.from_pl(h)
    if not isinstance(h, CellwiseAffine):
        raise TypeError("dual expects a constructible, PL, or cellwise-affine function")
    cx = h.complex
    signs = cx.cell_signs
    coeffs = {}
    for cid, cell in enumerate(cx.cells):
        form = {}
        for v in cell:
            form[v] = float(sum(signs[sid] * h.coeffs[sid][v] for sid in cx.stars[cid]))
        coeffs[cid] = form
    return CellwiseAffine(cx, coeffs)


def link(h):
    """Link operator: identity minus duality."""
    d = dual(h)
    if isinstance(h, ConstructibleFunction):
        return ConstructibleFunction(h.complex, h.values - d.values)
    if isinstance(h, PLFunction):
        h = CellwiseAffine.from_pl(h)
    coeffs = {
        cid: {v: h.coeffs[cid][v] - d.coeffs[cid][v] for v in form}
        for cid, form in d.coeffs.items()
    }
    return CellwiseAffine(h.complex, coeffs)


# ---------------------------------------------------------------------------
# restricted Fubini for definable integrands
# ---------------------------------------------------------------------------


def pushforward_disjoint_copies(fs) -> PLFunction:
    """Pushforward along the fold map of a disjoint union of copies of Y.

    The fiber over a point of Y is one point per copy, so the pushforward
    is the vertexwise sum.  Fubini for the floor measure holds along this
    map exactly when the integrand is constant on fibers; the two-copies
    configuration with differing summands is the standard counterexample.
    """
    if not fs:
        raise ValueError("need at least one copy")
    base = fs[0].complex
    for f in fs[1:]:
        if f.complex is not base:
            raise ValueError("copies must share the target complex")
    total = np.zeros(base.n_vertices)
    for f in fs:
        total += f.vertex_values
    return PLFunction(base, total)
