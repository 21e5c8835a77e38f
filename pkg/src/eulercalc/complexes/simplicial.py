"""Finite simplicial complexes up to dimension 3.

Cells are stored as sorted vertex tuples with dense integer ids, closed
under the face relation.  Supports chi of arbitrary cell subsets,
connected components through shared faces, vertex links (for PL Morse
indices), stars (for duality) and barycentric subdivision.
"""

from __future__ import annotations

import json
from itertools import combinations

import numpy as np


class SimplicialComplex:
    kind = "simplicial"

    def __init__(self, simplices, vertex_coords=None):
        """Build the closure of the given simplices.

        simplices : iterable of vertex-index tuples (0-based).
        vertex_coords : optional (n_vertices, 2 or 3) array.
        """
        closed = set()
        max_v = -1
        for s in simplices:
            s = tuple(sorted(set(int(v) for v in s)))
            if not s:
                continue
            if len(s) > 4:
                raise ValueError("simplicial carriers are limited to dimension 3")
            max_v = max(max_v, s[-1])
            for k in range(1, len(s) + 1):
                closed.update(combinations(s, k))
        # every referenced vertex is a cell
        for v in range(max_v + 1):
            closed.add((v,))
        self.cells = sorted(closed, key=lambda c: (len(c), c))
        self.index = {c: i for i, c in enumerate(self.cells)}
        self.n_cells = len(self.cells)
        self.n_vertices = max_v + 1
        self.cell_dims = np.array([len(c) - 1 for c in self.cells], dtype=np.int8)
        self.cell_signs = np.where(self.cell_dims % 2 == 0, 1, -1).astype(np.int64)
        if vertex_coords is not None:
            vertex_coords = np.asarray(vertex_coords, dtype=float)
            if vertex_coords.shape[0] < self.n_vertices:
                raise ValueError("vertex_coords does not cover all vertices")
        self.vertex_coords = vertex_coords
        self._stars = None
        self._links = None

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_json(cls, payload):
        """Load {"kind":"simplicial","vertices":[[x,y,z]..],"simplices":[[..]..]}."""
        if isinstance(payload, (str, bytes)):
            payload = json.loads(payload)
        if payload.get("kind", "simplicial") != "simplicial":
            raise ValueError("not a simplicial complex payload")
        coords = payload.get("vertices")
        coords = np.asarray(coords, dtype=float) if coords else None
        return cls(payload["simplices"], vertex_coords=coords)

    def to_json(self):
        top = [list(c) for c in self.top_cells()]
        out = {"kind": "simplicial", "simplices": top}
        if self.vertex_coords is not None:
            out["vertices"] = self.vertex_coords.tolist()
        return out

    @classmethod
    def triangulated_grid(cls, nx, ny, origin=(0.0, 0.0), pitch=1.0, diagonal="ne"):
        """Triangulated (nx x ny)-cell lattice; vertices indexed row-major."""
        if nx < 1 or ny < 1:
            raise ValueError("grid must have at least one cell per axis")
        def vid(ix, iy):
            return iy * (nx + 1) + ix
        tris = []
        for iy in range(ny):
            for ix in range(nx):
                a, b = vid(ix, iy), vid(ix + 1, iy)
                c, d = vid(ix, iy + 1), vid(ix + 1, iy + 1)
                if diagonal == "ne" or (diagonal == "alternate" and (ix + iy) % 2 == 0):
                    tris.append((a, b, d))
                    tris.append((a, d, c))
                else:
                    tris.append((a, b, c))
                    tris.append((b, d, c))
        coords = np.array(
            [
                (origin[0] + pitch * ix, origin[1] + pitch * iy)
                for iy in range(ny + 1)
                for ix in range(nx + 1)
            ]
        )
        return cls(tris, vertex_coords=coords)

    # -- cell structure --------------------------------------------------------

    def top_cells(self):
        """Cells that are not a proper face of any other cell."""
        non_top = set()
        for c in self.cells:
            if len(c) > 1:
                for f in combinations(c, len(c) - 1):
                    non_top.add(f)
        return [c for c in self.cells if c not in non_top]

    def facets(self, cid):
        c = self.cells[cid]
        if len(c) == 1:
            return []
        return [self.index[f] for f in combinations(c, len(c) - 1)]

    @property
    def stars(self):
        """stars[c] = ids of every cell whose closure contains cell c (incl. c)."""
        if self._stars is None:
            stars = [[] for _ in range(self.n_cells)]
            for sid, s in enumerate(self.cells):
                for k in range(1, len(s) + 1):
                    for f in combinations(s, k):
                        stars[self.index[f]].append(sid)
            self._stars = stars
        return self._stars

    def closure_ids(self, cids):
        out = set()
        for cid in cids:
            c = self.cells[cid]
            for k in range(1, len(c) + 1):
                out.update(self.index[f] for f in combinations(c, k))
        return out

    def link_of_vertex(self, v):
        """Cells s with v not in s and s + {v} a cell of the complex."""
        if self._links is None:
            self._links = {}
        if v not in self._links:
            link = []
            for sid in self.stars[self.index[(v,)]]:
                s = self.cells[sid]
                if len(s) > 1:
                    rest = tuple(u for u in s if u != v)
                    link.append(rest)
            self._links[v] = sorted(set(link), key=lambda c: (len(c), c))
        return self._links[v]

    # -- chi and components ------------------------------------------------------

    def euler_characteristic(self, mask) -> int:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (self.n_cells,):
            raise ValueError("mask must have one entry per cell")
        return int(self.cell_signs[mask].sum())

    def components(self, mask):
        """Components of a cell subset, joined through selected faces/cofaces."""
        mask = np.asarray(mask, dtype=bool)
        parent = list(range(self.n_cells))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        def union(a, b):
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra

        for cid in range(self.n_cells):
            if not mask[cid]:
                continue
            for fid in self.facets(cid):
                if mask[fid]:
                    union(cid, fid)
        labels = np.zeros(self.n_cells, dtype=np.int64)
        roots = {}
        for cid in range(self.n_cells):
            if mask[cid]:
                r = find(cid)
                if r not in roots:
                    roots[r] = len(roots) + 1
                labels[cid] = roots[r]
        return len(roots), labels

    # -- subdivision ------------------------------------------------------------

    def barycentric_subdivision(self):
        """First barycentric subdivision; new vertex i is old cell i.

        Returns (subdivided complex, carrier) where carrier[new_cell_id] is
        the old cell id whose open cell contains the new open cell.
        """
        chains = []
        for top in self.top_cells():
            tid = self.index[top]
            chains.extend(self._chains_under(tid))
        sub = SimplicialComplex(chains)
        carrier = np.empty(sub.n_cells, dtype=np.int64)
        for nid, c in enumerate(sub.cells):
            carrier[nid] = max(c, key=lambda oc: len(self.cells[oc]))
        return sub, carrier

    def _chains_under(self, tid):
        """All maximal chains of the face poset ending at cell tid."""
        c = self.cells[tid]
        if len(c) == 1:
            return [(tid,)]
        out = []
        for f in combinations(c, len(c) - 1):
            for chain in self._chains_under(self.index[f]):
                out.append(chain + (tid,))
        return out

    def __repr__(self):
        by_dim = {}
        for d in self.cell_dims:
            by_dim[int(d)] = by_dim.get(int(d), 0) + 1
        sizes = ", ".join(f"{by_dim[d]}x{d}d" for d in sorted(by_dim))
        return f"SimplicialComplex({sizes})"
