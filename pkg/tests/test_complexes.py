"""Cell complexes, constructible functions, and combinatorial chi."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulercalc.complexes import (
    ConstructibleFunction,
    CubicalComplex,
    SimplicialComplex,
    connected_components,
    euler_characteristic,
    read_pgm,
    usc_extension,
    write_pgm,
)
from eulercalc.scene import Annulus, Scene, rasterize_counting_function

from conftest import tetrahedron_boundary


def full_mask(cx):
    if isinstance(cx, CubicalComplex):
        return np.ones(cx.dshape, dtype=bool)
    return np.ones(cx.n_cells, dtype=bool)


def test_chi_sphere_from_tetrahedron():
    tet = tetrahedron_boundary()
    assert euler_characteristic(tet, full_mask(tet)) == 2


def test_chi_empty_subset_is_zero():
    grid = CubicalComplex((3, 3))
    assert euler_characteristic(grid, np.zeros(grid.dshape, dtype=bool)) == 0


def test_chi_single_open_edge():
    seg = SimplicialComplex([(0, 1)])
    mask = np.zeros(seg.n_cells, dtype=bool)
    mask[seg.index[(0, 1)]] = True
    assert euler_characteristic(seg, mask) == -1


def test_chi_closed_interval_and_open_square():
    grid = CubicalComplex((2,))
    mask = np.ones(grid.dshape, dtype=bool)
    assert euler_characteristic(grid, mask) == 1  # closed interval
    grid2 = CubicalComplex((1, 1))
    mask2 = np.zeros(grid2.dshape, dtype=bool)
    mask2[1, 1] = True
    assert euler_characteristic(grid2, mask2) == 1  # single open 2-cell


def test_grid_cell_count_invariant():
    w, h = 5, 3
    grid = CubicalComplex((w, h))
    assert grid.n_cells == (2 * w + 1) * (2 * h + 1)


def test_usc_constant():
    grid = CubicalComplex((4, 3))
    h = usc_extension(np.full((3, 4), 3), grid)
    assert (h.values == 3).all()


def test_usc_two_adjacent_pixels():
    grid = CubicalComplex((2, 1))
    h = usc_extension(np.array([[1, 2]]), grid)
    # shared vertical edge and its endpoints carry the max
    assert h.values[1, 2] == 2
    assert h.values[0, 2] == 2 and h.values[2, 2] == 2
    assert h.values[1, 1] == 1 and h.values[1, 3] == 2


def test_usc_checkerboard():
    grid = CubicalComplex((2, 2))
    pix = np.array([[0, 1], [1, 0]])
    h = usc_extension(pix, grid)
    # hand enumeration: every vertex incident to a 1-pixel reads 1
    verts = h.values[0::2, 0::2]
    expected = np.array([[0, 1, 1], [1, 1, 1], [1, 1, 0]])
    assert np.array_equal(verts, expected)


def test_components_two_squares_and_full_grid():
    grid = CubicalComplex((5, 5))
    pix = np.zeros((5, 5), dtype=np.int64)
    pix[1, 1] = 1
    pix[3, 3] = 1
    h = ConstructibleFunction.from_pixels(grid, pix)
    count, _ = connected_components(grid, h.values > 0)
    assert count == 2
    count, _ = connected_components(grid, full_mask(grid))
    assert count == 1


def test_components_annulus_and_complement():
    scene = Scene([Annulus((5, 5), 2.0, 4.0)], domain=(0, 0, 10, 10))
    h = rasterize_counting_function(scene, 100)
    count, _ = connected_components(h.complex, h.values > 0)
    assert count == 1
    count, _ = connected_components(h.complex, h.values <= 0)
    assert count == 2  # outside plus the inner hole


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**30 - 1))
def test_chi_additivity_on_grids(seed):
    rng = np.random.default_rng(seed)
    grid = CubicalComplex((int(rng.integers(1, 5)), int(rng.integers(1, 5))))
    a = rng.random(grid.dshape) < 0.5
    b = rng.random(grid.dshape) < 0.5
    lhs = euler_characteristic(grid, a | b)
    rhs = (
        euler_characteristic(grid, a)
        + euler_characteristic(grid, b)
        - euler_characteristic(grid, a & b)
    )
    assert lhs == rhs


def test_chi_additivity_simplicial(rng):
    tet = tetrahedron_boundary()
    for _ in range(30):
        a = rng.random(tet.n_cells) < 0.5
        b = rng.random(tet.n_cells) < 0.5
        assert euler_characteristic(tet, a | b) == (
            euler_characteristic(tet, a)
            + euler_characteristic(tet, b)
            - euler_characteristic(tet, a & b)
        )


def test_chi_product_of_grid_subsets(rng):
    # cross products of 1D cell subsets multiply chi
    for _ in range(30):
        w, h = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        grid = CubicalComplex((w, h))
        ax = rng.random(2 * w + 1) < 0.5
        ay = rng.random(2 * h + 1) < 0.5
        line_x = CubicalComplex((w,))
        line_y = CubicalComplex((h,))
        prod = ay[:, None] & ax[None, :]
        assert euler_characteristic(grid, prod) == euler_characteristic(
            line_x, ax
        ) * euler_characteristic(line_y, ay)


def test_barycentric_subdivision_preserves_chi(rng):
    tet = tetrahedron_boundary()
    sub, carrier = tet.barycentric_subdivision()
    for _ in range(20):
        # random closed subcomplex: closure of a random cell subset
        seed_cells = [i for i in range(tet.n_cells) if rng.random() < 0.4]
        closed = tet.closure_ids(seed_cells)
        mask = np.zeros(tet.n_cells, dtype=bool)
        mask[list(closed)] = True
        sub_mask = mask[carrier]
        assert euler_characteristic(tet, mask) == euler_characteristic(sub, sub_mask)


def test_face_closure_and_invariants():
    cx = SimplicialComplex([(0, 1, 2)])
    assert (0, 1) in cx.index and (2,) in cx.index
    with pytest.raises(ValueError):
        SimplicialComplex([(0, 1, 2, 3, 4)])  # dimension 4 carrier


def test_simplicial_json_roundtrip():
    tet = tetrahedron_boundary()
    clone = SimplicialComplex.from_json(tet.to_json())
    assert clone.cells == tet.cells


def test_pgm_roundtrip(tmp_path):
    pix = np.array([[0, 1, 2], [3, 0, 1]])
    path = tmp_path / "r.pgm"
    write_pgm(path, pix)
    assert np.array_equal(read_pgm(path), pix)


def test_cf_requires_integers():
    grid = CubicalComplex((2, 2))
    with pytest.raises(TypeError):
        ConstructibleFunction(grid, np.zeros(grid.dshape))


def test_missing_top_cell_value_rejected():
    grid = CubicalComplex((3, 2))
    with pytest.raises(ValueError):
        usc_extension(np.zeros((2, 2), dtype=int), grid)
