import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kadets.extend2d import (DegenerateRayError, ExtensionContractError,
                             InconsistentPartitionError, RaySystem, boundary_graph,
                             build_extension, cell_polygons, check_extension, crossing_free,
                             erase_rays, extend_partition, initial_rays)
from kadets.geom import EPS_GEO, EmptySetError, HPolyhedron, PolygonV, polygon_from_hrep
from kadets.partition import CellSet, build_affine_cells, restrict, voronoi_functions
from kadets.verify import _binary_cut_tree, pinwheel_instance, random_body
from kadets.partition import hierarchical_cells

SQUARE = PolygonV([[0, 0], [1, 0], [1, 1], [0, 1]])
SQ = SQUARE.to_hpolyhedron()


def body_cells(cells):
    return restrict(CellSet(cells), SQ)


def split_cells():
    return body_cells([HPolyhedron([[1, 0]], [0.5]), HPolyhedron([[-1, 0]], [-0.5])])


def quadrant_cells():
    return body_cells([
        HPolyhedron([[1, 0], [0, 1]], [0.5, 0.5]),
        HPolyhedron([[-1, 0], [0, 1]], [-0.5, 0.5]),
        HPolyhedron([[-1, 0], [0, -1]], [-0.5, -0.5]),
        HPolyhedron([[1, 0], [0, -1]], [0.5, -0.5]),
    ])


def fan_cells():
    def line(p, q):
        p, q = np.array(p, float), np.array(q, float)
        e = q - p
        n = np.array([e[1], -e[0]])
        return n, n @ p

    n1, b1 = line([0.4, 0], [0.2, 1])
    n2, b2 = line([0.6, 0], [0.8, 1])
    return body_cells([HPolyhedron([n1], [b1]), HPolyhedron([-n1, n2], [-b1, b2]),
                       HPolyhedron([-n2], [-b2])])


def box_around(B: PolygonV, factor=5.0):
    c = B.vertices.mean(axis=0)
    span = np.max(B.vertices.max(axis=0) - B.vertices.min(axis=0))
    return c - factor * span, c + factor * span


# --- boundary graph -----------------------------------------------------------------


def test_split_boundary_graph():
    cells = split_cells()
    G = boundary_graph(SQUARE, cells)
    assert G.n == 2
    assert {tuple(np.round(v, 12)) for v in G.vertices} == {(0.5, 0.0), (0.5, 1.0)}
    assert sorted(G.owners) == [0, 1]


def test_single_cell_has_no_vertices():
    G = boundary_graph(SQUARE, body_cells([HPolyhedron.whole_space(2)]))
    assert G.n == 0 and G.sole_owner == 0
    V = extend_partition(SQUARE, body_cells([HPolyhedron.whole_space(2)]))
    assert V.cells[0].n_rows == 0


def test_pinwheel_boundary_graph():
    inst = pinwheel_instance()
    G = boundary_graph(inst.polygon, inst.cells)
    assert G.n == 4
    assert 4 not in G.owners  # the central square touches no boundary arc
    assert sorted(G.owners) == [0, 1, 2, 3]


def test_gap_is_inconsistent():
    cells = body_cells([HPolyhedron([[1, 0]], [0.4]), HPolyhedron([[-1, 0]], [-0.5])])
    with pytest.raises(InconsistentPartitionError):
        boundary_graph(SQUARE, cells)


def test_overlap_is_inconsistent():
    cells = body_cells([HPolyhedron([[1, 0]], [0.6]), HPolyhedron([[-1, 0]], [-0.4])])
    with pytest.raises(InconsistentPartitionError):
        build_extension(SQUARE, cells)


# --- rays ---------------------------------------------------------------------------


def _rays(cells):
    polys = cell_polygons(SQUARE, cells)
    G = boundary_graph(SQUARE, cells, polys)
    return G, initial_rays(SQUARE, G, polys)


def test_split_rays_are_vertical():
    G, R = _rays(split_cells())
    for o, d in zip(R.origins, R.directions):
        expected = [0.0, -1.0] if o[1] < 0.5 else [0.0, 1.0]
        assert np.allclose(d, expected)
    assert crossing_free(R) and erase_rays(R, G.vertices).trims == ()


def test_diagonal_rays_extend_diagonal():
    cells = body_cells([HPolyhedron([[1, -1]], [0.0]), HPolyhedron([[-1, 1]], [0.0])])
    G, R = _rays(cells)
    s = 1 / np.sqrt(2)
    for o, d in zip(R.origins, R.directions):
        assert np.allclose(d, [-s, -s] if o[0] < 0.5 else [s, s])


def test_pinwheel_rays_extend_cuts():
    inst = pinwheel_instance()
    polys = cell_polygons(inst.polygon, inst.cells)
    G = boundary_graph(inst.polygon, inst.cells, polys)
    R = initial_rays(inst.polygon, G, polys)
    assert R.n == 4
    for o, d in zip(R.origins, R.directions):
        # each ray leaves the square perpendicular to the side it starts on
        out = np.where(np.isclose(o, 0.0), -1.0, np.where(np.isclose(o, 1.0), 1.0, 0.0))
        assert np.allclose(d, out)
    final = erase_rays(R, G.vertices)
    assert crossing_free(final)
    assert final.trims == ()


def test_rays_point_outward_with_certificates():
    for cells in (split_cells(), quadrant_cells(), fan_cells()):
        G, R = _rays(cells)
        for o, d in zip(R.origins, R.directions):
            assert not SQ.contains(o + 1e-3 * d, tol=0.0)
        assert all(a >= -1e-9 and b >= -1e-9 for a, b in R.certificates)


def test_three_pairwise_crossing_rays():
    O = np.array([[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    D = np.array([[1.0, -1.0], [0.0, -1.0], [-1.5, -1.0]])
    D /= np.linalg.norm(D, axis=1)[:, None]
    R = RaySystem(O, D, np.full(3, np.inf))
    assert not crossing_free(R)
    hull = np.array([[0.0, 0.0], [2.0, 0.0], [1.0, 1.0]])
    out = erase_rays(R, hull)
    assert crossing_free(out)
    assert 1 <= len(out.trims) <= 2
    # brute force: the crossing nearest to the hull is rays 1 and 2 at (1, -2/3)
    crossings = {(0, 1): (1.0, -1.0), (0, 2): (0.8, -0.8), (1, 2): (1.0, -2 / 3)}
    dist = {k: -v[1] for k, v in crossings.items()}
    nearest = min(dist, key=dist.get)
    assert set(out.trims[0][:2]) == set(nearest)
    assert np.allclose(out.trims[0][2], crossings[nearest])


def test_parallel_rays_untouched():
    R = RaySystem(np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([[0.0, -1.0], [0.0, -1.0]]),
                  np.full(2, np.inf))
    out = erase_rays(R, np.array([[0.0, 0.0], [1.0, 0.0]]))
    assert out.trims == () and np.all(np.isinf(out.lengths))


def test_fan_needs_one_trim():
    ext = build_extension(SQUARE, fan_cells())
    assert len(ext.final.trims) == 1
    assert np.allclose(ext.final.trims[0][2], [0.5, -0.5])
    assert crossing_free(ext.final)


def test_flat_cell_along_boundary_is_ignored():
    tri = PolygonV([[0, 0], [2, 0], [0, 2]])
    cells = restrict(CellSet([HPolyhedron([[0, 1]], [0.0]), HPolyhedron([[0, -1]], [0.0])]),
                     tri.to_hpolyhedron())
    assert cells.cells[0].empty_interior
    G = boundary_graph(tri, cells)
    assert G.n == 0 and G.sole_owner == 1


def test_corner_cut_of_triangle():
    tri = PolygonV([[0, 0], [2, 0], [0, 2]])
    cells = restrict(CellSet([HPolyhedron([[1, 1]], [1.0]), HPolyhedron([[-1, -1]], [-1.0])]),
                     tri.to_hpolyhedron())
    ext = build_extension(tri, cells)
    check_extension(tri, cells, ext.cells)
    assert ext.graph.n == 2 and ext.final.trims == ()


# --- extension -----------------------------------------------------------------------


def test_split_extension_is_two_halfplanes():
    V = extend_partition(SQUARE, split_cells())
    pts = np.array([[-5.0, 3.0], [7.0, -4.0], [0.49, 100.0], [0.51, -100.0]])
    assert V.index_of(pts).tolist() == [0, 1, 0, 1]
    for c in V.cells:
        assert not c.bounded


def test_quadrant_extension_matches_quadrants(rng):
    V = extend_partition(SQUARE, quadrant_cells())
    pts = rng.uniform(-10, 10, size=(2000, 2))
    expected = np.where(pts[:, 0] <= 0.5, np.where(pts[:, 1] <= 0.5, 0, 3),
                        np.where(pts[:, 1] <= 0.5, 1, 2))
    clear = np.min(np.abs(pts - 0.5), axis=1) > 1e-6
    assert np.array_equal(V.index_of(pts)[clear], expected[clear])


def test_pinwheel_extension():
    inst = pinwheel_instance()
    V = extend_partition(inst.polygon, inst.cells)
    assert V.k == 5
    assert V.cells[4].bounded
    assert V.cells[4].inner_radius == pytest.approx(1 / 6)
    assert all(not c.bounded for c in V.cells[:4])


def test_rotated_pinwheel_extension():
    inst = pinwheel_instance(half=0.2, angle=0.3)
    ext = build_extension(inst.polygon, inst.cells)
    check_extension(inst.polygon, inst.cells, ext.cells)
    assert ext.graph.n == 4 and crossing_free(ext.final)


def test_contract_violation_reports_point():
    cells = split_cells()
    wrong = CellSet([HPolyhedron([[1, 0]], [0.3]), HPolyhedron([[-1, 0]], [-0.3])])
    with pytest.raises(ExtensionContractError) as err:
        check_extension(SQUARE, cells, wrong)
    assert err.value.point is not None


def _random_instance(seed, k):
    rng = np.random.default_rng(seed)
    B = random_body(2, rng)
    poly = polygon_from_hrep(B)
    V = hierarchical_cells(_binary_cut_tree(B, k, rng))
    return poly, CellSet(restrict(V, B).cells, B)


@given(seed=st.integers(0, 100_000), k=st.integers(2, 9))
def test_random_partitions_extend(seed, k):
    poly, cells = _random_instance(seed, k)
    ext = build_extension(poly, cells)
    check_extension(poly, cells, ext.cells, n=2000, seed=seed)
    assert crossing_free(ext.final)
    box = box_around(poly)
    for c in ext.cells.cells:
        try:
            clipped = polygon_from_hrep(c, box)
        except EmptySetError:
            continue
        assert clipped.is_convex()


@given(seed=st.integers(0, 100_000))
def test_voronoi_partitions_extend(seed):
    rng = np.random.default_rng(seed)
    B = random_body(2, rng)
    poly = polygon_from_hrep(B)
    sites = rng.uniform(-0.5, 0.5, size=(int(rng.integers(2, 8)), 2))
    cells = CellSet(restrict(build_affine_cells(voronoi_functions(sites)), B).cells, B)
    nonempty = CellSet([c for c in cells.cells if not c.empty_interior], B)
    ext = build_extension(poly, nonempty)
    check_extension(poly, nonempty, ext.cells, n=2000, seed=seed)
