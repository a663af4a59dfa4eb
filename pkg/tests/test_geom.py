import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kadets.geom import (EPS_GEO, AffineFunc, EmptySetError, GeometryError, Halfspace,
                         HPolyhedron, PolygonV, UnboundedError, chebyshev_center, clip,
                         empty_interior, hausdorff_polygons, polygon_from_hrep, prune_redundant,
                         support)
from kadets.lp import EPS_LP


def brute_vertices(P: HPolyhedron) -> np.ndarray:
    """All feasible intersections of d rows: an enumeration oracle."""
    d = P.dim
    out = []
    for idx in itertools.combinations(range(P.n_rows), d):
        M = P.A[list(idx)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        x = np.linalg.solve(M, P.b[list(idx)])
        if np.all(P.A @ x <= P.b + 1e-9):
            out.append(x)
    return np.array(out)


def random_polytope(rng, d, m=None):
    m = m or 2 * d + 4
    while True:
        U = rng.normal(size=(m, d))
        U /= np.linalg.norm(U, axis=1)[:, None]
        P = HPolyhedron(U, rng.uniform(0.5, 1.5, m), d)
        if P.bounded:
            return P


# --- support -----------------------------------------------------------------


def test_support_square_axis():
    assert support(HPolyhedron.box([-1, -1], [1, 1]), [1, 0]) == pytest.approx(1.0)


def test_support_square_diagonal():
    assert support(HPolyhedron.box([-1, -1], [1, 1]), [1, 1]) == pytest.approx(2.0)


def test_support_triangle_matches_vertex_enumeration():
    T = HPolyhedron([[-1, 0], [0, -1], [1, 1]], [0, 0, 1])
    assert support(T, [1, 1]) == pytest.approx(1.0)
    V = np.array([[0, 0], [1, 0], [0, 1]])
    assert support(T, [1, 1]) == pytest.approx(np.max(V @ [1, 1]))


def test_support_unbounded_and_empty():
    half = HPolyhedron([[1.0, 0.0]], [0.0])
    with pytest.raises(UnboundedError):
        support(half, [0, 1])
    assert support(half, [0, 1], allow_unbounded=True) == np.inf
    with pytest.raises(EmptySetError):
        support(HPolyhedron([[1.0], [-1.0]], [-1.0, -1.0]), [1.0])


@pytest.mark.parametrize("d", [2, 3, 4])
def test_support_matches_enumerated_vertices(d):
    rng = np.random.default_rng(d)
    P = random_polytope(rng, d)
    V = brute_vertices(P)
    for u in rng.normal(size=(10, d)):
        assert support(P, u) == pytest.approx(np.max(V @ u), abs=1e-9)
        assert P.support_values(u[None, :])[0] == pytest.approx(np.max(V @ u), abs=1e-9)


@given(seed=st.integers(0, 10_000), alpha=st.floats(0.01, 100.0))
def test_support_positive_homogeneity(seed, alpha):
    rng = np.random.default_rng(seed)
    P = random_polytope(rng, 2 + seed % 3)
    u = rng.normal(size=P.dim)
    assert support(P, alpha * u) == pytest.approx(alpha * support(P, u), rel=1e-9, abs=EPS_LP)


@given(seed=st.integers(0, 10_000))
def test_support_width_nonnegative(seed):
    rng = np.random.default_rng(seed)
    P = random_polytope(rng, 2 + seed % 3)
    u = rng.normal(size=P.dim)
    assert support(P, u) + support(P, -u) > 0


def test_width_zero_for_degenerate_direction():
    seg = HPolyhedron([[0, 1], [0, -1], [1, 0], [-1, 0]], [0, 0, 1, 1])
    assert support(seg, [0, 1]) + support(seg, [0, -1]) == pytest.approx(0.0, abs=EPS_LP)


# --- rows, flags --------------------------------------------------------------


def test_rows_are_normalized():
    P = HPolyhedron([[3.0, 4.0]], [10.0])
    assert np.allclose(P.A, [[0.6, 0.8]]) and P.b[0] == pytest.approx(2.0)


def test_zero_rows():
    assert HPolyhedron([[0.0, 0.0]], [1.0]).n_rows == 0
    assert HPolyhedron([[0.0, 0.0]], [-1.0]).is_empty


def test_nonfinite_data_rejected():
    with pytest.raises(GeometryError):
        HPolyhedron([[np.inf, 0.0]], [1.0])


def test_empty_interior_examples():
    assert empty_interior(HPolyhedron([[1, 0], [-1, 0]], [0, 0]))
    assert not empty_interior(HPolyhedron.box([0, 0], [1, 1]))
    empty = HPolyhedron([[1, 0], [-1, 0]], [-1, -1])
    assert empty_interior(empty) and empty.is_empty


def test_boundedness_flags():
    assert HPolyhedron.box([0, 0, 0], [1, 1, 1]).bounded
    assert not HPolyhedron([[1, 0], [-1, 0], [0, 1]], [1, 1, 1]).bounded
    assert not HPolyhedron.whole_space(3).bounded


def test_box_vertices_3d():
    V = HPolyhedron.box([0, 0, 0], [1, 1, 1]).vertices
    assert len(V) == 8
    assert {tuple(v) for v in np.round(V, 9)} == set(itertools.product([0.0, 1.0], repeat=3))


def test_affine_func_algebra():
    f = AffineFunc([1.0, 2.0], 3.0)
    g = AffineFunc([0.0, -1.0], 1.0)
    assert (f + g)(np.array([1.0, 1.0])) == pytest.approx(f([1.0, 1.0]) + g([1.0, 1.0]))
    assert f.scaled(2.0)([1.0, 0.0]) == pytest.approx(8.0)
    assert f == AffineFunc([1.0, 2.0], 3.0) and hash(f) == hash(AffineFunc([1.0, 2.0], 3.0))


def test_halfspace_normalization():
    h = Halfspace([0.0, 2.0], 4.0).normalized()
    assert np.allclose(h.normal, [0, 1]) and h.bound == pytest.approx(2.0)


# --- clip ------------------------------------------------------------------------


def test_clip_halves_square(unit_square):
    P = clip(unit_square, Halfspace([1.0, 0.0], 0.5))
    assert support(P, [1, 0]) == pytest.approx(0.5)
    assert P.n_rows == 4


def test_clip_whole_space_row(unit_square):
    assert clip(unit_square, Halfspace([0.0, 0.0], 1.0)) is unit_square


def test_clip_redundant_row_keeps_row_count(unit_square):
    P = clip(unit_square, Halfspace([1.0, 0.0], 2.0))
    assert P.n_rows == 4
    assert polygon_from_hrep(P).area == pytest.approx(1.0)


def test_prune_keeps_set(rng):
    P = random_polytope(rng, 2, 12)
    Q = prune_redundant(P)
    pts = rng.uniform(-2, 2, size=(4000, 2))
    assert np.array_equal(P.contains(pts, 0.0), Q.contains(pts, 0.0))


@given(seed=st.integers(0, 10_000))
def test_clip_commutes(seed):
    rng = np.random.default_rng(seed)
    P = random_polytope(rng, 2)
    h1 = Halfspace(rng.normal(size=2), rng.normal(scale=0.3))
    h2 = Halfspace(rng.normal(size=2), rng.normal(scale=0.3))
    a, b = clip(clip(P, h1), h2), clip(clip(P, h2), h1)
    pts = rng.uniform(-2, 2, size=(2000, 2))
    # disagreement only within tolerance of a boundary
    diff = a.contains(pts, 0.0) != b.contains(pts, 0.0)
    near = np.minimum(np.abs(a.violation(pts)), np.abs(b.violation(pts))) <= EPS_GEO
    assert np.all(~diff | near)


# --- polygons ------------------------------------------------------------------


def test_halfplane_in_box():
    poly = polygon_from_hrep(HPolyhedron([[0.0, 1.0]], [0.0]), ([-1, -1], [1, 1]))
    assert poly.area == pytest.approx(2.0)
    lo, hi = poly.vertices.min(axis=0), poly.vertices.max(axis=0)
    assert np.allclose(lo, [-1, -1]) and np.allclose(hi, [1, 0])
    assert any(poly.truncated)


def test_square_inside_larger_box(unit_square):
    poly = polygon_from_hrep(unit_square, ([-5, -5], [5, 5]))
    assert poly.area == pytest.approx(1.0)
    assert not any(poly.truncated)
    assert poly.is_convex()


def test_voronoi_cell_clipped():
    # cell of (0,0) against (1,0): x <= 1/2
    cell = HPolyhedron([[2.0, 0.0]], [1.0])
    poly = polygon_from_hrep(cell, ([-2, -2], [2, 2]))
    assert poly.area == pytest.approx(2.5 * 4)
    assert poly.vertices[:, 0].max() == pytest.approx(0.5)


def test_polygon_from_empty_raises():
    with pytest.raises(EmptySetError):
        polygon_from_hrep(HPolyhedron([[1, 0]], [-5.0]), ([-1, -1], [1, 1]))


@given(seed=st.integers(0, 10_000))
def test_polygon_round_trip(seed):
    rng = np.random.default_rng(seed)
    P = random_polytope(rng, 2)
    poly = polygon_from_hrep(P)
    assert poly.is_convex()
    back = polygon_from_hrep(poly.to_hpolyhedron())
    assert hausdorff_polygons(poly, back) <= EPS_GEO


def test_polygon_vertices_match_enumeration(rng):
    P = random_polytope(rng, 2)
    V = brute_vertices(P)
    W = polygon_from_hrep(P).vertices
    d = np.linalg.norm(V[:, None] - W[None], axis=2)
    assert d.min(axis=1).max() < 1e-9 and d.min(axis=0).max() < 1e-9


def test_hausdorff_matches_dense_sampling(rng):
    P = polygon_from_hrep(random_polytope(rng, 2))
    Q = polygon_from_hrep(random_polytope(rng, 2))
    exact = hausdorff_polygons(P, Q)
    sp, sq = P.boundary_samples(400), Q.boundary_samples(400)
    # the Hausdorff distance of convex sets is attained on the boundary
    brute = max(Q.distance(sp).max(), P.distance(sq).max())
    assert brute <= exact + 1e-12
    assert exact - brute < 0.01


def test_hausdorff_shifted_squares():
    a = PolygonV([[0, 0], [1, 0], [1, 1], [0, 1]])
    b = PolygonV([[0.1, 0], [1.1, 0], [1.1, 1], [0.1, 1]])
    assert hausdorff_polygons(a, b) == pytest.approx(0.1)


def test_chebyshev_center(unit_square):
    c, r = chebyshev_center(unit_square)
    assert np.allclose(c, [0.5, 0.5]) and r == pytest.approx(0.5)
