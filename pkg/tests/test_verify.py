import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kadets.geom import GeometryError, HPolyhedron, polygon_from_hrep
from kadets.lp import EPS_LP
from kadets.partition import CellSet, build_affine_cells, restrict, voronoi_functions
from kadets.verify import (KernelBugError, boundary_points, gen_instance, kadets_sum,
                           random_body, region_polygon, sample_polygon, slab_instance,
                           sweep_translation, sweep_value, translated_cells,
                           translation_region_2d, verify_instance)


def halfplane_pair():
    return build_affine_cells(voronoi_functions([[0.0, 0.5], [1.0, 0.5]]))


@pytest.mark.parametrize("k", [2, 5, 10])
def test_slab_equality(k):
    inst = slab_instance(k)
    rep = kadets_sum(inst.body, inst.cells)
    assert [c.h for c in rep.cells] == pytest.approx([1 / k] * k, abs=1e-12)
    assert abs(rep.margin) <= 1e-9


def test_uneven_slabs():
    w = np.array([0.1, 0.2, 0.3, 0.4])
    inst = slab_instance(4, w)
    rep = kadets_sum(inst.body, inst.cells)
    assert [c.h for c in rep.cells] == pytest.approx(w, abs=1e-12)
    assert abs(rep.margin) <= 1e-9


def test_single_cell_total_one(rng):
    B = random_body(3, rng)
    rep = kadets_sum(B, restrict(CellSet((HPolyhedron.whole_space(3),)), B))
    assert rep.total == pytest.approx(1.0, abs=1e-9)


def test_voronoi_in_random_hexagon(rng):
    for _ in range(10):
        B = random_body(2, rng, n_dirs=6)
        sites = rng.uniform(-0.5, 0.5, size=(5, 2))
        rep = kadets_sum(B, restrict(build_affine_cells(voronoi_functions(sites)), B))
        assert rep.margin >= -1e-7


def test_empty_cells_contribute_zero(unit_square):
    cells = CellSet((unit_square, HPolyhedron.box([3, 3], [4, 4]).intersect(unit_square)))
    rep = kadets_sum(unit_square, cells)
    assert rep.cells[1].h == -np.inf
    assert rep.total == pytest.approx(1.0)


def test_unbounded_cell_is_a_kernel_bug(unit_square):
    with pytest.raises(KernelBugError):
        kadets_sum(unit_square, CellSet((HPolyhedron.whole_space(2),)))


def test_report_serializes(unit_square):
    d = kadets_sum(unit_square, restrict(halfplane_pair(), unit_square), {"kind": "x"}).to_dict()
    assert d["total"] == pytest.approx(1.0) and d["meta"] == {"kind": "x"}
    assert d["cells"][0]["status"] == "finite"


# --- sweep -------------------------------------------------------------------------


def test_sweep_at_zero_equals_sum(rng):
    B = random_body(2, rng)
    V = build_affine_cells(voronoi_functions(rng.uniform(-0.5, 0.5, size=(4, 2))))
    value, _ = sweep_value(B, V, np.zeros(2))
    assert value == pytest.approx(kadets_sum(B, restrict(V, B)).total, abs=1e-12)


def test_sweep_halfplane_pair(unit_square):
    res = sweep_translation(unit_square, halfplane_pair(), [0, 0], [1, 0], -1.0, 1.0, 201)
    s = res.ys[:, 0]
    inner = np.abs(s) < 0.5 - 1e-9
    assert np.allclose(res.values[inner], 1.0, atol=1e-12)
    # outside the strip one cell is empty
    assert np.all(res.values[np.abs(s) > 0.5 + 1e-9] == -np.inf)
    ev = sorted(res.vanish_events)
    assert len(ev) == 2
    for y, _ in ev:
        assert abs(abs(y[0]) - 0.5) <= 0.01 + 1e-12
    assert {i for _, i in ev} == {0, 1}


@given(seed=st.integers(0, 10_000))
def test_sweep_residuals_concave(seed):
    rng = np.random.default_rng(seed)
    B = random_body(2, rng)
    V = build_affine_cells(voronoi_functions(rng.uniform(-0.5, 0.5, size=(4, 2))))
    u = rng.normal(size=2)
    res = sweep_translation(B, V, rng.normal(scale=0.1, size=2), u / np.linalg.norm(u),
                            -1.0, 1.0, 101)
    assert res.min_residual >= -1e-9
    finite = np.isfinite(res.values)
    assert np.all(res.values[finite] >= 1 - 1e-7)


# --- translation region --------------------------------------------------------------


def test_single_cell_region_is_plane(unit_square):
    reg = translation_region_2d(unit_square, CellSet((HPolyhedron.whole_space(2),)))
    assert reg.Y.n_rows == 0 and not reg.bounded


def test_halfplane_pair_region_is_strip(unit_square):
    reg = translation_region_2d(unit_square, halfplane_pair())
    Y = reg.Y
    assert Y.contains([0.49, 100.0]) and Y.contains([-0.49, -50.0])
    assert not Y.contains([0.51, 0.0]) and not Y.contains([-0.51, 0.0])
    assert not reg.bounded


def test_polygon_body_accepted(unit_square):
    reg = translation_region_2d(polygon_from_hrep(unit_square), halfplane_pair())
    assert reg.Y.contains([0.0, 0.0])


def _instance(seed, k=4):
    rng = np.random.default_rng(seed)
    B = random_body(2, rng)
    V = build_affine_cells(voronoi_functions(rng.uniform(-0.5, 0.5, size=(k, 2))))
    return B, V


@given(seed=st.integers(0, 10_000))
def test_region_matches_nonempty_oracle(seed):
    B, V = _instance(seed)
    Y = translation_region_2d(B, V).Y
    rng = np.random.default_rng(seed)
    for y in rng.uniform(-2, 2, size=(40, 2)):
        cells = translated_cells(B, V, y)
        all_nonempty = all(not c.is_empty for c in cells)
        slack = np.min(Y.b - Y.A @ y)
        if abs(slack) > 1e-7:
            assert all_nonempty == (slack > 0)


@given(seed=st.integers(0, 10_000))
def test_origin_in_region_and_boundary_vanishes(seed):
    B, V = _instance(seed)
    if any(c.is_empty for c in restrict(V, B).cells):
        return
    reg = translation_region_2d(B, V)
    assert reg.bounded
    assert reg.Y.contains(np.zeros(2))
    box = (np.full(2, -10.0), np.full(2, 10.0))
    for y in boundary_points(reg, box, per_edge=3):
        assert any(c.empty_interior for c in translated_cells(B, V, y))


def test_interior_samples_keep_the_bound():
    B, V = _instance(5)
    reg = translation_region_2d(B, V)
    pts = sample_polygon(region_polygon(reg, (np.full(2, -10.0), np.full(2, 10.0))), 30,
                         np.random.default_rng(0))
    for y in pts:
        assert sweep_value(B, V, y)[0] >= 1 - 1e-6


# --- generators ---------------------------------------------------------------------


def test_generation_is_deterministic():
    a = gen_instance("voronoi", 7, 5, 2)
    b = gen_instance("voronoi", 7, 5, 2)
    for x, y in zip(a.cells.cells, b.cells.cells):
        assert np.array_equal(x.A, y.A) and np.array_equal(x.b, y.b)
    body, cells = a
    assert cells.k == 5 and body.dim == 2


def test_fixture_is_pinwheel():
    inst = gen_instance("fixture", None)
    assert inst.cells.k == 5
    areas = [polygon_from_hrep(c).area for c in inst.cells.cells]
    assert areas[:4] == pytest.approx([2 / 9] * 4)
    assert areas[4] == pytest.approx(1 / 9)


def test_hierarchical_3d_binary_tree():
    inst = gen_instance("hierarchical", 3, 8, 3)
    assert inst.d == 3 and inst.cells.k == 8 and inst.tree.k == 8
    assert all(len(n.children) in (0, 2) for path in inst.tree.leaf_paths() for n in path)


def test_extended2d_instance_cells_match_extension():
    inst = gen_instance("extended2d", 4, 6, 2)
    assert inst.space.k == 6
    assert kadets_sum(inst.body, inst.cells).margin >= -1e-6


def test_generator_errors():
    with pytest.raises(ValueError):
        gen_instance("nope", 0)
    with pytest.raises(ValueError):
        gen_instance("extended2d", 0, 4, 3)
    with pytest.raises(GeometryError):
        random_body(2, np.random.default_rng(0), tries=0)


@pytest.mark.parametrize("kind", ["affine", "voronoi", "hierarchical", "extended2d"])
def test_verify_instance_record(kind):
    rec = verify_instance(kind, 11, 6, 2)
    assert rec["passed"] and rec["margin"] >= -rec["tolerance"]
    assert len(rec["h"]) == 6


def test_whole_plane_region_has_no_boundary(unit_square):
    V = CellSet([HPolyhedron(np.zeros((0, 2)), np.zeros(0), 2)])
    reg = translation_region_2d(unit_square, V)
    assert not reg.bounded
    assert boundary_points(reg, (np.full(2, -5.0), np.full(2, 5.0))).shape == (0, 2)
