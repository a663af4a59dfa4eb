import re

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from kadets.geom import GeometryError
from kadets.noneuclid.hyperbolic import (IDEAL_TRIANGLE_INRADIUS, HyperbolicRegion, Mobius,
                                         cover_defect, disk_region, distance, evaluate_cover,
                                         geodesic_normal, half_disk, hexagon_cover,
                                         hyperbolic_circle_euclid, hyperbolic_counterexample_search,
                                         hyperbolic_inradius, ideal_triangle, lift, minkowski,
                                         project, radius_to_euclid)
from kadets.svg import hyperbolic_svg


def test_lift_and_project_round_trip(rng):
    p = rng.uniform(-0.6, 0.6, size=(20, 2))
    X = lift(p)
    assert np.allclose(minkowski(X, X), -1.0)
    assert np.allclose(project(X), p)


def test_distance_from_origin():
    assert distance([0.5, 0.0], [0.0, 0.0]) == pytest.approx(2 * np.arctanh(0.5))


def test_geodesic_normal_vanishes_on_geodesic():
    p, q = np.array([0.3, 0.1]), np.array([-0.2, 0.5])
    N = geodesic_normal(p, q)
    assert minkowski(lift(p), N) == pytest.approx(0.0, abs=1e-12)
    assert minkowski(lift(q), N) == pytest.approx(0.0, abs=1e-12)
    assert minkowski(N, N) == pytest.approx(1.0)


@given(seed=st.integers(0, 10_000))
def test_mobius_is_an_isometry(seed):
    rng = np.random.default_rng(seed)
    m = Mobius.random(rng)
    p, q = rng.uniform(-0.6, 0.6, size=(2, 2))
    assert distance(m(p), m(q)) == pytest.approx(distance(p, q), rel=1e-9, abs=1e-12)


def test_disk_inradius_is_its_radius():
    r, c = hyperbolic_inradius(disk_region(1.7, (0.2, -0.1)))
    assert r == 1.7 and np.allclose(c, [0.2, -0.1])


def _bisect_half_disk(rho):
    """Point on the symmetry axis where the distances to the diameter and to the circle agree."""
    lo, hi = 0.0, radius_to_euclid(rho)
    for _ in range(200):
        y = 0.5 * (lo + hi)
        to_line = distance([0.0, y], [0.0, 0.0])  # the foot of the perpendicular is the origin
        to_circle = rho - distance([0.0, y], [0.0, 0.0])
        if to_line < to_circle:
            lo = y
        else:
            hi = y
    y = 0.5 * (lo + hi)
    return float(distance([0.0, y], [0.0, 0.0]))


@pytest.mark.parametrize("rho", [0.5, 2.0, 5.0])
def test_half_disk_against_bisection(rho):
    r, c = hyperbolic_inradius(half_disk(rho))
    assert r == pytest.approx(_bisect_half_disk(rho), abs=1e-7)
    assert r == pytest.approx(rho / 2, abs=1e-7)


def test_ideal_triangle_against_grid():
    R = ideal_triangle()
    r, c = hyperbolic_inradius(R)
    assert r == pytest.approx(IDEAL_TRIANGLE_INRADIUS, abs=1e-8)
    g = np.linspace(-0.5, 0.5, 401)
    P = np.array(np.meshgrid(g, g)).reshape(2, -1).T
    P = P[R.contains(P)]
    grid = R.depth(P).max()
    assert grid <= r + 1e-12 and r - grid < 1e-3


def _random_region(rng):
    rho = rng.uniform(0.5, 3.0)
    R = radius_to_euclid(rho)
    sides = []
    for _ in range(int(rng.integers(1, 4))):
        a = rng.uniform(0, 2 * np.pi)
        w = rng.uniform(0.5, 2.0)
        p = R * np.array([np.cos(a), np.sin(a)])
        q = R * np.array([np.cos(a + w), np.sin(a + w)])
        sides.append((p, q))
    return HyperbolicRegion(sides=sides, disks=[((0.0, 0.0), rho)])


@given(seed=st.integers(0, 10_000))
def test_mobius_invariance(seed):
    rng = np.random.default_rng(seed)
    Rg = _random_region(rng)
    m = Mobius.random(rng, 0.5)
    r0, _ = hyperbolic_inradius(Rg)
    r1, _ = hyperbolic_inradius(Rg.transformed(m))
    assert abs(r0 - r1) <= 1e-6


def test_inside_point_on_side_rejected():
    with pytest.raises(GeometryError):
        HyperbolicRegion(sides=[((-0.5, 0.0), (0.5, 0.0))], inside=(0.0, 0.0))


def test_circle_conversion():
    c, r = hyperbolic_circle_euclid([0.0, 0.0], 1.0)
    assert np.allclose(c, 0) and r == pytest.approx(np.tanh(0.5))
    c, r = hyperbolic_circle_euclid([0.5, 0.0], 0.3)
    left, right = c[0] - r, c[0] + r
    assert distance([left, 0], [0.5, 0]) == pytest.approx(0.3)
    assert distance([right, 0], [0.5, 0]) == pytest.approx(0.3)


# --- the two-set cover ----------------------------------------------------------------------


def test_hexagon_cover_covers_the_disk():
    for beta in (40.0, 60.0, 80.0):
        assert cover_defect(3.0, hexagon_cover(3.0, beta)) == 0


def test_hexagon_cover_rejects_bad_angle():
    with pytest.raises(GeometryError):
        hexagon_cover(2.0, 130.0)


def test_symmetric_configuration_has_equal_radii():
    cand = evaluate_cover(4.0, 60.0)
    assert cand.radii[0] == pytest.approx(cand.radii[1], abs=1e-8)


def test_small_disk_behaves_like_the_plane():
    res = hyperbolic_counterexample_search(0.1)
    assert res.margin < 0 and not res.success


def test_large_disk_counterexample():
    res = hyperbolic_counterexample_search(5.0)
    assert res.success
    assert res.margin > 10 * res.optimizer_tol
    assert all(res.best.center_excluded)
    assert all(r < 2.5 for r in res.best.radii)
    # value recorded from the default search grid
    assert res.margin == pytest.approx(0.28466, abs=1e-4)


def test_svg_structure():
    res = hyperbolic_counterexample_search(5.0, grid=[60.0])
    disks = [hyperbolic_circle_euclid(c, r) for c, r in zip(res.best.centers, res.best.radii)]
    svg = hyperbolic_svg(5.0, res.regions(), disks)
    assert len(re.findall(r"<path ", svg)) == 2
    assert len(re.findall(r"<circle [^>]*stroke-dasharray", svg)) == 2
    assert len(re.findall(r'<circle class="omega"', svg)) == 1
    assert len(re.findall(r"<circle ", svg)) == 3
