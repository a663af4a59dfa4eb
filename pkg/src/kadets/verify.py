"""Inradius-sum checks for partitions, translation sweeps and random instances."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .extend2d import build_extension, check_extension
from .geom import (EPS_GEO, AffineFunc, EmptySetError, GeometryError, HPolyhedron, PolygonV,
                   bounding_box, chebyshev_center, polygon_from_hrep, support)
from .inradius import InradiusResult, InradiusStatus, _inradius_rows, check_body, relative_inradius
from .lp import EPS_LP
from .partition import (AffineSpec, CellSet, PartitionTree, TreeNode, build_affine_cells,
                        hierarchical_cells, restrict, voronoi_functions)

KINDS = ("affine", "voronoi", "hierarchical", "extended2d", "fixture")

# margin tolerances for the inductive families and for routed 2D partitions
TOL_INDUCTIVE = 1e-7
TOL_EXTENDED = 1e-6


class KernelBugError(RuntimeError):
    """A cell inside a bounded body reported an infinite inradius."""


@dataclass(frozen=True)
class KadetsReport:
    cells: tuple
    total: float
    margin: float
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "cells": [
                {"h": c.h, "witness": None if c.witness is None else c.witness.tolist(),
                 "status": c.status.value}
                for c in self.cells
            ],
            "total": self.total,
            "margin": self.margin,
            **({"meta": self.meta} if self.meta else {}),
        }


def kadets_sum(B: HPolyhedron, cells: CellSet, meta: dict | None = None) -> KadetsReport:
    """Relative inradius of each cell and the sum over non-empty cells."""
    check_body(B)
    results = []
    for i, C in enumerate(cells.cells):
        res = relative_inradius(B, C)
        if res.status is InradiusStatus.UNBOUNDED:
            raise KernelBugError(f"cell {i} has infinite relative inradius inside a bounded body")
        results.append(res)
    total = float(sum(r.h for r in results if r.status is InradiusStatus.FINITE))
    return KadetsReport(tuple(results), total, total - 1.0, dict(meta or {}))


# ---------------------------------------------------------------------------
# translation sweep


@dataclass(frozen=True)
class SweepResult:
    ys: np.ndarray
    values: np.ndarray
    residuals: np.ndarray
    vanish_events: tuple

    @property
    def min_residual(self) -> float:
        finite = self.residuals[np.isfinite(self.residuals)]
        return float(finite.min()) if finite.size else np.inf


def translated_cells(B: HPolyhedron, V: CellSet, y) -> list[HPolyhedron]:
    """C_i(y) = B & (V_i + y)."""
    y = np.asarray(y, dtype=float)
    return [HPolyhedron(np.vstack([c.A, B.A]), np.concatenate([c.b + c.A @ y, B.b]), B.dim)
            for c in V.cells]


def sweep_value(B: HPolyhedron, V: CellSet, y) -> tuple[float, list[bool]]:
    """r(y) = sum of r_B(C_i(y)), -inf as soon as one C_i(y) is empty."""
    cells = translated_cells(B, V, y)
    total = 0.0
    for c in cells:
        res = _inradius_rows(B, c.A, c.b)
        if res.status is InradiusStatus.EMPTY:
            total = -np.inf
        elif res.status is InradiusStatus.UNBOUNDED:
            raise KernelBugError("infinite inradius inside a bounded body")
        elif total > -np.inf:
            total += res.h
    return total, [c.empty_interior for c in cells]


def sweep_translation(B: HPolyhedron, V: CellSet, base, direction, s0: float, s1: float,
                      steps: int = 101) -> SweepResult:
    check_body(B)
    base = np.asarray(base, dtype=float)
    direction = np.asarray(direction, dtype=float)
    ss = np.linspace(s0, s1, steps)
    ys = base + ss[:, None] * direction
    values = np.empty(steps)
    flags = []
    for n, y in enumerate(ys):
        values[n], fl = sweep_value(B, V, y)
        flags.append(fl)
    residuals = np.full(steps, np.nan)
    for n in range(1, steps - 1):
        trio = values[n - 1:n + 2]
        if np.all(np.isfinite(trio)):
            residuals[n] = trio[1] - 0.5 * (trio[0] + trio[2])
    events = []
    for n in range(1, steps):
        for i, (a, b) in enumerate(zip(flags[n - 1], flags[n])):
            if a != b:
                events.append((tuple(ys[n].tolist()), i))
    return SweepResult(ys, values, residuals, tuple(events))


# ---------------------------------------------------------------------------
# region of admissible translations


@dataclass(frozen=True)
class TranslationRegion:
    Y: HPolyhedron

    @property
    def bounded(self) -> bool:
        return self.Y.bounded


def translation_region_2d(B, V: CellSet) -> TranslationRegion:
    """Y = intersection of the Minkowski sums B + (-V_i), by support-function addition."""
    Bh = B.to_hpolyhedron() if isinstance(B, PolygonV) else B
    if Bh.dim != 2:
        raise GeometryError("translation_region_2d is 2D only")
    rows, bounds = [], []
    for cell in V.cells:
        if cell.n_rows == 0:
            continue
        neg = HPolyhedron(-cell.A, cell.b, 2)
        if neg.is_empty:
            return TranslationRegion(HPolyhedron(np.array([[1.0, 0.0], [-1.0, 0.0]]),
                                                 np.array([-1.0, -1.0]), 2))
        normals = np.vstack([Bh.A, neg.A])
        for u in normals:
            s = support(neg, u, allow_unbounded=True)
            if np.isinf(s):
                continue
            rows.append(u)
            bounds.append(Bh.support_values(u[None, :])[0] + s)
    return TranslationRegion(HPolyhedron(np.array(rows).reshape(-1, 2), np.array(bounds), 2))


def region_polygon(region: TranslationRegion, box) -> PolygonV:
    return polygon_from_hrep(region.Y, box)


def sample_polygon(poly: PolygonV, n: int, rng) -> np.ndarray:
    """Uniform samples in a convex polygon via a triangle fan."""
    V = poly.vertices
    tris = [(V[0], V[i], V[i + 1]) for i in range(1, len(V) - 1)]
    areas = np.array([0.5 * abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
                      for a, b, c in tris])
    pick = rng.choice(len(tris), size=n, p=areas / areas.sum())
    u = rng.uniform(size=(n, 2))
    flip = u.sum(axis=1) > 1
    u[flip] = 1 - u[flip]
    out = np.empty((n, 2))
    for m, (t, (a, b)) in enumerate(zip(pick, u)):
        p0, p1, p2 = tris[t]
        out[m] = p0 + a * (p1 - p0) + b * (p2 - p0)
    return out


def boundary_points(region: TranslationRegion, box, per_edge: int = 8) -> np.ndarray:
    """Points on the genuine boundary of Y (box truncation edges excluded)."""
    Y = region.Y
    if Y.n_rows == 0:
        return np.zeros((0, 2))
    poly = region_polygon(region, box)
    pts = poly.boundary_samples(per_edge)
    active = np.min(np.abs(pts @ Y.A.T - Y.b), axis=1) <= 1e-9 * max(1.0, np.abs(pts).max())
    return pts[active]


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class Instance:
    """A body B with a partition of it.

    ``space`` is the partition of the whole space inducing ``cells`` (absent
    only when the partition was given directly as cells of B).
    """

    kind: str
    body: HPolyhedron
    cells: CellSet
    space: CellSet | None
    seed: int | None = None
    k: int = 0
    d: int = 0
    spec: AffineSpec | None = None
    tree: PartitionTree | None = None
    polygon: PolygonV | None = None

    def __iter__(self):
        yield self.body
        yield self.cells


def random_body(d: int, rng, n_dirs: int | None = None, tries: int = 100,
                max_radius: float = 4.0) -> HPolyhedron:
    """Random polytope from ``2d + 4`` random support directions around the origin.

    Bodies reaching farther than ``max_radius`` from the origin are redrawn;
    the ball of radius 1/2 about the origin is always inside.
    """
    n_dirs = n_dirs or 2 * d + 4
    for _ in range(tries):
        U = rng.normal(size=(n_dirs, d))
        U /= np.linalg.norm(U, axis=1)[:, None]
        b = rng.uniform(0.5, 1.5, size=n_dirs)
        B = HPolyhedron(U, b, d)
        if B.bounded and not B.empty_interior and np.abs(B.vertices).max() <= max_radius:
            return B
    raise GeometryError("could not draw a bounded random body")


def _points_in(P: HPolyhedron, n: int, rng, shrink: float = 1.0) -> np.ndarray:
    c, r = chebyshev_center(P)
    V = P.vertices
    out = []
    while len(out) < n:
        w = rng.dirichlet(np.ones(len(V)))
        x = w @ V
        out.append(c + shrink * (x - c))
    return np.array(out)


def _binary_cut_tree(B: HPolyhedron, k: int, rng, tries: int = 50) -> PartitionTree:
    """Random hierarchical partition by recursive hyperplane cuts of the fattest leaf."""
    d = B.dim
    cut = {}  # leaf path tuple -> (func_left, func_right)
    leaves = [()]

    def cell_of(path):
        rows, bounds = [], []
        for depth in range(len(path)):
            fl, fr = cut[path[:depth]]
            mine, other = (fl, fr) if path[depth] == 0 else (fr, fl)
            rows.append(mine.gradient - other.gradient)
            bounds.append(other.offset - mine.offset)
        if not rows:
            return B
        return HPolyhedron(np.vstack([np.array(rows), B.A]), np.concatenate([bounds, B.b]), d)

    while len(leaves) < k:
        scored = []
        for path in leaves:
            C = cell_of(path)
            scored.append((chebyshev_center(C)[1], path, C))
        scored.sort(key=lambda t: (-t[0], t[1]))
        radius, path, C = scored[0]
        centre, _ = chebyshev_center(C)
        for _ in range(tries):
            a = rng.normal(size=d)
            a /= np.linalg.norm(a)
            c = a @ centre + rng.uniform(-0.5, 0.5) * radius
            f = AffineFunc(a, -c)
            left = HPolyhedron(np.vstack([a, C.A]), np.append(c, C.b), d)
            right = HPolyhedron(np.vstack([-a, C.A]), np.append(-c, C.b), d)
            if not left.empty_interior and not right.empty_interior:
                break
        else:
            raise GeometryError("could not split a leaf")
        cut[path] = (f, f.scaled(-1.0))
        leaves.remove(path)
        leaves += [path + (0,), path + (1,)]
    return _tree_from_cuts(cut, d)


def _tree_from_cuts(cut: dict, d: int) -> PartitionTree:
    def node(path, func):
        if path not in cut:
            return TreeNode(func)
        fl, fr = cut[path]
        return TreeNode(func, (node(path + (0,), fl), node(path + (1,), fr)))

    return PartitionTree(node((), AffineFunc.zero(d)))


def slab_spec(widths) -> AffineSpec:
    """Affine functions whose cells are vertical slabs x_0 in [x_{i-1}, x_i] (2D)."""
    w = np.asarray(widths, dtype=float)
    cuts = np.cumsum(w)[:-1]
    funcs = []
    for i in range(len(w)):
        funcs.append(AffineFunc([-(i + 1.0), 0.0], float(np.sum(cuts[:i]))))
    return AffineSpec(tuple(funcs))


def slab_instance(k: int, widths=None) -> Instance:
    widths = np.full(k, 1.0 / k) if widths is None else np.asarray(widths, dtype=float)
    B = HPolyhedron.box([0.0, 0.0], [float(np.sum(widths)), 1.0])
    spec = slab_spec(widths)
    V = build_affine_cells(spec)
    return Instance("slab", B, restrict(V, B), V, None, k, 2, spec=spec,
                    polygon=polygon_from_hrep(B))


def pinwheel_instance(half: float = 1.0 / 6.0, angle: float = 0.0) -> Instance:
    """Unit square cut into a central square and four pinwheel blades.

    With the defaults the blades are congruent 1/3 x 2/3 rectangles; a
    nonzero ``angle`` rotates the central square and the blades pick up
    corners of the square.
    """
    c = np.array([0.5, 0.5])
    B = HPolyhedron.box([0.0, 0.0], [1.0, 1.0])
    angles = angle + np.pi / 4 + np.arange(4) * np.pi / 2
    Q = c + np.sqrt(2.0) * half * np.column_stack([np.cos(angles), np.sin(angles)])
    # inward-side halfplanes of the central square's edges
    normals, bounds = [], []
    for k in range(4):
        p, q = Q[k], Q[(k + 1) % 4]
        e = q - p
        n = np.array([e[1], -e[0]])
        n /= np.linalg.norm(n)
        normals.append(n)
        bounds.append(float(n @ p))
    cells = []
    for k in range(4):
        j = (k + 1) % 4
        A = np.vstack([-normals[j], normals[k], B.A])
        cells.append(HPolyhedron(A, np.concatenate([[-bounds[j], bounds[k]], B.b]), 2))
    cells.append(HPolyhedron(np.vstack([np.array(normals), B.A]), np.concatenate([bounds, B.b]), 2))
    return Instance("fixture", B, CellSet(cells, B), None, None, 5, 2, polygon=polygon_from_hrep(B))


def gen_instance(kind: str, seed: int | None = 0, k: int = 5, d: int = 2,
                 max_tries: int = 20) -> Instance:
    """Reproducible random instance of the given kind."""
    if kind not in KINDS:
        raise ValueError(f"unknown instance kind {kind!r}; expected one of {KINDS}")
    if kind == "fixture":
        return pinwheel_instance()
    if kind == "extended2d" and d != 2:
        raise ValueError("extended2d instances are two-dimensional")
    if k < 1:
        raise ValueError("k must be positive")
    rng = np.random.default_rng(seed)
    last_error = None
    for _ in range(max_tries):
        try:
            return _gen(kind, rng, seed, k, d)
        except GeometryError as exc:
            last_error = exc
    raise GeometryError(f"instance generation failed after {max_tries} tries: {last_error}")


def _gen(kind, rng, seed, k, d) -> Instance:
    B = random_body(d, rng)
    poly = polygon_from_hrep(B) if d == 2 else None
    if kind == "affine":
        pts = _points_in(B, k, rng)
        funcs = []
        for p in pts:
            a = rng.normal(size=d)
            funcs.append(AffineFunc(a, -a @ p + rng.normal(scale=0.1)))
        spec = AffineSpec(tuple(funcs))
        V = build_affine_cells(spec)
        return Instance(kind, B, restrict(V, B), V, seed, k, d, spec=spec, polygon=poly)
    if kind == "voronoi":
        spec = voronoi_functions(_points_in(B, k, rng))
        V = build_affine_cells(spec)
        return Instance(kind, B, restrict(V, B), V, seed, k, d, spec=spec, polygon=poly)
    tree = _binary_cut_tree(B, k, rng)
    V = hierarchical_cells(tree)
    if kind == "hierarchical":
        return Instance(kind, B, restrict(V, B), V, seed, k, d, tree=tree, polygon=poly)
    # extended2d: forget the hierarchical structure outside B and rebuild it by extension
    C = restrict(V, B)
    ext = build_extension(poly, CellSet(C.cells, B))
    check_extension(poly, C, ext.cells, seed=int(rng.integers(2**31)))
    return Instance(kind, B, restrict(ext.cells, B), ext.cells, seed, k, d, tree=tree, polygon=poly)


def verify_instance(kind: str, seed: int, k: int, d: int) -> dict:
    """Generate, sum and judge one instance; returns a JSON-ready record."""
    inst = gen_instance(kind, seed, k, d)
    rep = kadets_sum(inst.body, inst.cells)
    tol = TOL_EXTENDED if kind == "extended2d" else TOL_INDUCTIVE
    return {
        "kind": kind,
        "seed": seed,
        "k": inst.k,
        "d": inst.d,
        "h": [c.h for c in rep.cells],
        "total": rep.total,
        "margin": rep.margin,
        "tolerance": tol,
        "passed": bool(rep.margin >= -tol),
    }


__all__ = [
    "EPS_GEO",
    "EPS_LP",
    "Instance",
    "KINDS",
    "KadetsReport",
    "KernelBugError",
    "SweepResult",
    "TOL_EXTENDED",
    "TOL_INDUCTIVE",
    "TranslationRegion",
    "boundary_points",
    "gen_instance",
    "kadets_sum",
    "pinwheel_instance",
    "random_body",
    "region_polygon",
    "sample_polygon",
    "slab_instance",
    "slab_spec",
    "sweep_translation",
    "sweep_value",
    "translated_cells",
    "translation_region_2d",
    "verify_instance",
]
