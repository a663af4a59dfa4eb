"""Affine partitions, hierarchical partitions and their flattening."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .geom import (EPS_GEO, AffineFunc, EmptySetError, GeometryError, HPolyhedron,
                   hausdorff_polygons, polygon_from_hrep)
from .lp import EPS_LP


@dataclass(frozen=True)
class AffineSpec:
    """Functions lambda_1..lambda_k; cell i is where lambda_i is minimal."""

    funcs: tuple

    def __post_init__(self):
        funcs = tuple(self.funcs)
        if not funcs:
            raise GeometryError("an affine partition needs at least one function")
        d = funcs[0].dim
        if any(f.dim != d for f in funcs):
            raise GeometryError("functions must share a dimension")
        object.__setattr__(self, "funcs", funcs)

    @property
    def k(self) -> int:
        return len(self.funcs)

    @property
    def dim(self) -> int:
        return self.funcs[0].dim

    def duplicates(self) -> list[tuple[int, int]]:
        out = []
        for i in range(self.k):
            for j in range(i + 1, self.k):
                if self.funcs[i] == self.funcs[j]:
                    out.append((i, j))
        return out

    def argmin(self, points) -> np.ndarray:
        P = np.atleast_2d(np.asarray(points, dtype=float))
        vals = np.column_stack([f(P) for f in self.funcs])
        return np.argmin(vals, axis=1)


@dataclass(frozen=True)
class CellSet:
    """Indexed cells; ``ambient`` is None for the whole space, else the body B."""

    cells: tuple
    ambient: HPolyhedron | None = None
    duplicates: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "cells", tuple(self.cells))

    @property
    def k(self) -> int:
        return len(self.cells)

    @property
    def dim(self) -> int:
        return self.cells[0].dim

    @property
    def empty_markers(self) -> tuple:
        return tuple(c.is_empty for c in self.cells)

    def membership(self, points, tol: float = EPS_GEO) -> np.ndarray:
        """(N, k) boolean matrix of cell membership."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        return np.column_stack([c.contains(P, tol) for c in self.cells])

    def index_of(self, points, tol: float = EPS_GEO) -> np.ndarray:
        """Index of the cell containing each point (deepest inside wins), -1 if none."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        viol = np.column_stack([c.violation(P) for c in self.cells])
        idx = np.argmin(viol, axis=1)
        idx[viol[np.arange(len(P)), idx] > tol] = -1
        return idx


def build_affine_cells(F: AffineSpec) -> CellSet:
    d = F.dim
    cells = []
    for i, fi in enumerate(F.funcs):
        A, b = [], []
        for j, fj in enumerate(F.funcs):
            if j == i:
                continue
            A.append(fi.gradient - fj.gradient)
            b.append(fj.offset - fi.offset)
        cells.append(HPolyhedron(np.array(A).reshape(-1, d), np.array(b), d))
    dups = tuple(F.duplicates())
    if dups:
        warnings.warn(f"duplicate affine functions {dups}: their cells coincide", stacklevel=2)
    return CellSet(cells, None, dups)


def voronoi_functions(sites, weights=None) -> AffineSpec:
    """lambda_i(x) = -2 p_i . x + |p_i|^2 - w_i (power diagram; w = 0 is Voronoi)."""
    S = np.atleast_2d(np.asarray(sites, dtype=float))
    w = np.zeros(len(S)) if weights is None else np.asarray(weights, dtype=float)
    return AffineSpec(tuple(AffineFunc(-2.0 * p, p @ p - wi) for p, wi in zip(S, w)))


def remove_function(F: AffineSpec, i: int) -> AffineSpec:
    if F.k < 2:
        raise GeometryError("cannot remove the only function")
    if not 0 <= i < F.k:
        raise IndexError(f"function index {i} out of range for k={F.k}")
    return AffineSpec(F.funcs[:i] + F.funcs[i + 1:])


def restrict(cells: CellSet, B: HPolyhedron) -> CellSet:
    return CellSet(tuple(c.intersect(B) for c in cells.cells), B, cells.duplicates)


# ---------------------------------------------------------------------------
# hierarchical partitions


@dataclass(frozen=True)
class TreeNode:
    func: AffineFunc
    children: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) == 1:
            raise GeometryError("internal tree vertices need at least two children")

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class PartitionTree:
    """Rooted tree with an affine function per vertex; leaves are the cells.

    Leaves are numbered in depth-first order.
    """

    root: TreeNode

    @property
    def dim(self) -> int:
        return self.root.func.dim

    def leaf_paths(self) -> list[list[TreeNode]]:
        out = []

        def walk(node, path):
            path = path + [node]
            if node.is_leaf:
                out.append(path)
            for ch in node.children:
                walk(ch, path)

        walk(self.root, [])
        return out

    @property
    def k(self) -> int:
        return len(self.leaf_paths())

    def depth(self) -> int:
        return max(len(p) for p in self.leaf_paths()) - 1

    def is_graded(self) -> bool:
        return len({len(p) for p in self.leaf_paths()}) == 1

    @classmethod
    def from_spec(cls, F: AffineSpec) -> "PartitionTree":
        return cls(TreeNode(AffineFunc.zero(F.dim), tuple(TreeNode(f) for f in F.funcs)))


def _sibling_rows(path):
    rows, bounds = [], []
    for parent, v in zip(path[:-1], path[1:]):
        for w in parent.children:
            if w is v:
                continue
            rows.append(v.func.gradient - w.func.gradient)
            bounds.append(w.func.offset - v.func.offset)
    return rows, bounds


def hierarchical_cells(T: PartitionTree) -> CellSet:
    """Leaf cell: lambda_v <= lambda_w for each ancestor v and each sibling w of v."""
    d = T.dim
    cells = []
    for path in T.leaf_paths():
        rows, bounds = _sibling_rows(path)
        cells.append(HPolyhedron(np.array(rows).reshape(-1, d), np.array(bounds), d))
    return CellSet(cells)


def flatten_tree(T: PartitionTree, eps: float = 1e-3) -> AffineSpec:
    """One function per leaf: sum_k eps^k lambda_{v_k} along the root-to-leaf chain."""
    if eps <= 0:
        raise GeometryError("eps must be positive")
    if not T.is_graded():
        raise GeometryError("flatten_tree needs a graded tree (all leaves at one depth)")
    depth = T.depth()
    if eps ** depth < EPS_LP:
        warnings.warn(f"eps^depth = {eps ** depth:.3g} is below the LP tolerance", stacklevel=2)
    funcs = []
    for path in T.leaf_paths():
        acc = AffineFunc.zero(T.dim)
        for level, node in enumerate(path):
            acc = acc + node.func.scaled(eps ** level)
        funcs.append(acc)
    return AffineSpec(tuple(funcs))


def hausdorff_cells(A: CellSet, Bc: CellSet, box) -> float:
    """Max over i of the Hausdorff distance between cell i of each set inside ``box`` (2D)."""
    if A.k != Bc.k:
        raise GeometryError(f"cell count mismatch: {A.k} vs {Bc.k}")
    worst = 0.0
    for P, Q in zip(A.cells, Bc.cells):
        try:
            pp = polygon_from_hrep(P, box)
        except EmptySetError:
            pp = None
        try:
            qq = polygon_from_hrep(Q, box)
        except EmptySetError:
            qq = None
        if pp is None and qq is None:
            continue
        if pp is None or qq is None:
            return np.inf
        worst = max(worst, hausdorff_polygons(pp, qq))
    return worst


def partition_defects(cells: CellSet, lo, hi, n: int = 10_000, seed: int = 0,
                      tol: float = EPS_GEO, region: HPolyhedron | None = None) -> dict:
    """Sampled cover/overlap check of a cell set inside the box ``[lo, hi]``.

    A point is uncovered if no cell contains it within ``tol``; it is an
    overlap if two cells contain it with slack larger than ``tol``.
    """
    rng = np.random.default_rng(seed)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    P = rng.uniform(lo, hi, size=(n, lo.size))
    if region is not None:
        P = P[region.contains(P, tol=-tol)]
    viol = np.column_stack([c.violation(P) for c in cells.cells])
    uncovered = int(np.sum(np.min(viol, axis=1) > tol))
    deep = np.sum(viol < -tol, axis=1)
    overlaps = int(np.sum(deep >= 2))
    return {"samples": int(len(P)), "uncovered": uncovered, "overlaps": overlaps}
