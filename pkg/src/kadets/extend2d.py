"""Extend a convex partition of a convex polygon to a convex partition of the plane.

The boundary of B is split into arcs owned by cells. From every arc
endpoint a ray is drawn out of B along the continuation of the adjacent
interior edges; crossing rays are then cut back one at a time, always at
the crossing nearest to the polygon spanned by the arc endpoints. Each
arc-owning cell is finally united with the exterior faces next to its arcs.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geom import (EPS_GEO, EmptySetError, GeometryError, HPolyhedron, PolygonV,
                   bounding_box, cross2, point_segment_distance, polygon_from_hrep)
from .partition import CellSet


class InconsistentPartitionError(GeometryError):
    """Cells leave a gap or overlap on the boundary of B."""


class DegenerateRayError(GeometryError):
    """No outward ray direction satisfies the convexity requirement."""


class ExtensionContractError(GeometryError):
    """The assembled extension fails a sampled contract check."""

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


@dataclass(frozen=True)
class BoundaryGraph:
    """Partition vertices a_1..a_n on the boundary of B, cyclically ordered.

    ``owners[i]`` is the cell owning the arc from ``vertices[i]`` to
    ``vertices[i+1]``. With a single owning cell ``vertices`` is empty and
    ``sole_owner`` names it.
    """

    vertices: np.ndarray
    params: np.ndarray
    owners: tuple
    sole_owner: int | None = None

    @property
    def n(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class RaySystem:
    origins: np.ndarray
    directions: np.ndarray
    lengths: np.ndarray
    trims: tuple = ()
    certificates: tuple = ()

    @property
    def n(self) -> int:
        return len(self.origins)

    def endpoint(self, i: int):
        if np.isinf(self.lengths[i]):
            return None
        return self.origins[i] + self.lengths[i] * self.directions[i]

    def is_full(self, i: int) -> bool:
        return bool(np.isinf(self.lengths[i]))


@dataclass(frozen=True)
class Extension:
    cells: CellSet
    graph: BoundaryGraph
    initial: RaySystem
    final: RaySystem
    faces: dict = field(default_factory=dict)


def _scale(B: PolygonV) -> float:
    return max(1.0, float(np.abs(B.vertices).max()))


def cell_polygons(B: PolygonV, cells: CellSet) -> list[PolygonV | None]:
    lo, hi = bounding_box(B.vertices, pad=0.1)
    out = []
    for c in cells.cells:
        if c.empty_interior:
            out.append(None)
            continue
        try:
            out.append(polygon_from_hrep(c, (lo, hi)))
        except EmptySetError:
            out.append(None)
    return out


def boundary_graph(B: PolygonV, cells: CellSet, polys=None) -> BoundaryGraph:
    """Arc ownership along the boundary of ``B`` and the points where it changes."""
    if polys is None:
        polys = cell_polygons(B, cells)
    V = B.vertices
    W = np.roll(V, -1, axis=0)
    lengths = np.linalg.norm(W - V, axis=1)
    offsets = np.concatenate([[0.0], np.cumsum(lengths)[:-1]])
    total = float(lengths.sum())
    tol = 1e-7 * _scale(B)
    pieces = []
    for idx, poly in enumerate(polys):
        if poly is None:
            continue
        for p, q in poly.edges:
            for e in range(len(V)):
                u = (W[e] - V[e]) / lengths[e]
                if abs(cross2(u, p - V[e])) > tol or abs(cross2(u, q - V[e])) > tol:
                    continue
                s0, s1 = (p - V[e]) @ u, (q - V[e]) @ u
                if s1 <= s0 + tol:
                    continue
                if s0 < -tol or s1 > lengths[e] + tol:
                    continue
                pieces.append((offsets[e] + max(s0, 0.0), offsets[e] + min(s1, lengths[e]), idx))
                break
    if not pieces:
        raise InconsistentPartitionError("no cell touches the boundary of B")
    pieces.sort()
    cursor = 0.0
    for s0, s1, idx in pieces:
        if s0 > cursor + tol:
            raise InconsistentPartitionError(f"gap on the boundary of B at parameter {cursor:.6g}")
        if s0 < cursor - tol:
            raise InconsistentPartitionError(f"overlap on the boundary of B at parameter {s0:.6g}")
        cursor = s1
    if abs(cursor - total) > tol:
        raise InconsistentPartitionError("boundary of B not fully covered")
    # merge runs of the same owner, cyclically
    runs = []
    for s0, s1, idx in pieces:
        if runs and runs[-1][2] == idx:
            runs[-1][1] = s1
        else:
            runs.append([s0, s1, idx])
    if len(runs) > 1 and runs[0][2] == runs[-1][2]:
        first = runs.pop(0)
        runs[-1][1] = first[1] + total
    if len(runs) == 1:
        return BoundaryGraph(np.zeros((0, 2)), np.zeros(0), (), runs[0][2])
    params = np.array([r[0] for r in runs])
    verts = np.array([_point_at(V, W, lengths, offsets, total, s) for s in params])
    return BoundaryGraph(verts, params, tuple(r[2] for r in runs))


def _point_at(V, W, lengths, offsets, total, s):
    s = s % total
    e = int(np.searchsorted(offsets, s, side="right") - 1)
    e = min(max(e, 0), len(V) - 1)
    t = (s - offsets[e]) / lengths[e]
    return V[e] + t * (W[e] - V[e])


def _vertex_index(poly: PolygonV, a, tol) -> int:
    d = np.linalg.norm(poly.vertices - a, axis=1)
    i = int(np.argmin(d))
    if d[i] > tol:
        raise InconsistentPartitionError("partition vertex is not a vertex of its cell")
    return i


def _outward_normals_at(B: PolygonV, a, tol):
    V = B.vertices
    W = np.roll(V, -1, axis=0)
    normals = []
    for p, q in zip(V, W):
        if point_segment_distance(a[None, :], p, q)[0] <= tol:
            e = q - p
            n = np.array([e[1], -e[0]])
            normals.append(n / np.linalg.norm(n))
    return normals


def initial_rays(B: PolygonV, G: BoundaryGraph, polys) -> RaySystem:
    """One outward ray per partition vertex, continuing the adjacent interior edges.

    With a single interior edge at a_i the ray is its extension; with a
    fan of edges it bisects the extensions of the two extreme ones. Each
    ray carries the local convexity certificate for both neighbouring cells.
    """
    n = G.n
    tol = 1e-7 * _scale(B)
    origins = G.vertices.copy()
    dirs = np.zeros((n, 2))
    certs = []
    for i in range(n):
        a = origins[i]
        prev_cell = polys[G.owners[i - 1]]
        next_cell = polys[G.owners[i]]
        ip = _vertex_index(prev_cell, a, tol)
        g_prev = prev_cell.vertices[(ip + 1) % len(prev_cell)] - a
        inx = _vertex_index(next_cell, a, tol)
        g_next = next_cell.vertices[inx - 1] - a
        u1 = -g_next / np.linalg.norm(g_next)
        u2 = -g_prev / np.linalg.norm(g_prev)
        if np.linalg.norm(u1 - u2) <= 1e-12:
            d = u1
        else:
            d = u1 + u2
            d = d / np.linalg.norm(d)
        normals = _outward_normals_at(B, a, tol)
        if not normals or max(n_ @ d for n_ in normals) <= 1e-9:
            raise DegenerateRayError(f"no outward ray at partition vertex {a.tolist()}")
        c_prev = float(cross2(g_prev / np.linalg.norm(g_prev), d))
        c_next = float(cross2(d, g_next / np.linalg.norm(g_next)))
        if c_prev < -1e-9 or c_next < -1e-9:
            raise DegenerateRayError(f"ray at {a.tolist()} breaks convexity of a neighbouring cell")
        dirs[i] = d
        certs.append((c_prev, c_next))
    return RaySystem(origins, dirs, np.full(n, np.inf), (), tuple(certs))


def _crossing(o1, d1, L1, o2, d2, L2, tol):
    den = cross2(d1, d2)
    if abs(den) <= 1e-12:
        return None
    w = o2 - o1
    s = cross2(w, d2) / den
    t = cross2(w, d1) / den
    if tol < s < L1 - tol and tol < t < L2 - tol:
        return s, t
    return None


def _distance_to_hull(points: np.ndarray, x) -> float:
    x = np.asarray(x, dtype=float)[None, :]
    if len(points) == 1:
        return float(np.linalg.norm(x - points[0]))
    if len(points) == 2:
        return float(point_segment_distance(x, points[0], points[1])[0])
    return float(PolygonV(points).distance(x)[0])


def erase_rays(R: RaySystem, hull_points: np.ndarray) -> RaySystem:
    """Cut rays back at transversal crossings, nearest crossing first.

    At each step the crossing closest to the hull of the ray origins is
    found (ties broken by the ray index pair) and the ray whose surviving
    segment would be shorter is cut there (ties: smaller index).
    """
    n = R.n
    lengths = R.lengths.copy()
    trims = []
    O, D = R.origins, R.directions
    tol = 1e-10 * max(1.0, float(np.abs(O).max()) if n else 1.0)
    for _ in range(n * n + 1):
        best = None
        for s in range(n):
            for t in range(s + 1, n):
                hit = _crossing(O[s], D[s], lengths[s], O[t], D[t], lengths[t], tol)
                if hit is None:
                    continue
                point = O[s] + hit[0] * D[s]
                key = (_distance_to_hull(hull_points, point), s, t)
                if best is None or key < best[0]:
                    best = (key, hit, point)
        if best is None:
            return RaySystem(O, D, lengths, tuple(trims), R.certificates)
        (_, s, t), (ls, lt), point = best
        cut = s if ls <= lt else t
        lengths[cut] = ls if cut == s else lt
        trims.append((cut, s if cut == t else t, tuple(point)))
    raise GeometryError("ray erasing did not terminate")


def crossing_free(R: RaySystem) -> bool:
    tol = 1e-10 * max(1.0, float(np.abs(R.origins).max()) if R.n else 1.0)
    for s in range(R.n):
        for t in range(s + 1, R.n):
            if _crossing(R.origins[s], R.directions[s], R.lengths[s],
                         R.origins[t], R.directions[t], R.lengths[t], tol):
                return False
    return True


# ---------------------------------------------------------------------------
# face tracing


def _pieces_at(R: RaySystem, p, tol):
    """(piece, param) for every piece passing through point p."""
    out = []
    for j in range(R.n):
        w = p - R.origins[j]
        if abs(cross2(R.directions[j], w)) > tol:
            continue
        tau = float(w @ R.directions[j])
        if -tol <= tau <= R.lengths[j] + tol:
            out.append((j, tau))
    return out


def _next_junction(R: RaySystem, i, tau, forward, tol):
    """Param of the next point along piece i where another piece touches it."""
    o, d, L = R.origins[i], R.directions[i], R.lengths[i]
    stops = []
    if forward and np.isfinite(L):
        stops.append(L)
    if not forward:
        stops.append(0.0)
    for j in range(R.n):
        if j == i:
            continue
        den = cross2(d, R.directions[j])
        if abs(den) <= 1e-12:
            continue
        w = R.origins[j] - o
        s = cross2(w, R.directions[j]) / den
        t = cross2(w, d) / den
        if -tol <= t <= R.lengths[j] + tol and -tol <= s <= L + tol:
            stops.append(s)
    if forward:
        ahead = [s for s in stops if s > tau + tol]
        return min(ahead) if ahead else None
    behind = [s for s in stops if s < tau - tol]
    return max(behind) if behind else None


def _walk(R: RaySystem, start: int, face_left: bool, tol, max_steps=None):
    """Follow a face boundary starting outward along ray ``start``.

    Returns (list of (point, direction) edges, end) where end is
    ('origin', k) when the walk reaches ray k's origin, or ('inf', None).
    """
    edges = []
    i, tau, forward = start, 0.0, True
    max_steps = max_steps or 4 * R.n + 4
    for _ in range(max_steps):
        d = R.directions[i] if forward else -R.directions[i]
        p0 = R.origins[i] + tau * R.directions[i]
        edges.append((p0, d))
        nxt = _next_junction(R, i, tau, forward, tol)
        if nxt is None:
            return edges, ("inf", None)
        p = R.origins[i] + nxt * R.directions[i]
        if not forward and nxt <= tol:
            return edges, ("origin", i)
        # candidate outgoing directions at p
        best = None
        for j, tj in _pieces_at(R, p, 1e3 * tol):
            for fwd in (True, False):
                if fwd and tj >= R.lengths[j] - tol:
                    continue
                if not fwd and tj <= tol:
                    continue
                w = R.directions[j] if fwd else -R.directions[j]
                if np.dot(w, -d) > 1 - 1e-12:
                    continue
                turn = np.arctan2(cross2(d, w), d @ w)
                key = turn if face_left else -turn
                if best is None or key > best[0]:
                    best = (key, j, tj, fwd)
        if best is None:
            raise GeometryError("face walk reached a dead end")
        _, i, tau, forward = best
    raise GeometryError("face walk did not close")


def _face_halfplanes(R: RaySystem, arc: int, tol):
    """Halfplanes bounding the exterior face next to arc ``arc``."""
    n = R.n
    rows, bounds = [], []

    def add(edges, face_left):
        for p, d in edges:
            normal = np.array([d[1], -d[0]]) if face_left else np.array([-d[1], d[0]])
            rows.append(normal)
            bounds.append(float(normal @ p))

    edges, end = _walk(R, arc, True, tol)
    add(edges, True)
    if end[0] == "origin":
        if end[1] != (arc + 1) % n:
            raise GeometryError("face walk closed at the wrong partition vertex")
        return rows, bounds
    edges2, end2 = _walk(R, (arc + 1) % n, False, tol)
    if end2[0] != "inf":
        raise GeometryError("unbounded face closed on one side only")
    add(edges2, False)
    return rows, bounds


def _interior_rows(poly: PolygonV, B: PolygonV, tol):
    """H-rep rows of the edges of ``poly`` that are not on the boundary of B."""
    Bh = B.to_hpolyhedron()
    rows, bounds = [], []
    for p, q in poly.edges:
        mid = 0.5 * (p + q)
        on_boundary = np.any(np.abs(Bh.A @ mid - Bh.b) <= tol) and \
            np.any((np.abs(Bh.A @ p - Bh.b) <= tol) & (np.abs(Bh.A @ q - Bh.b) <= tol))
        if on_boundary:
            continue
        e = q - p
        normal = np.array([e[1], -e[0]])
        normal /= np.linalg.norm(normal)
        rows.append(normal)
        bounds.append(float(normal @ p))
    return rows, bounds


def build_extension(B: PolygonV, cells: CellSet) -> Extension:
    polys = cell_polygons(B, cells)
    G = boundary_graph(B, cells, polys)
    tol = 1e-7 * _scale(B)
    k = cells.k
    if G.n == 0:
        out = [c for c in cells.cells]
        out[G.sole_owner] = HPolyhedron.whole_space(2)
        empty = RaySystem(np.zeros((0, 2)), np.zeros((0, 2)), np.zeros(0))
        return Extension(CellSet(out), G, empty, empty)
    R0 = initial_rays(B, G, polys)
    R = erase_rays(R0, G.vertices)
    faces: dict[int, list[int]] = {}
    for arc, owner in enumerate(G.owners):
        faces.setdefault(owner, []).append(arc)
    out = []
    for idx in range(k):
        if idx not in faces:
            out.append(cells.cells[idx])
            continue
        rows, bounds = _interior_rows(polys[idx], B, tol)
        for arc in faces[idx]:
            r, b = _face_halfplanes(R, arc, 1e-9 * _scale(B))
            rows += r
            bounds += b
        out.append(HPolyhedron(np.array(rows).reshape(-1, 2), np.array(bounds), 2))
    return Extension(CellSet(out), G, R0, R, faces)


def check_extension(B: PolygonV, cells: CellSet, extended: CellSet, n: int = 10_000,
                    seed: int = 0, tol: float = EPS_GEO) -> None:
    """Sampled extension contract; raises ``ExtensionContractError`` on failure.

    Inside B every sample gets the same cell index under both partitions;
    in a box ten times the diameter of B, samples outside B are covered
    exactly once (up to ``tol``).
    """
    rng = np.random.default_rng(seed)
    Bh = B.to_hpolyhedron()
    lo, hi = bounding_box(B.vertices)
    inside = rng.uniform(lo, hi, size=(4 * n, 2))
    inside = inside[Bh.contains(inside, tol=-tol)][:n]
    before = cells.index_of(inside, tol)
    after = extended.index_of(inside, tol)
    bad = np.flatnonzero(before != after)
    if bad.size:
        raise ExtensionContractError("extension changes a cell inside B", inside[bad[0]])
    centre = B.vertices.mean(axis=0)
    diam = float(np.max(np.linalg.norm(B.vertices[:, None] - B.vertices[None], axis=2)))
    half = 5.0 * diam
    outside = rng.uniform(centre - half, centre + half, size=(n, 2))
    outside = outside[~Bh.contains(outside, tol=tol)]
    viol = np.column_stack([c.violation(outside) for c in extended.cells])
    uncovered = np.flatnonzero(np.min(viol, axis=1) > tol * max(1.0, half))
    if uncovered.size:
        raise ExtensionContractError("extension leaves a point uncovered", outside[uncovered[0]])
    multi = np.flatnonzero(np.sum(viol < -tol * max(1.0, half), axis=1) >= 2)
    if multi.size:
        raise ExtensionContractError("extended cells overlap", outside[multi[0]])


def extend_partition(B: PolygonV, cells: CellSet, validate: bool = True,
                     samples: int = 10_000, seed: int = 0) -> CellSet:
    """Convex cells V_i of the plane with V_i & B = C_i."""
    ext = build_extension(B, cells)
    if validate:
        check_extension(B, cells, ext.cells, samples, seed)
    return ext.cells


__all__ = [
    "BoundaryGraph",
    "DegenerateRayError",
    "Extension",
    "ExtensionContractError",
    "InconsistentPartitionError",
    "RaySystem",
    "boundary_graph",
    "build_extension",
    "cell_polygons",
    "check_extension",
    "crossing_free",
    "erase_rays",
    "extend_partition",
    "initial_rays",
]
