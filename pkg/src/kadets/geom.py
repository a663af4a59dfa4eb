"""Convex geometry kernel: affine functions, halfspace systems, 2D polygons."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .lp import EPS_LP, LpProblem, LpStatus, solve_lp

EPS_GEO = 1e-7


class GeometryError(ValueError):
    pass


class EmptySetError(GeometryError):
    pass


class UnboundedError(GeometryError):
    pass


def _vec(x) -> np.ndarray:
    v = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(v)):
        raise GeometryError("coordinates must be finite")
    return v


@dataclass(frozen=True)
class AffineFunc:
    """``x -> gradient . x + offset``."""

    gradient: np.ndarray
    offset: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "gradient", _vec(self.gradient))
        object.__setattr__(self, "offset", float(self.offset))

    @property
    def dim(self) -> int:
        return self.gradient.size

    def __call__(self, x):
        return np.asarray(x, dtype=float) @ self.gradient + self.offset

    def __add__(self, other: "AffineFunc") -> "AffineFunc":
        return AffineFunc(self.gradient + other.gradient, self.offset + other.offset)

    def scaled(self, s: float) -> "AffineFunc":
        return AffineFunc(s * self.gradient, s * self.offset)

    def __eq__(self, other):
        if not isinstance(other, AffineFunc):
            return NotImplemented
        return np.array_equal(self.gradient, other.gradient) and self.offset == other.offset

    def __hash__(self):
        return hash((self.gradient.tobytes(), self.offset))

    @classmethod
    def zero(cls, d: int) -> "AffineFunc":
        return cls(np.zeros(d), 0.0)


@dataclass(frozen=True)
class Halfspace:
    """The set ``{x : normal . x <= bound}``."""

    normal: np.ndarray
    bound: float

    def __post_init__(self):
        object.__setattr__(self, "normal", _vec(self.normal))
        object.__setattr__(self, "bound", float(self.bound))

    def normalized(self) -> "Halfspace":
        norm = np.linalg.norm(self.normal)
        if norm == 0.0:
            raise GeometryError("halfspace with zero normal")
        return Halfspace(self.normal / norm, self.bound / norm)

    def contains(self, x, tol: float = EPS_GEO):
        return np.asarray(x, dtype=float) @ self.normal <= self.bound + tol


def _normalize_rows(A: np.ndarray, b: np.ndarray, d: int):
    norms = np.linalg.norm(A, axis=1) if A.size else np.zeros(0)
    zero = norms <= 1e-14
    infeasible = bool(np.any(zero & (b < -EPS_LP)))
    keep = ~zero
    A = A[keep] / norms[keep, None]
    b = b[keep] / norms[keep]
    if infeasible:
        # canonical empty set: x_0 <= -1 and -x_0 <= -1
        e = np.zeros(d)
        e[0] = 1.0
        A = np.vstack([A, e, -e])
        b = np.concatenate([b, [-1.0, -1.0]])
    return A, b


class HPolyhedron:
    """Intersection of finitely many halfspaces ``A x <= b`` in R^d.

    Rows are stored with unit-length normals. The flags ``is_empty``,
    ``empty_interior`` and ``bounded`` are computed by LP at construction.
    An empty row list is the whole space.
    """

    __slots__ = ("A", "b", "dim", "is_empty", "empty_interior", "bounded",
                 "interior_point", "inner_radius", "__dict__")

    def __init__(self, A, b, dim: int | None = None):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float).ravel()
        if dim is None:
            if A.ndim != 2 or A.shape[0] == 0:
                raise GeometryError("dimension needed for an empty row list")
            dim = A.shape[1]
        A = A.reshape(-1, dim)
        if A.shape[0] != b.size:
            raise GeometryError("row count mismatch")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise GeometryError("halfspace data must be finite")
        A, b = _normalize_rows(A, b, dim)
        A.setflags(write=False)
        b.setflags(write=False)
        self.A = A
        self.b = b
        self.dim = dim
        self._compute_flags()

    def _compute_flags(self):
        m, d = self.A.shape
        if m == 0:
            self.is_empty = False
            self.empty_interior = False
            self.bounded = False
            self.interior_point = np.zeros(d)
            self.inner_radius = np.inf
            return
        # max s  s.t.  A x + s <= b,  s <= 1
        rows = np.hstack([self.A, np.ones((m, 1))])
        cap = np.zeros(d + 1)
        cap[-1] = 1.0
        obj = np.zeros(d + 1)
        obj[-1] = 1.0
        out = solve_lp(LpProblem.build(obj, np.vstack([rows, cap]), np.concatenate([self.b, [1.0]])))
        s = out.value
        self.interior_point = out.point[:d]
        self.inner_radius = s
        self.is_empty = s < -EPS_LP
        self.empty_interior = s <= EPS_GEO
        self.bounded = _recession_trivial(self.A)

    @classmethod
    def from_halfspaces(cls, halfspaces, dim: int | None = None) -> "HPolyhedron":
        hs = list(halfspaces)
        if not hs:
            if dim is None:
                raise GeometryError("dimension needed for an empty halfspace list")
            return cls(np.zeros((0, dim)), np.zeros(0), dim)
        return cls(np.array([h.normal for h in hs]), np.array([h.bound for h in hs]), dim)

    @classmethod
    def whole_space(cls, d: int) -> "HPolyhedron":
        return cls(np.zeros((0, d)), np.zeros(0), d)

    @classmethod
    def box(cls, lo, hi) -> "HPolyhedron":
        lo, hi = _vec(lo), _vec(hi)
        d = lo.size
        eye = np.eye(d)
        return cls(np.vstack([eye, -eye]), np.concatenate([hi, -lo]), d)

    @property
    def halfspaces(self) -> list[Halfspace]:
        return [Halfspace(a, c) for a, c in zip(self.A, self.b)]

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def contains(self, points, tol: float = EPS_GEO):
        """Membership of one point (bool) or an (N, d) array (bool array)."""
        P = np.asarray(points, dtype=float)
        single = P.ndim == 1
        P = np.atleast_2d(P)
        if self.n_rows == 0:
            res = np.ones(P.shape[0], dtype=bool)
        else:
            res = np.all(P @ self.A.T <= self.b + tol, axis=1)
        return bool(res[0]) if single else res

    def violation(self, points):
        """Largest constraint excess per point (<= 0 inside)."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        if self.n_rows == 0:
            return np.full(P.shape[0], -np.inf)
        return np.max(P @ self.A.T - self.b, axis=1)

    def translated(self, t) -> "HPolyhedron":
        t = _vec(t)
        return HPolyhedron(self.A, self.b + self.A @ t, self.dim)

    def scaled(self, s: float) -> "HPolyhedron":
        if s <= 0:
            raise GeometryError("scale must be positive")
        return HPolyhedron(self.A, self.b * s, self.dim)

    def negated(self) -> "HPolyhedron":
        return HPolyhedron(-self.A, self.b, self.dim)

    def intersect(self, other: "HPolyhedron") -> "HPolyhedron":
        if other.dim != self.dim:
            raise GeometryError("dimension mismatch")
        return HPolyhedron(np.vstack([self.A, other.A]), np.concatenate([self.b, other.b]), self.dim)

    @cached_property
    def vertices(self) -> np.ndarray:
        """Vertices of a bounded body (full-dimensional, nonempty)."""
        if not self.bounded or self.empty_interior:
            raise GeometryError("vertices need a bounded set with nonempty interior")
        if self.dim == 1:
            return np.array([[-support(self, [-1.0])], [support(self, [1.0])]])
        if self.dim == 2:
            return polygon_from_hrep(self).vertices
        from scipy.spatial import HalfspaceIntersection

        hs = HalfspaceIntersection(np.hstack([self.A, -self.b[:, None]]), self.interior_point)
        return np.unique(np.round(hs.intersections, 12), axis=0)

    def support_values(self, U) -> np.ndarray:
        """``support(self, u)`` for each row ``u`` of ``U``."""
        U = np.atleast_2d(np.asarray(U, dtype=float))
        if self.bounded and not self.empty_interior:
            return np.max(U @ self.vertices.T, axis=1)
        return np.array([support(self, u) for u in U])

    def __repr__(self):
        return f"HPolyhedron(dim={self.dim}, rows={self.n_rows})"


def _recession_trivial(A: np.ndarray) -> bool:
    """True iff ``{d : A d <= 0} = {0}``."""
    m, d = A.shape
    if m <= d or np.linalg.matrix_rank(A, tol=1e-10) < d:
        return False
    # max -sum(A d) s.t. A d <= 0, |d_k| <= 1; positive iff a nonzero recession direction exists
    obj = -A.sum(axis=0)
    eye = np.eye(d)
    out = solve_lp(LpProblem.build(obj, np.vstack([A, eye, -eye]),
                                   np.concatenate([np.zeros(m), np.ones(2 * d)])))
    return out.value <= EPS_LP


def support(P: HPolyhedron, u, allow_unbounded: bool = False) -> float:
    """``max u . x`` over ``P``.

    Raises ``EmptySetError`` for empty ``P`` and ``UnboundedError`` when the
    maximum is infinite, unless ``allow_unbounded`` (then returns ``inf``).
    """
    u = _vec(u)
    if P.is_empty:
        raise EmptySetError("support of an empty set")
    if np.all(u == 0.0):
        return 0.0
    out = solve_lp(LpProblem.build(u, P.A, P.b))
    if out.status is LpStatus.UNBOUNDED:
        if allow_unbounded:
            return np.inf
        raise UnboundedError("support is infinite in this direction")
    if out.status is LpStatus.INFEASIBLE:
        raise EmptySetError("support of an empty set")
    return out.value


def empty_interior(P: HPolyhedron) -> bool:
    return P.empty_interior


def prune_redundant(P: HPolyhedron) -> HPolyhedron:
    """Drop rows implied by the others (order-stable, sequential)."""
    if P.is_empty or P.n_rows <= 1:
        return P
    keep = list(range(P.n_rows))
    for i in range(P.n_rows):
        others = [j for j in keep if j != i]
        if not others:
            continue
        out = solve_lp(LpProblem.build(P.A[i], P.A[others], P.b[others]))
        if out.status is LpStatus.OPTIMAL and out.value <= P.b[i] + EPS_LP:
            keep.remove(i)
    if len(keep) == P.n_rows:
        return P
    return HPolyhedron(P.A[keep], P.b[keep], P.dim)


def clip(P: HPolyhedron, H: Halfspace) -> HPolyhedron:
    if np.all(H.normal == 0.0):
        if H.bound >= 0.0:
            return P
        return HPolyhedron(np.vstack([P.A, H.normal]), np.append(P.b, H.bound), P.dim)
    H = H.normalized()
    joined = HPolyhedron(np.vstack([P.A, H.normal]), np.append(P.b, H.bound), P.dim)
    return prune_redundant(joined)


# ---------------------------------------------------------------------------
# 2D polygons


def cross2(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


@dataclass(frozen=True)
class PolygonV:
    """Convex polygon as a counter-clockwise vertex list.

    ``truncated[i]`` marks vertices produced by a clipping box rather than
    by the polygon's own constraints.
    """

    vertices: np.ndarray
    truncated: tuple = field(default=())

    def __post_init__(self):
        V = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        object.__setattr__(self, "vertices", V)
        if not self.truncated:
            object.__setattr__(self, "truncated", (False,) * len(V))

    def __len__(self):
        return len(self.vertices)

    @property
    def area(self) -> float:
        V = self.vertices
        if len(V) < 3:
            return 0.0
        return 0.5 * float(np.sum(cross2(V, np.roll(V, -1, axis=0))))

    @property
    def edges(self):
        V = self.vertices
        return list(zip(V, np.roll(V, -1, axis=0)))

    @property
    def centroid(self) -> np.ndarray:
        V = self.vertices
        W = np.roll(V, -1, axis=0)
        c = cross2(V, W)
        a = c.sum() / 2.0
        if abs(a) < 1e-300:
            return V.mean(axis=0)
        return np.array([np.sum((V[:, 0] + W[:, 0]) * c), np.sum((V[:, 1] + W[:, 1]) * c)]) / (6.0 * a)

    def is_convex(self, tol: float = EPS_GEO) -> bool:
        """CCW traversal with no reflex turn."""
        V = self.vertices
        if len(V) < 3:
            return True
        e = np.roll(V, -1, axis=0) - V
        turns = cross2(e, np.roll(e, -1, axis=0))
        scale = np.linalg.norm(e, axis=1) * np.linalg.norm(np.roll(e, -1, axis=0), axis=1)
        return bool(np.all(turns >= -tol * np.maximum(scale, 1e-300))) and self.area > 0

    def to_hpolyhedron(self) -> HPolyhedron:
        V = self.vertices
        W = np.roll(V, -1, axis=0)
        e = W - V
        normals = np.column_stack([e[:, 1], -e[:, 0]])
        bounds = np.einsum("ij,ij->i", normals, V)
        return HPolyhedron(normals, bounds, 2)

    def contains(self, points, tol: float = EPS_GEO):
        return self.to_hpolyhedron().contains(points, tol)

    def distance(self, points) -> np.ndarray:
        """Euclidean distance from each point to the (filled) polygon."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        V = self.vertices
        if len(V) == 1:
            return np.linalg.norm(P - V[0], axis=1)
        best = np.full(P.shape[0], np.inf)
        segs = self.edges if len(V) > 2 else [(V[0], V[1])]
        for a, c in segs:
            best = np.minimum(best, point_segment_distance(P, a, c))
        if len(V) > 2:
            best[self.contains(P, tol=0.0)] = 0.0
        return best

    def boundary_samples(self, per_edge: int = 16) -> np.ndarray:
        pts = []
        s = np.linspace(0.0, 1.0, per_edge, endpoint=False)[:, None]
        for a, c in self.edges:
            pts.append(a + s * (c - a))
        return np.vstack(pts)


def point_segment_distance(P: np.ndarray, a, c) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    c = np.asarray(c, dtype=float)
    d = c - a
    L2 = float(d @ d)
    if L2 == 0.0:
        return np.linalg.norm(P - a, axis=1)
    t = np.clip((P - a) @ d / L2, 0.0, 1.0)
    return np.linalg.norm(P - (a + t[:, None] * d), axis=1)


def clip_polygon(V: np.ndarray, normal, bound: float) -> np.ndarray:
    """Sutherland-Hodgman step: keep the part of convex ``V`` with ``normal.x <= bound``."""
    if len(V) == 0:
        return V
    s = V @ np.asarray(normal, dtype=float) - bound
    out = []
    n = len(V)
    for i in range(n):
        j = (i + 1) % n
        if s[i] <= 0.0:
            out.append(V[i])
        if (s[i] < 0.0 < s[j]) or (s[j] < 0.0 < s[i]):
            t = s[i] / (s[i] - s[j])
            out.append(V[i] + t * (V[j] - V[i]))
    return np.array(out).reshape(-1, 2)


def clean_polygon(V: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Remove repeated and collinear vertices from a convex CCW loop."""
    V = np.asarray(V, dtype=float).reshape(-1, 2)
    changed = True
    while changed and len(V) >= 3:
        changed = False
        n = len(V)
        for i in range(n):
            p, q, r = V[i - 1], V[i], V[(i + 1) % n]
            scale = max(1.0, np.abs(V).max())
            if np.linalg.norm(q - p) <= tol * scale or abs(cross2(q - p, r - q)) <= tol * scale * scale:
                V = np.delete(V, i, axis=0)
                changed = True
                break
    return V


def bounding_box(points, pad: float = 0.0):
    P = np.atleast_2d(np.asarray(points, dtype=float))
    lo, hi = P.min(axis=0), P.max(axis=0)
    span = np.max(hi - lo)
    return lo - pad * span, hi + pad * span


def polygon_from_hrep(P: HPolyhedron, box=None) -> PolygonV:
    """Vertices of ``P`` intersected with ``box = (lo, hi)`` in CCW order.

    ``box`` may be omitted for bounded ``P``. Vertices created by an active
    box edge that is not one of ``P``'s own lines are flagged as truncated.
    """
    if P.dim != 2:
        raise GeometryError("polygon_from_hrep is 2D only")
    if box is None:
        if not P.bounded:
            raise GeometryError("unbounded set needs a clipping box")
        # exact extent along the axes, padded so no box edge touches P
        hi = np.array([support(P, [1.0, 0.0]), support(P, [0.0, 1.0])])
        lo = -np.array([support(P, [-1.0, 0.0]), support(P, [0.0, -1.0])])
        pad = 0.25 * float(np.max(hi - lo)) + 1.0
        box = (lo - pad, hi + pad)
    lo, hi = np.asarray(box[0], dtype=float), np.asarray(box[1], dtype=float)
    V = np.array([[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]])
    for a, c in zip(P.A, P.b):
        V = clip_polygon(V, a, c)
        if len(V) == 0:
            break
    V = clean_polygon(V)
    poly = PolygonV(V)
    if len(V) < 3 or poly.area <= EPS_GEO * EPS_GEO:
        raise EmptySetError("polygon has empty interior inside the box")
    box_rows = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    box_b = np.array([hi[0], -lo[0], hi[1], -lo[1]])
    own = [any(np.allclose(r, a, atol=1e-9) and abs(bb - c) <= EPS_GEO for a, c in zip(P.A, P.b))
           for r, bb in zip(box_rows, box_b)]
    flags = []
    for v in V:
        on = np.abs(box_rows @ v - box_b) <= EPS_GEO * max(1.0, np.abs(box_b).max())
        flags.append(bool(np.any(on & ~np.array(own))))
    return PolygonV(V, tuple(flags))


def hausdorff_polygons(P: PolygonV, Q: PolygonV) -> float:
    """Exact Hausdorff distance between convex polygons (attained at vertices)."""
    return float(max(Q.distance(P.vertices).max(), P.distance(Q.vertices).max()))


def chebyshev_center(P: HPolyhedron):
    """Center and radius of the largest Euclidean ball inside ``P``."""
    if P.n_rows == 0:
        return np.zeros(P.dim), np.inf
    m, d = P.A.shape
    obj = np.zeros(d + 1)
    obj[-1] = 1.0
    out = solve_lp(LpProblem.build(obj, np.hstack([P.A, np.ones((m, 1))]), P.b))
    if out.status is LpStatus.UNBOUNDED:
        return P.interior_point, np.inf
    return out.point[:d], out.value
