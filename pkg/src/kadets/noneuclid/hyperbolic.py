"""Convex regions of the hyperbolic plane in the Poincare disk, their inradius,
and a two-set cover of a large disk whose inradii sum to less than its radius."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from ..geom import EmptySetError, GeometryError

J = np.diag([-1.0, 1.0, 1.0])
FAMILY = "alternating hexagon cuts"


def minkowski(X, Y) -> np.ndarray:
    return -X[..., 0] * Y[..., 0] + X[..., 1] * Y[..., 1] + X[..., 2] * Y[..., 2]


def lift(p) -> np.ndarray:
    """Poincare point(s) to the hyperboloid; boundary points give a null direction."""
    p = np.asarray(p, dtype=float)
    s = np.sum(p * p, axis=-1)
    inside = s < 1.0
    denom = np.where(inside, 1.0 - s, 1.0)
    X = np.concatenate([(1.0 + s)[..., None], 2.0 * p], axis=-1)
    return X / denom[..., None]


def project(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    return X[..., 1:] / (1.0 + X[..., :1])


def distance(p, q) -> np.ndarray:
    c = -minkowski(lift(p), lift(q))
    return np.arccosh(np.maximum(c, 1.0))


def radius_to_euclid(rho: float) -> float:
    """Euclidean radius in the Poincare disk of a hyperbolic circle about 0."""
    return float(np.tanh(rho / 2))


def geodesic_normal(p, q) -> np.ndarray:
    """Unit spacelike N with <X, N> = 0 along the geodesic through p and q."""
    N = J @ np.cross(lift(p), lift(q))
    nn = minkowski(N, N)
    if not nn > 0:
        raise GeometryError("points do not determine a geodesic")
    return N / np.sqrt(nn)


@dataclass(frozen=True)
class Mobius:
    """z -> e^{i theta} (z - a) / (1 - conj(a) z), an isometry of the disk."""

    a: complex
    theta: float

    def __call__(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        z = p[..., 0] + 1j * p[..., 1]
        w = np.exp(1j * self.theta) * (z - self.a) / (1 - np.conj(self.a) * z)
        return np.stack([w.real, w.imag], axis=-1)

    @classmethod
    def random(cls, rng, max_shift: float = 0.7) -> "Mobius":
        r = max_shift * np.sqrt(rng.uniform())
        return cls(complex(r * np.cos(t := rng.uniform(0, 2 * np.pi)), r * np.sin(t)),
                   float(rng.uniform(0, 2 * np.pi)))


@dataclass(frozen=True)
class HyperbolicRegion:
    """Intersection of geodesic halfplanes and hyperbolic disks in the Poincare model.

    ``sides`` holds two points on each bounding geodesic (boundary points of
    the unit disk are allowed); ``flags`` records which side is kept, chosen
    so that ``inside`` (a reference point of the region) is kept.
    """

    sides: tuple = ()
    disks: tuple = ()
    inside: tuple = (0.0, 0.0)
    flags: tuple = field(default=None)

    def __post_init__(self):
        sides = tuple((tuple(map(float, p)), tuple(map(float, q))) for p, q in self.sides)
        disks = tuple((tuple(map(float, c)), float(r)) for c, r in self.disks)
        object.__setattr__(self, "sides", sides)
        object.__setattr__(self, "disks", disks)
        object.__setattr__(self, "inside", tuple(map(float, self.inside)))
        if np.sum(np.square(self.inside)) >= 1:
            raise GeometryError("reference point must lie in the open unit disk")
        if self.flags is None:
            X = lift(self.inside)
            flags = []
            for N in self._raw_normals():
                v = minkowski(X, N)
                if v == 0:
                    raise GeometryError("reference point lies on a side")
                flags.append(1.0 if v > 0 else -1.0)
            object.__setattr__(self, "flags", tuple(flags))

    def _raw_normals(self) -> list[np.ndarray]:
        return [geodesic_normal(p, q) for p, q in self.sides]

    @property
    def normals(self) -> np.ndarray:
        """Oriented normals: the region has ``<X, N> >= 0``."""
        N = [f * n for f, n in zip(self.flags, self._raw_normals())]
        return np.array(N).reshape(-1, 3)

    def distances(self, points) -> np.ndarray:
        """(M, sides + disks) signed hyperbolic distances to each boundary piece."""
        X = lift(np.atleast_2d(points))
        cols = []
        if self.sides:
            cols.append(np.arcsinh(minkowski(X[:, None, :], self.normals[None, :, :])))
        for c, r in self.disks:
            cols.append((r - np.arccosh(np.maximum(-minkowski(X, lift(c)), 1.0)))[:, None])
        if not cols:
            return np.full((len(X), 1), np.inf)
        return np.hstack(cols)

    def depth(self, points) -> np.ndarray:
        return np.min(self.distances(points), axis=1)

    def contains(self, points, tol: float = 1e-12) -> np.ndarray:
        P = np.atleast_2d(points)
        inside_model = np.sum(P * P, axis=1) < 1.0
        out = np.zeros(len(P), dtype=bool)
        out[inside_model] = self.depth(P[inside_model]) >= -tol
        return out

    def transformed(self, m: Mobius) -> "HyperbolicRegion":
        return HyperbolicRegion(
            sides=[(m(np.array(p)), m(np.array(q))) for p, q in self.sides],
            disks=[(m(np.array(c)), r) for c, r in self.disks],
            inside=m(np.array(self.inside)),
        )


def hyperbolic_inradius(R: HyperbolicRegion, starts: int = 12, seed: int = 0,
                        tol: float = 1e-12) -> tuple[float, np.ndarray]:
    """Largest inscribed hyperbolic disk (radius, centre in the Poincare model).

    Maximizes the smallest signed distance to the sides and disk boundaries
    with SLSQP from several starting points.
    """
    if not R.sides and len(R.disks) == 1:
        c, r = R.disks[0]
        return r, np.array(c)
    if not R.sides and not R.disks:
        return np.inf, np.zeros(2)
    rng = np.random.default_rng(seed)
    ref = np.array(R.inside)
    starts_pts = [ref]
    # random points of the region near the reference point
    tries = 0
    while len(starts_pts) < starts and tries < 50 * starts:
        tries += 1
        ang = rng.uniform(0, 2 * np.pi)
        rad = np.sqrt(rng.uniform()) * 0.999
        p = np.array([rad * np.cos(ang), rad * np.sin(ang)])
        if R.contains(p)[0]:
            starts_pts.append(p)
    k = R.distances(ref[None, :]).shape[1]

    def cons(z):
        return R.distances(z[None, :2])[0] - z[2]

    best_r, best_c = -np.inf, ref
    for p in starts_pts:
        z0 = np.append(p, R.depth(p[None, :])[0])
        res = optimize.minimize(
            lambda z: -z[2], z0, jac=lambda z: np.array([0.0, 0.0, -1.0]),
            constraints=[{"type": "ineq", "fun": cons},
                         {"type": "ineq", "fun": lambda z: np.array([1.0 - 1e-12 - z[:2] @ z[:2]])}],
            method="SLSQP", options={"ftol": tol, "maxiter": 500})
        c = res.x[:2]
        if c @ c >= 1.0:
            continue
        val = float(R.depth(c[None, :])[0])
        if val > best_r:
            best_r, best_c = val, c
    if best_r < 0 or k == 0:
        raise EmptySetError("hyperbolic region has empty interior")
    return best_r, best_c


def disk_region(rho: float, center=(0.0, 0.0)) -> HyperbolicRegion:
    return HyperbolicRegion(disks=[(center, rho)], inside=center)


def half_disk(rho: float) -> HyperbolicRegion:
    """Disk of radius rho about 0 cut by the diameter along the x axis (upper half kept)."""
    return HyperbolicRegion(sides=[((-0.5, 0.0), (0.5, 0.0))], disks=[((0.0, 0.0), rho)],
                            inside=(0.0, 0.3 * radius_to_euclid(rho)))


def ideal_triangle() -> HyperbolicRegion:
    v = [np.array([np.cos(t), np.sin(t)]) for t in (np.pi / 2, np.pi / 2 + 2 * np.pi / 3,
                                                    np.pi / 2 + 4 * np.pi / 3)]
    return HyperbolicRegion(sides=[(v[0], v[1]), (v[1], v[2]), (v[2], v[0])], inside=(0.0, 0.0))


IDEAL_TRIANGLE_INRADIUS = 0.5 * np.log(3.0)


# ---------------------------------------------------------------------------
# the two-set cover


def hexagon_angles(beta: float) -> np.ndarray:
    """Vertex angles 0, beta, 120, 120+beta, 240, 240+beta (degrees in, radians out)."""
    base = np.array([0.0, beta, 120.0, 120.0 + beta, 240.0, 240.0 + beta])
    return np.deg2rad(base)


def hexagon_cover(rho: float, beta: float = 60.0) -> tuple[HyperbolicRegion, HyperbolicRegion]:
    """Two convex sets covering the disk Omega of radius rho about 0.

    The hexagon vertices lie on the boundary of Omega. The first set keeps the
    boundary arcs over the hexagon edges v0v1, v2v3, v4v5 and cuts the other
    three edges off along their geodesics; the second set does the opposite.
    Each cut-off cap lies in the angular sector of its edge, which the other
    set keeps whole, so the two sets cover Omega.
    """
    if not 0 < beta < 120:
        raise GeometryError("beta must lie in (0, 120) degrees")
    R = radius_to_euclid(rho)
    th = hexagon_angles(beta)
    V = R * np.column_stack([np.cos(th), np.sin(th)])
    omega = ((0.0, 0.0), rho)
    first = HyperbolicRegion(sides=[(V[1], V[2]), (V[3], V[4]), (V[5], V[0])], disks=[omega])
    second = HyperbolicRegion(sides=[(V[0], V[1]), (V[2], V[3]), (V[4], V[5])], disks=[omega])
    return first, second


def cover_defect(rho: float, regions, samples: int = 20000, seed: int = 0) -> int:
    """Number of sampled points of Omega outside every region."""
    rng = np.random.default_rng(seed)
    R = radius_to_euclid(rho)
    ang = rng.uniform(0, 2 * np.pi, samples)
    rad = R * np.sqrt(rng.uniform(size=samples)) * (1 - 1e-12)
    P = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
    covered = np.zeros(samples, dtype=bool)
    for reg in regions:
        covered |= reg.contains(P, tol=1e-9)
    return int(np.sum(~covered))


@dataclass(frozen=True)
class CoverCandidate:
    rho: float
    beta: float
    radii: tuple
    centers: tuple
    margin: float
    center_excluded: tuple
    uncovered: int

    def to_dict(self) -> dict:
        return {
            "rho": self.rho, "beta_deg": self.beta, "radii": list(self.radii),
            "centers": [list(map(float, c)) for c in self.centers],
            "margin": self.margin, "center_excluded": list(self.center_excluded),
            "uncovered_samples": self.uncovered,
        }


@dataclass(frozen=True)
class CounterexampleResult:
    best: CoverCandidate
    grid: tuple
    optimizer_tol: float
    family: str = FAMILY

    @property
    def margin(self) -> float:
        return self.best.margin

    @property
    def success(self) -> bool:
        return self.best.margin > 10 * self.optimizer_tol and self.best.uncovered == 0

    def regions(self):
        return hexagon_cover(self.best.rho, self.best.beta)

    def to_dict(self) -> dict:
        return {"family": self.family, "rho": self.best.rho, "margin": self.margin,
                "best": self.best.to_dict(),
                "grid": [c.to_dict() for c in self.grid],
                "optimizer_tol": self.optimizer_tol, "success": self.success}


def evaluate_cover(rho: float, beta: float, seed: int = 0, tol: float = 1e-12) -> CoverCandidate:
    regions = hexagon_cover(rho, beta)
    radii, centers, excluded = [], [], []
    for reg in regions:
        r, c = hyperbolic_inradius(reg, seed=seed, tol=tol)
        radii.append(float(r))
        centers.append(c)
        excluded.append(bool(distance(c, np.zeros(2)) > r))
    return CoverCandidate(rho, float(beta), tuple(radii), tuple(centers),
                          float(rho - sum(radii)), tuple(excluded),
                          cover_defect(rho, regions, seed=seed))


def hyperbolic_counterexample_search(rho: float, grid=None, seed: int = 0,
                                     tol: float = 1e-12) -> CounterexampleResult:
    """Best margin rho - (r_1 + r_2) over the hexagon-angle grid (degrees)."""
    if rho <= 0:
        raise GeometryError("rho must be positive")
    grid = np.linspace(40.0, 80.0, 9) if grid is None else np.asarray(grid, dtype=float)
    cands = tuple(evaluate_cover(rho, b, seed, tol) for b in grid)
    best = max(cands, key=lambda c: (c.uncovered == 0, c.margin))
    # SLSQP stops on a relative change of the objective; the radii are O(rho)
    return CounterexampleResult(best, cands, max(tol * rho, 1e-9))


# ---------------------------------------------------------------------------
# drawing helpers


def hyperbolic_circle_euclid(center, r: float) -> tuple[np.ndarray, float]:
    """Euclidean centre and radius of a hyperbolic circle in the Poincare model."""
    c = np.asarray(center, dtype=float)
    nc = np.linalg.norm(c)
    u = c / nc if nc > 0 else np.array([1.0, 0.0])
    dc = 2 * np.arctanh(min(nc, 1 - 1e-16))
    a = np.tanh((dc + r) / 2)
    b = np.tanh((dc - r) / 2)
    return 0.5 * (a + b) * u, 0.5 * (a - b)


def boundary_trace(R: HyperbolicRegion, n: int = 720, iters: int = 60) -> np.ndarray:
    """Boundary of a region containing the origin, traced radially by bisection."""
    if not R.contains(np.zeros((1, 2)))[0]:
        raise GeometryError("radial tracing needs the origin inside the region")
    ang = np.linspace(0, 2 * np.pi, n, endpoint=False)
    U = np.column_stack([np.cos(ang), np.sin(ang)])
    lo = np.zeros(n)
    hi = np.full(n, 1.0 - 1e-12)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        ok = R.contains(mid[:, None] * U)
        lo = np.where(ok, mid, lo)
        hi = np.where(ok, hi, mid)
    return lo[:, None] * U


__all__ = [
    "CounterexampleResult",
    "CoverCandidate",
    "FAMILY",
    "HyperbolicRegion",
    "IDEAL_TRIANGLE_INRADIUS",
    "Mobius",
    "boundary_trace",
    "cover_defect",
    "disk_region",
    "distance",
    "evaluate_cover",
    "geodesic_normal",
    "half_disk",
    "hexagon_cover",
    "hyperbolic_circle_euclid",
    "hyperbolic_counterexample_search",
    "hyperbolic_inradius",
    "ideal_triangle",
    "lift",
    "minkowski",
    "project",
    "radius_to_euclid",
]
