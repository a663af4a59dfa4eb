"""Spherical convex sets, their inradius and Monte-Carlo checks on S^n."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import optimize, special, stats

from ..geom import EmptySetError, GeometryError
from ..lp import LpProblem, LpStatus, solve_lp

SE_BAND = 3.0
DEFAULT_CHUNK = 200_000


class HemisphereContainmentError(GeometryError):
    """The point set lies inside an open hemisphere."""


@dataclass(frozen=True)
class McEstimate:
    estimate: float
    stderr: float
    samples: int

    @classmethod
    def from_values(cls, values: np.ndarray) -> "McEstimate":
        v = np.asarray(values, dtype=float)
        n = v.size
        se = float(v.std(ddof=1) / np.sqrt(n)) if n > 1 else np.inf
        return cls(float(v.mean()), se, n)

    def to_dict(self) -> dict:
        return {"estimate": self.estimate, "stderr": self.stderr, "samples": self.samples}


def _unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n == 0):
        raise GeometryError("zero vector cannot be normalized")
    return v / n


class SphericalConvexSet:
    """``{x in S^n : normal_j . x >= offset_j}``; zero offsets give hemispheres.

    An offset ``c`` corresponds to a cap of angular radius ``arccos c``.
    """

    def __init__(self, normals, offsets=None, dim: int | None = None):
        N = np.asarray(normals, dtype=float)
        if N.size == 0:
            if dim is None:
                raise GeometryError("dim is required when there are no normals")
            N = np.zeros((0, dim + 1))
        N = np.atleast_2d(N)
        self.normals = _unit(N) if len(N) else N
        c = np.zeros(len(N)) if offsets is None else np.asarray(offsets, dtype=float).ravel()
        if c.size != len(N):
            raise GeometryError("one offset per normal is required")
        if np.any(np.abs(c) > 1):
            raise GeometryError("offsets must lie in [-1, 1]")
        self.offsets = c
        self.dim = self.normals.shape[1] - 1

    @property
    def angles(self) -> np.ndarray:
        """Signed angular shrink of each constraint: arcsin(offset)."""
        return np.arcsin(self.offsets)

    def contains(self, X, tol: float = 0.0) -> np.ndarray:
        X = np.atleast_2d(X)
        if len(self.normals) == 0:
            return np.ones(len(X), dtype=bool)
        return np.all(X @ self.normals.T >= self.offsets - tol, axis=1)

    def rotated(self, R: np.ndarray) -> "SphericalConvexSet":
        return SphericalConvexSet(self.normals @ np.asarray(R).T, self.offsets, self.dim)

    def interior_direction(self) -> tuple[np.ndarray, float]:
        """LP over the cube: max s with ``normal_j . x - offset_j |x|_inf-ish >= s``.

        Only meaningful as a start point; returns ``(x, s)`` with ``x`` unit.
        """
        m, D = self.normals.shape
        # variables (x, s): -n_j.x + s <= -c_j ; -1 <= x_k <= 1
        A = np.vstack([np.hstack([-self.normals, np.ones((m, 1))]),
                       np.hstack([np.eye(D), np.zeros((D, 1))]),
                       np.hstack([-np.eye(D), np.zeros((D, 1))])])
        b = np.concatenate([-self.offsets, np.ones(2 * D)])
        obj = np.zeros(D + 1)
        obj[-1] = 1.0
        out = solve_lp(LpProblem.build(obj, A, b))
        if out.status is not LpStatus.OPTIMAL:
            raise GeometryError("interior LP failed")
        x = out.point[:D]
        nx = np.linalg.norm(x)
        return (x / nx if nx > 0 else x), float(out.value)


def _distances(K: SphericalConvexSet, X: np.ndarray) -> np.ndarray:
    return np.arcsin(np.clip(X @ K.normals.T, -1.0, 1.0)) - K.angles


def spherical_inradius(K: SphericalConvexSet, starts: int = 8, seed: int = 0,
                       return_center: bool = False):
    """Largest angular radius of a cap inside K, with closed forms for the simple cases.

    No constraints gives ``pi`` (the whole sphere), one constraint gives
    ``pi/2 - arcsin(c)``, two hemispheres give half the lune angle.
    """
    m = len(K.normals)
    D = K.dim + 1
    if m == 0:
        r, c = np.pi, np.eye(D)[0]
    elif m == 1:
        r, c = np.pi / 2 - K.angles[0], K.normals[0]
    elif m == 2 and np.all(K.offsets == 0):
        cosang = float(np.clip(K.normals[0] @ K.normals[1], -1.0, 1.0))
        if cosang <= -1.0 + 1e-15:
            raise EmptySetError("two opposite hemispheres meet in a great sphere only")
        r = (np.pi - np.arccos(cosang)) / 2
        c = _unit(K.normals[0] + K.normals[1])
    else:
        r, c = _inradius_numeric(K, starts, seed)
    return (float(r), c) if return_center else float(r)


def _inradius_numeric(K: SphericalConvexSet, starts: int, seed: int):
    D = K.dim + 1
    N, th = K.normals, K.angles
    s_max = float(np.min(np.pi / 2 - th))
    x0, slack = K.interior_direction()
    if slack < -1e-12 or not np.any(x0):
        raise EmptySetError("spherical set is empty")
    rng = np.random.default_rng(seed)
    cands = [x0]
    while len(cands) < starts:
        y = _unit(x0 + 0.5 * rng.normal(size=D))
        if K.contains(y[None, :], tol=0.0)[0]:
            cands.append(y)
        elif rng.uniform() < 0.2:
            cands.append(x0)

    cons = [
        {"type": "ineq", "fun": lambda z: N @ z[:D] - np.sin(z[D] + th),
         "jac": lambda z: np.hstack([N, -np.cos(z[D] + th)[:, None]])},
        {"type": "eq", "fun": lambda z: np.array([z[:D] @ z[:D] - 1.0]),
         "jac": lambda z: np.append(2 * z[:D], 0.0)[None, :]},
    ]
    obj = np.zeros(D + 1)
    obj[-1] = -1.0
    best, best_x = -np.inf, x0
    for x in cands:
        s0 = max(0.0, float(np.min(_distances(K, x[None, :]))))
        res = optimize.minimize(lambda z: -z[D], np.append(x, s0), jac=lambda z: obj,
                                constraints=cons, method="SLSQP",
                                bounds=[(-1.0, 1.0)] * D + [(0.0, s_max)],
                                options={"ftol": 1e-14, "maxiter": 500})
        y = _unit(res.x[:D])
        val = float(np.min(_distances(K, y[None, :])))
        if val > best:
            best, best_x = val, y
    if best < -1e-9:
        raise EmptySetError("spherical set has empty interior")
    return max(best, 0.0), best_x


def random_rotation(dim: int, rng) -> np.ndarray:
    return stats.special_ortho_group.rvs(dim, random_state=rng)


def uniform_sphere(n: int, samples: int, rng) -> np.ndarray:
    """Uniform points on S^n in R^(n+1)."""
    return _unit(rng.normal(size=(samples, n + 1)))


def _chunked(samples: int, seed: int, chunk: int):
    """Independent per-chunk generators; the reduction order is the chunk order."""
    seqs = np.random.SeedSequence(seed).spawn(int(np.ceil(samples / chunk)))
    left = samples
    for s in seqs:
        size = min(chunk, left)
        left -= size
        yield np.random.default_rng(s), size


# ---------------------------------------------------------------------------
# star-shaped correlation for a symmetric Gaussian measure


@dataclass(frozen=True)
class CorrelationCheck:
    lhs: McEstimate
    rhs: McEstimate
    diff: McEstimate

    @property
    def passed(self) -> bool:
        return self.diff.estimate >= -SE_BAND * self.diff.stderr

    def to_dict(self) -> dict:
        return {"lhs": self.lhs.to_dict(), "rhs": self.rhs.to_dict(),
                "diff": self.diff.to_dict(), "passed": self.passed}


def halfspace_body(u) -> Callable:
    u = _unit(u)
    return lambda X: X @ u >= 0


def cone_ball_body(axis, half_angle: float, radius: float) -> Callable:
    """Union of a circular cone about ``axis`` and a centred ball."""
    a = _unit(axis)
    cos_a = np.cos(half_angle)

    def member(X):
        r = np.linalg.norm(X, axis=1)
        in_cone = X @ a >= cos_a * r
        return in_cone | (r <= radius)

    return member


def whole_space_body() -> Callable:
    return lambda X: np.ones(len(X), dtype=bool)


def gaussian_ball_mass(n: int, radius: float) -> float:
    return float(stats.chi2.cdf(radius ** 2, df=n))


def mc_star_correlation(n: int, T: Callable, r_B: float, samples: int = 1_000_000,
                        seed: int = 0, chunk: int = DEFAULT_CHUNK) -> CorrelationCheck:
    """mu(B & T) mu(R^n) vs mu(B) mu(T) for the centred ball B of radius ``r_B``.

    mu is the standard Gaussian, so mu(R^n) = 1 and mu(B) is exact.
    """
    muB = gaussian_ball_mass(n, r_B)
    bt, t = [], []
    for rng, size in _chunked(samples, seed, chunk):
        X = rng.normal(size=(size, n))
        inT = T(X).astype(float)
        inB = (np.einsum("ij,ij->i", X, X) <= r_B ** 2).astype(float)
        bt.append(inB * inT)
        t.append(inT)
    bt = np.concatenate(bt)
    t = np.concatenate(t)
    return CorrelationCheck(McEstimate.from_values(bt), McEstimate.from_values(muB * t),
                            McEstimate.from_values(bt - muB * t))


# ---------------------------------------------------------------------------
# epsilon-neighbourhoods of point sets


@dataclass(frozen=True)
class SphericalPointSet:
    points: np.ndarray
    eps: float

    def __post_init__(self):
        P = _unit(np.atleast_2d(np.asarray(self.points, dtype=float)))
        object.__setattr__(self, "points", P)
        if not 0 < self.eps < np.pi / 2:
            raise GeometryError("eps must lie in (0, pi/2)")

    @property
    def n(self) -> int:
        return self.points.shape[1] - 1


def open_hemisphere_margin(points) -> float:
    """max over unit-box c of min_i x_i . c; positive iff inside an open hemisphere."""
    P = np.atleast_2d(points)
    m, D = P.shape
    A = np.vstack([np.hstack([-P, np.ones((m, 1))]),
                   np.hstack([np.eye(D), np.zeros((D, 1))]),
                   np.hstack([-np.eye(D), np.zeros((D, 1))])])
    b = np.concatenate([np.zeros(m), np.ones(2 * D)])
    obj = np.zeros(D + 1)
    obj[-1] = 1.0
    return float(solve_lp(LpProblem.build(obj, A, b)).value)


def two_cap_fraction(n: int, eps: float) -> float:
    """Normalized measure of two antipodal caps of radius eps on S^n."""
    return float(special.betainc(n / 2, 0.5, np.sin(eps) ** 2))


@dataclass(frozen=True)
class NeighborhoodCheck:
    set_measure: McEstimate
    antipodal_measure: float
    antipodal_mc: McEstimate

    @property
    def passed(self) -> bool:
        diff = self.set_measure.estimate - self.antipodal_measure
        return diff >= -SE_BAND * self.set_measure.stderr

    def to_dict(self) -> dict:
        return {"set": self.set_measure.to_dict(), "antipodal": self.antipodal_measure,
                "antipodal_mc": self.antipodal_mc.to_dict(), "passed": self.passed}


def mc_eps_neighborhood(X: SphericalPointSet, samples: int = 1_000_000, seed: int = 0,
                        chunk: int = 20_000, tol: float = 1e-9) -> NeighborhoodCheck:
    """sigma(X + eps) against the two antipodal caps sigma(X_0 + eps)."""
    if open_hemisphere_margin(X.points) > tol:
        raise HemisphereContainmentError("X lies in an open hemisphere")
    cos_e = np.cos(X.eps)
    pole = np.eye(X.n + 1)[0]
    hits, caps = [], []
    for rng, size in _chunked(samples, seed, chunk):
        U = uniform_sphere(X.n, size, rng)
        hits.append((np.max(U @ X.points.T, axis=1) >= cos_e).astype(float))
        caps.append((np.abs(U @ pole) >= cos_e).astype(float))
    return NeighborhoodCheck(McEstimate.from_values(np.concatenate(hits)),
                             two_cap_fraction(X.n, X.eps),
                             McEstimate.from_values(np.concatenate(caps)))


# ---------------------------------------------------------------------------
# isoperimetric bound by the lune with the same inscribed cap


def lune(angle: float, n: int = 2) -> SphericalConvexSet:
    """Intersection of two hemispheres with dihedral angle ``angle``."""
    D = n + 1
    e0, e1 = np.eye(D)[0], np.eye(D)[1]
    half = (np.pi - angle) / 2
    n1 = np.cos(half) * e0 + np.sin(half) * e1
    n2 = np.cos(half) * e0 - np.sin(half) * e1
    return SphericalConvexSet([n1, n2])


def cap(radius: float, n: int = 2) -> SphericalConvexSet:
    return SphericalConvexSet([np.eye(n + 1)[0]], [np.cos(radius)])


def cap_fraction(n: int, radius: float) -> float:
    """Normalized measure of a cap of angular radius ``radius`` on S^n."""
    if radius <= np.pi / 2:
        return 0.5 * float(special.betainc(n / 2, 0.5, np.sin(radius) ** 2))
    return 1.0 - cap_fraction(n, np.pi - radius)


@dataclass(frozen=True)
class IsoperimetryCheck:
    measure: McEstimate
    bound: float
    inradius: float

    @property
    def passed(self) -> bool:
        return self.measure.estimate - self.bound <= SE_BAND * self.measure.stderr

    def to_dict(self) -> dict:
        return {"measure": self.measure.to_dict(), "bound": self.bound,
                "inradius": self.inradius, "passed": self.passed}


def mc_isoperimetry(K: SphericalConvexSet, samples: int = 1_000_000, seed: int = 0,
                    chunk: int = DEFAULT_CHUNK) -> IsoperimetryCheck:
    """sigma(K) against the lune of angle 2r, whose normalized measure is r/pi."""
    r = spherical_inradius(K)
    hits = []
    for rng, size in _chunked(samples, seed, chunk):
        hits.append(K.contains(uniform_sphere(K.dim, size, rng)).astype(float))
    return IsoperimetryCheck(McEstimate.from_values(np.concatenate(hits)), r / np.pi, r)


# ---------------------------------------------------------------------------
# inradius sums of spherical covers


def spherical_voronoi(sites) -> list[SphericalConvexSet]:
    """Cells {x : p_i . x >= p_j . x}; they cover the sphere."""
    P = _unit(np.atleast_2d(sites))
    out = []
    for i in range(len(P)):
        rows = [P[i] - P[j] for j in range(len(P)) if j != i]
        out.append(SphericalConvexSet(rows) if rows else SphericalConvexSet([], dim=P.shape[1] - 1))
    return out


def hemisphere_pair(normal) -> list[SphericalConvexSet]:
    u = _unit(normal)
    return [SphericalConvexSet([u]), SphericalConvexSet([-u])]


def cover_inradius_sum(cells: list[SphericalConvexSet], seed: int = 0) -> float:
    return float(sum(spherical_inradius(K, seed=seed) for K in cells))


__all__ = [
    "CorrelationCheck",
    "HemisphereContainmentError",
    "IsoperimetryCheck",
    "McEstimate",
    "NeighborhoodCheck",
    "SE_BAND",
    "SphericalConvexSet",
    "SphericalPointSet",
    "cap",
    "cap_fraction",
    "cone_ball_body",
    "cover_inradius_sum",
    "gaussian_ball_mass",
    "halfspace_body",
    "hemisphere_pair",
    "lune",
    "mc_eps_neighborhood",
    "mc_isoperimetry",
    "mc_star_correlation",
    "open_hemisphere_margin",
    "random_rotation",
    "spherical_inradius",
    "spherical_voronoi",
    "two_cap_fraction",
    "uniform_sphere",
    "whole_space_body",
]
