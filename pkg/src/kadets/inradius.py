"""Relative inradius r_B(C): the largest h with some translate hB + t inside C."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .geom import EPS_GEO, GeometryError, HPolyhedron
from .lp import EPS_LP, LpProblem, LpStatus, solve_lp


class NotABodyError(GeometryError):
    """B must be bounded with nonempty interior."""


class InradiusStatus(enum.Enum):
    FINITE = "finite"
    EMPTY = "empty"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class InradiusResult:
    h: float
    witness: np.ndarray | None
    status: InradiusStatus

    @property
    def finite(self) -> bool:
        return self.status is InradiusStatus.FINITE


def check_body(B: HPolyhedron) -> None:
    if not B.bounded or B.empty_interior:
        raise NotABodyError("B must be bounded with nonempty interior")


def _inradius_rows(B: HPolyhedron, A: np.ndarray, b: np.ndarray) -> InradiusResult:
    m, d = A.shape
    if m == 0:
        return InradiusResult(np.inf, None, InradiusStatus.UNBOUNDED)
    h_B = B.support_values(A)
    # variables (t, h): n_j . t + h * h_B(n_j) <= b_j,  -h <= 0
    rows = np.vstack([np.hstack([A, h_B[:, None]]), np.append(np.zeros(d), -1.0)])
    obj = np.zeros(d + 1)
    obj[-1] = 1.0
    out = solve_lp(LpProblem.build(obj, rows, np.append(b, 0.0)))
    if out.status is LpStatus.INFEASIBLE:
        return InradiusResult(-np.inf, None, InradiusStatus.EMPTY)
    if out.status is LpStatus.UNBOUNDED:
        return InradiusResult(np.inf, None, InradiusStatus.UNBOUNDED)
    return InradiusResult(max(out.value, 0.0), out.point[:d], InradiusStatus.FINITE)


def relative_inradius(B: HPolyhedron, C: HPolyhedron) -> InradiusResult:
    """r_B(C) with a witness translation.

    Empty ``C`` gives ``-inf`` (status EMPTY); a ``C`` that holds
    arbitrarily large homothets gives ``+inf`` (status UNBOUNDED).
    """
    check_body(B)
    if C.dim != B.dim:
        raise GeometryError("dimension mismatch")
    return _inradius_rows(B, C.A, C.b)


def witness_violation(B: HPolyhedron, C: HPolyhedron, result: InradiusResult) -> float:
    """Largest excess of ``n_j . t + h h_B(n_j) - b_j`` over the rows of C."""
    if not result.finite or C.n_rows == 0:
        return -np.inf
    lhs = C.A @ result.witness + result.h * B.support_values(C.A)
    return float(np.max(lhs - C.b))


class OffsetFamily:
    """Polyhedra ``n_j . x <= b_j - y_j`` for offset vectors ``y``."""

    def __init__(self, base: HPolyhedron):
        self.base = base
        self.A = base.A
        self.b = base.b

    @property
    def m(self) -> int:
        return self.A.shape[0]

    def at(self, y) -> HPolyhedron:
        return HPolyhedron(self.A, self.b - self._offset(y), self.base.dim)

    def _offset(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float).ravel()
        if y.size != self.m:
            raise GeometryError(f"offset must have {self.m} entries")
        return y

    @classmethod
    def from_translates(cls, parts: list[HPolyhedron]) -> "TranslateFamily":
        return TranslateFamily(parts)


class TranslateFamily(OffsetFamily):
    """Intersections of translates ``(C_1 + y_1) & ... & (C_m + y_m)``.

    A translate by ``y_k`` shifts each row of ``C_k`` by ``-n . y_k``, so the
    family is an offset family in the stacked rows.
    """

    def __init__(self, parts: list[HPolyhedron]):
        dim = parts[0].dim
        A = np.vstack([p.A for p in parts])
        b = np.concatenate([p.b for p in parts])
        super().__init__(HPolyhedron(A, b, dim))
        self.sizes = [p.n_rows for p in parts]
        self.dim = dim

    def offsets_for(self, translations) -> np.ndarray:
        T = np.asarray(translations, dtype=float).reshape(len(self.sizes), self.dim)
        out = []
        start = 0
        for k, size in enumerate(self.sizes):
            rows = self.A[start:start + size]
            out.append(-(rows @ T[k]))
            start += size
        return np.concatenate(out)


def inradius_at_offset(B: HPolyhedron, F: OffsetFamily, y) -> float:
    check_body(B)
    return _inradius_rows(B, F.A, F.b - F._offset(y)).h


def concavity_residual(B: HPolyhedron, F: OffsetFamily, y1, y2) -> float:
    """``r((y1+y2)/2) - (r(y1)+r(y2))/2``; ``+inf`` when an endpoint is empty.

    Concavity of the inradius in the offsets means this never drops below
    ``-EPS_LP``.
    """
    y1 = np.asarray(y1, dtype=float)
    y2 = np.asarray(y2, dtype=float)
    r1 = inradius_at_offset(B, F, y1)
    r2 = inradius_at_offset(B, F, y2)
    if r1 == -np.inf or r2 == -np.inf:
        return np.inf
    if np.isinf(r1) or np.isinf(r2):
        raise GeometryError("concavity residual needs finite or empty endpoints")
    rm = inradius_at_offset(B, F, 0.5 * (y1 + y2))
    return rm - 0.5 * (r1 + r2)


__all__ = [
    "EPS_GEO",
    "EPS_LP",
    "InradiusResult",
    "InradiusStatus",
    "NotABodyError",
    "OffsetFamily",
    "TranslateFamily",
    "check_body",
    "concavity_residual",
    "inradius_at_offset",
    "relative_inradius",
    "witness_violation",
]
