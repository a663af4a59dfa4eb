"""Small dense simplex solver for the tiny LPs used throughout the package.

Problems are stated as::

    maximize    c . z
    subject to  A z <= b,   z free

Free variables are split into positive and negative parts, a two-phase
tableau method finds an optimal basis, and the final point is recomputed
from the original data so the certificate is as accurate as the basis
allows. Pivoting is Dantzig's rule with a permanent switch to Bland's
rule once degenerate pivots start to pile up, so results are
deterministic and cycling cannot occur.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

EPS_LP = 1e-9

_PIVOT_TOL = 1e-11
_COST_TOL = 1e-11
_DEGENERATE_SWITCH = 20


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class LpProblem:
    """``max objective . z`` subject to ``A z <= b`` with free ``z``."""

    objective: np.ndarray
    A: np.ndarray
    b: np.ndarray

    @classmethod
    def build(cls, objective, A=None, b=None) -> "LpProblem":
        c = np.asarray(objective, dtype=float).ravel()
        n = c.size
        if A is None or len(A) == 0:
            A = np.zeros((0, n))
            b = np.zeros(0)
        A = np.asarray(A, dtype=float).reshape(-1, n)
        b = np.asarray(b, dtype=float).ravel()
        if A.shape[0] != b.size:
            raise ValueError("constraint matrix and bound vector disagree in length")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValueError("LP data must be finite")
        return cls(c, A, b)


@dataclass(frozen=True)
class LpOutcome:
    status: LpStatus
    value: float | None = None
    point: np.ndarray | None = None

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


class _Tableau:
    """Dense tableau; last row holds reduced costs, last column the rhs."""

    def __init__(self, T: np.ndarray, basis: list[int]):
        self.T = T
        self.basis = basis
        self.bland = False
        self.degenerate_run = 0

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        colvals = T[:, col].copy()
        colvals[row] = 0.0
        T -= np.outer(colvals, T[row])
        self.basis[row] = col

    def entering(self, allowed: int) -> int | None:
        costs = self.T[-1, :allowed]
        scale = max(1.0, float(np.max(np.abs(costs)))) if costs.size else 1.0
        candidates = np.flatnonzero(costs < -_COST_TOL * scale)
        if candidates.size == 0:
            return None
        if self.bland:
            return int(candidates[0])
        return int(candidates[np.argmin(costs[candidates])])

    def leaving(self, col: int) -> int | None:
        T = self.T
        column = T[:-1, col]
        rows = np.flatnonzero(column > _PIVOT_TOL)
        if rows.size == 0:
            return None
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        # Bland: among ties leave the smallest basic index
        return int(min(ties, key=lambda r: self.basis[r]))

    def run(self, allowed: int, max_iter: int) -> str:
        for _ in range(max_iter):
            col = self.entering(allowed)
            if col is None:
                return "optimal"
            row = self.leaving(col)
            if row is None:
                return "unbounded"
            if self.T[row, -1] <= _PIVOT_TOL:
                self.degenerate_run += 1
                if self.degenerate_run > _DEGENERATE_SWITCH:
                    self.bland = True
            else:
                self.degenerate_run = 0
            self.pivot(row, col)
        raise RuntimeError("simplex iteration cap reached")


def solve_lp(problem: LpProblem) -> LpOutcome:
    """Solve ``problem``; see module docstring for the form."""
    c, A, b = problem.objective, problem.A, problem.b
    m, n = A.shape
    if m == 0:
        if np.any(c != 0.0):
            return LpOutcome(LpStatus.UNBOUNDED)
        return LpOutcome(LpStatus.OPTIMAL, 0.0, np.zeros(n))

    # standard form columns: [z+ (n), z- (n), slack (m), artificial (n_art)]
    neg = b < 0
    n_art = int(neg.sum())
    n_struct = 2 * n + m
    width = n_struct + n_art
    T = np.zeros((m + 1, width + 1))
    sign = np.where(neg, -1.0, 1.0)
    T[:m, :n] = A * sign[:, None]
    T[:m, n:2 * n] = -A * sign[:, None]
    T[:m, 2 * n:n_struct] = np.diag(sign)
    T[:m, -1] = b * sign
    basis: list[int] = []
    art = n_struct
    for i in range(m):
        if neg[i]:
            T[i, art] = 1.0
            basis.append(art)
            art += 1
        else:
            basis.append(2 * n + i)
    max_iter = 50 * (m + width) + 100

    if n_art:
        # phase 1: maximize -sum(artificials)
        T[-1, n_struct:width] = 1.0
        for i in range(m):
            if neg[i]:
                T[-1] -= T[i]
        tab = _Tableau(T, basis)
        tab.run(width, max_iter)
        infeasibility = -tab.T[-1, -1]
        if infeasibility > EPS_LP * max(1.0, float(np.max(np.abs(b)))):
            return LpOutcome(LpStatus.INFEASIBLE)
        T, basis = tab.T, tab.basis
        # drive zero-level artificials out of the basis
        keep_rows = []
        for i in range(m):
            if basis[i] >= n_struct:
                row = T[i, :n_struct]
                cols = np.flatnonzero(np.abs(row) > 1e-9)
                if cols.size:
                    tab.pivot(i, int(cols[0]))
                    keep_rows.append(i)
            else:
                keep_rows.append(i)
        T = np.vstack([T[keep_rows], T[-1:]])
        basis = [basis[i] for i in keep_rows]
        T = np.hstack([T[:, :n_struct], T[:, -1:]])
    # phase 2 objective row: reduced costs for maximizing c
    cost = np.concatenate([c, -c, np.zeros(m)])
    T[-1, :] = 0.0
    T[-1, :n_struct] = -cost
    for i, j in enumerate(basis):
        if cost[j] != 0.0:
            T[-1] += cost[j] * T[i]
    tab = _Tableau(T, basis)
    status = tab.run(n_struct, max_iter)
    if status == "unbounded":
        return LpOutcome(LpStatus.UNBOUNDED)

    x = np.zeros(n_struct)
    x[tab.basis] = tab.T[:-1, -1]
    x = _refine(A, b, tab.basis, x, n, m)
    z = x[:n] - x[n:2 * n]
    return LpOutcome(LpStatus.OPTIMAL, float(c @ z), z)


def _refine(A, b, basis, x, n, m):
    """Recompute basic values from the original standard-form matrix."""
    full = np.hstack([A, -A, np.eye(m)])
    B = full[:, basis]
    if B.shape[0] != B.shape[1]:
        return x
    try:
        xb = np.linalg.solve(B, b)
    except np.linalg.LinAlgError:
        return x
    if not np.all(np.isfinite(xb)) or np.any(xb < -1e-7):
        return x
    out = np.zeros_like(x)
    out[basis] = np.maximum(xb, 0.0)
    return out
