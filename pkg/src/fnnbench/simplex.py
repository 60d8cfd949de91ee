"""Small dense two-phase simplex with Bland's pivoting rule.

Solves ``max c.x`` subject to ``A_eq x = b_eq``, ``A_ub x <= b_ub`` and
``x >= 0``. Bland's rule (lowest eligible index for both the entering and the
leaving variable) makes the pivot sequence, and hence the returned vertex,
a deterministic function of the inputs.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPS = 1e-11


class LPError(RuntimeError):
    pass


class InfeasibleError(LPError):
    pass


class UnboundedError(LPError):
    pass


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    value: float
    pivots: int


def _pivot(T: np.ndarray, basis: list[int], row: int, col: int) -> None:
    T[row] /= T[row, col]
    col_vals = T[:, col].copy()
    col_vals[row] = 0.0
    T -= np.outer(col_vals, T[row])
    basis[row] = col


def _run(T: np.ndarray, basis: list[int], ncols: int, max_pivots: int) -> int:
    """Minimise the objective held in the last tableau row. Returns pivot count."""
    m = T.shape[0] - 1
    for count in range(max_pivots):
        cost = T[m, :ncols]
        entering = np.flatnonzero(cost < -EPS)
        if entering.size == 0:
            return count
        col = int(entering[0])
        column = T[:m, col]
        rows = np.flatnonzero(column > EPS)
        if rows.size == 0:
            raise UnboundedError("objective unbounded")
        ratios = T[rows, -1] / column[rows]
        best = ratios.min()
        ties = rows[ratios <= best + EPS * max(1.0, abs(best))]
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(T, basis, row, col)
    raise LPError(f"no convergence after {max_pivots} pivots")


def maximize(c, A_eq=None, b_eq=None, A_ub=None, b_ub=None, max_pivots: int = 50_000) -> LPResult:
    c = np.asarray(c, dtype=float).ravel()
    n = c.size
    blocks, rhs = [], []
    n_slack = 0
    if A_ub is not None and len(A_ub):
        A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
        n_slack = A_ub.shape[0]
    if A_eq is not None and len(A_eq):
        A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float))
        blocks.append(np.hstack([A_eq, np.zeros((A_eq.shape[0], n_slack))]))
        rhs.append(np.asarray(b_eq, dtype=float).ravel())
    if n_slack:
        blocks.append(np.hstack([A_ub, np.eye(n_slack)]))
        rhs.append(np.asarray(b_ub, dtype=float).ravel())
    if not blocks:
        if np.any(c > EPS):
            raise UnboundedError("objective unbounded")
        return LPResult(np.zeros(n), 0.0, 0)
    A = np.vstack(blocks)
    b = np.concatenate(rhs)
    if A.shape[1] != n + n_slack or b.size != A.shape[0]:
        raise ValueError("constraint shapes do not match the objective")
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    m, nv = A.shape

    # phase 1: artificial basis, minimise the sum of artificials
    T = np.zeros((m + 1, nv + m + 1))
    T[:m, :nv] = A
    T[:m, nv:nv + m] = np.eye(m)
    T[:m, -1] = b
    T[m, nv:nv + m] = 1.0
    T[m] -= T[:m].sum(axis=0)
    basis = list(range(nv, nv + m))
    pivots = _run(T, basis, nv + m, max_pivots)
    if -T[m, -1] > 1e-9 * max(1.0, float(np.abs(b).max())):
        raise InfeasibleError(f"infeasible (phase-1 residual {-T[m, -1]:.3e})")

    # drive remaining artificials out; rows where that fails are redundant
    keep = []
    for i in range(m):
        if basis[i] >= nv:
            cand = np.flatnonzero(np.abs(T[i, :nv]) > 1e-9)
            if cand.size == 0:
                continue
            _pivot(T, basis, i, int(cand[0]))
            pivots += 1
        keep.append(i)
    T = np.vstack([T[keep][:, list(range(nv)) + [T.shape[1] - 1]], np.zeros((1, nv + 1))])
    basis = [basis[i] for i in keep]

    # phase 2
    cost = np.concatenate([-c, np.zeros(n_slack)])
    T[-1, :nv] = cost
    for i, j in enumerate(basis):
        T[-1] -= cost[j] * T[i]
    pivots += _run(T, basis, nv, max_pivots)

    x = np.zeros(nv)
    for i, j in enumerate(basis):
        x[j] = T[i, -1]
    x = np.clip(x[:n], 0.0, None)
    return LPResult(x, float(c @ x), pivots)
