"""Dense linear programming in standard form and affine-dependence reduction.

The solver handles  max c.x  s.t.  A x = b, x >= 0  with a two-phase revised
simplex method.  Returned solutions are always *basic*: at most one strictly
positive entry per equality row.  The covering construction downstream relies
on this sparsity to read simplices off LP solutions, so it is part of the
contract here, not an implementation detail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-9

# Dantzig pricing cycles on degenerate problems; after this many consecutive
# degenerate pivots we switch to Bland's rule, which terminates finitely.
DEGENERATE_PIVOT_LIMIT = 1000


class LPError(ValueError):
    """Malformed linear program."""


@dataclass(frozen=True)
class LinearProgram:
    """max objective.x  s.t.  a_eq x = b_eq, x >= 0."""

    objective: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "objective", np.asarray(self.objective, dtype=float))
        object.__setattr__(self, "a_eq", np.atleast_2d(np.asarray(self.a_eq, dtype=float)))
        object.__setattr__(self, "b_eq", np.asarray(self.b_eq, dtype=float))
        rows, cols = self.a_eq.shape
        if self.b_eq.shape != (rows,):
            raise LPError(f"b_eq has shape {self.b_eq.shape}, expected ({rows},)")
        if self.objective.shape != (cols,):
            raise LPError(f"objective has shape {self.objective.shape}, expected ({cols},)")


@dataclass(frozen=True)
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded" | "failed"
    x: np.ndarray | None = None
    objective: float | None = None
    basis_size: int = 0


def _simplex_phase(A, b, c, basis, maximize_real_objective, tol, iteration_cap):
    """Run simplex pivots from the given basis; returns (status, basis, x_b).

    ``basis`` lists the m basic column indices; the basis matrix must be
    nonsingular and the associated solution feasible (x_b >= 0).
    """
    m, k = A.shape
    degenerate_run = 0
    for _ in range(iteration_cap):
        B = A[:, basis]
        try:
            x_b = np.linalg.solve(B, b)
            y = np.linalg.solve(B.T, c[basis])
        except np.linalg.LinAlgError:
            return "failed", basis, None
        reduced = c - y @ A
        reduced[basis] = 0.0

        use_bland = degenerate_run >= DEGENERATE_PIVOT_LIMIT
        if use_bland:
            candidates = np.nonzero(reduced > tol)[0]
            if candidates.size == 0:
                return "optimal", basis, x_b
            entering = int(candidates[0])
        else:
            entering = int(np.argmax(reduced))
            if reduced[entering] <= tol:
                return "optimal", basis, x_b

        direction = np.linalg.solve(B, A[:, entering])
        positive = direction > tol
        if not positive.any():
            if maximize_real_objective:
                return "unbounded", basis, x_b
            return "failed", basis, x_b  # phase 1 is bounded below by 0
        ratios = np.full(m, np.inf)
        ratios[positive] = x_b[positive] / direction[positive]
        step = ratios.min()
        if use_bland:
            # Smallest basic variable index among the ties (anti-cycling).
            ties = np.nonzero(ratios <= step + tol)[0]
            leaving = int(ties[np.argmin(np.asarray(basis)[ties])])
        else:
            leaving = int(np.argmin(ratios))
        degenerate_run = degenerate_run + 1 if step <= tol else 0
        basis[leaving] = entering
    return "failed", basis, None


def solve_lp(lp: LinearProgram, tol: float = DEFAULT_TOL) -> LPSolution:
    """Two-phase revised simplex.  Optimal solutions are basic.

    Status "failed" reports a numerical failure or hitting the iteration cap
    (50 * (rows + cols) pivots per phase).
    """
    if tol <= 0:
        raise LPError("tolerance must be positive")
    A = lp.a_eq.copy()
    b = lp.b_eq.copy()
    c = lp.objective
    m, k = A.shape
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0
    iteration_cap = 50 * (m + k)

    # Phase 1: artificial columns form the starting basis; minimize their sum.
    A1 = np.hstack([A, np.eye(m)])
    c1 = np.concatenate([np.zeros(k), -np.ones(m)])
    basis = list(range(k, k + m))
    status, basis, x_b = _simplex_phase(A1, b, c1, basis, False, tol, iteration_cap)
    if status != "optimal":
        return LPSolution(status="failed")
    artificial_remaining = sum(x_b[i] for i, j in enumerate(basis) if j >= k)
    scale = 1.0 + float(np.abs(b).max(initial=0.0))
    if artificial_remaining > tol * scale:
        return LPSolution(status="infeasible")

    # Drive leftover artificials out of the basis; rows where no original
    # column can pivot in are redundant and get dropped.
    keep_rows = np.ones(m, dtype=bool)
    B = A1[:, basis]
    for row, col in enumerate(list(basis)):
        if col < k:
            continue
        tableau_row = np.linalg.solve(B, A)[row]
        pivots = np.nonzero(np.abs(tableau_row) > 1e-7)[0]
        pivots = [j for j in pivots if j not in basis]
        if pivots:
            basis[row] = int(pivots[0])
            B = A1[:, basis]
        else:
            keep_rows[row] = False
    if not keep_rows.all():
        A = A[keep_rows]
        b = b[keep_rows]
        basis = [basis[i] for i in range(m) if keep_rows[i]]
        m = A.shape[0]
        if m == 0:
            x = np.zeros(k)
            return LPSolution(status="optimal", x=x, objective=0.0, basis_size=0)

    status, basis, x_b = _simplex_phase(A, b, c, basis, True, tol, iteration_cap)
    if status == "unbounded":
        return LPSolution(status="unbounded")
    if status != "optimal":
        return LPSolution(status="failed")
    x = np.zeros(k)
    x[np.asarray(basis)] = np.maximum(x_b, 0.0)
    return LPSolution(status="optimal", x=x, objective=float(c @ x), basis_size=m)


class InconsistentCombination(ValueError):
    """Input weights do not reproduce the target point."""


def caratheodory_reduce(points, weights, target, tol: float = 1e-9):
    """Reduce a convex combination to an affinely independent sub-combination.

    ``points`` is a sequence of equal-length vectors, ``weights`` positive
    reals summing to 1 with  sum_i weights[i] * points[i] == target.  Returns
    (indices, weights): indices into ``points`` of an affinely independent
    subset of size <= dim + 1, with strictly positive weights that still
    combine to the target.

    Each round finds a kernel vector mu of the stacked (1; point) matrix,
    steps by eta = min(weight_i / mu_i over mu_i > 0) and drops the entries
    that hit zero, until the stacked matrix has full column rank.
    """
    pts = np.asarray(points, dtype=float)
    lam = np.asarray(weights, dtype=float)
    target = np.asarray(target, dtype=float)
    if pts.ndim != 2 or lam.shape != (pts.shape[0],):
        raise InconsistentCombination("points/weights shapes do not match")
    scale = 1.0 + float(np.abs(target).max(initial=0.0))
    if abs(lam.sum() - 1.0) > tol or np.any(lam <= 0):
        raise InconsistentCombination("weights must be positive and sum to 1")
    if np.max(np.abs(lam @ pts - target), initial=0.0) > tol * scale:
        raise InconsistentCombination("weights do not reproduce the target")

    indices = list(range(pts.shape[0]))
    while True:
        stacked = np.vstack([np.ones(len(indices)), pts[indices].T])
        u, s, vt = np.linalg.svd(stacked)
        rank = int(np.sum(s > 1e-10 * (s[0] if s.size else 1.0)))
        if rank >= len(indices):
            return indices, lam[indices]
        mu = vt[-1]
        if not np.any(mu > 1e-14):
            mu = -mu
        sub = lam[indices]
        positive = mu > 1e-14
        eta = np.min(sub[positive] / mu[positive])
        sub = sub - eta * mu
        sub[sub < 1e-14] = 0.0
        for idx, value in zip(indices, sub):
            lam[idx] = value
        indices = [idx for idx, value in zip(indices, sub) if value > 0.0]
