"""Geometric programs in standard form and an embedded interior-point solver.

A geometric program minimizes a posynomial subject to posynomial <= 1 and
monomial == 1 constraints over strictly positive variables.  Substituting
y = log x turns posynomials into log-sum-exp functions and monomial
equalities into affine equalities, which yields a smooth convex problem.

The solver eliminates the affine equalities through a nullspace
parametrization, finds a strictly feasible point with a phase-one slack
program when the caller does not supply one, and then runs a damped-Newton
log-barrier method.  Everything is dense numpy; problem sizes here are at
most a few thousand variables.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_TOL = 1e-7

# Iteration budget across all centering steps; exceeding it downgrades the
# result to "inaccurate" with the reached residual.
DEFAULT_MAX_NEWTON = 200

_MAX_STEPS_PER_CENTER = 60
_EARLY_FEASIBLE_MARGIN = 1e-6
_UNBOUNDED_LOG = -500.0

# Newton steps are capped at this euclidean length in log space (one unit is
# a factor e in a variable); far from the optimum the quadratic model is
# untrustworthy and uncapped steps can jump to absurd iterates.
_MAX_STEP_NORM = 10.0


class GPError(ValueError):
    """Malformed geometric program."""


@dataclass(frozen=True)
class Monomial:
    """coefficient * prod_i x_i^exponents[i] with a positive coefficient."""

    coefficient: float
    exponents: tuple[float, ...]

    def __post_init__(self):
        if not self.coefficient > 0:
            raise GPError(f"monomial coefficient must be positive, got {self.coefficient}")
        object.__setattr__(self, "exponents", tuple(float(e) for e in self.exponents))


Posynomial = tuple[Monomial, ...]


@dataclass(frozen=True)
class GeometricProgram:
    """min objective  s.t.  each inequality posynomial <= 1, each equality
    monomial == 1, variables > 0.  An empty objective means the constant 0
    (pure feasibility)."""

    num_vars: int
    objective: Posynomial
    inequalities: tuple[Posynomial, ...] = ()
    equalities: tuple[Monomial, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "objective", tuple(self.objective))
        object.__setattr__(self, "inequalities", tuple(tuple(q) for q in self.inequalities))
        object.__setattr__(self, "equalities", tuple(self.equalities))
        for posy in (self.objective, *self.inequalities):
            for mono in posy:
                if len(mono.exponents) != self.num_vars:
                    raise GPError("monomial arity does not match variable count")
        for posy in self.inequalities:
            if not posy:
                raise GPError("inequality posynomials must be non-empty")
        for mono in self.equalities:
            if len(mono.exponents) != self.num_vars:
                raise GPError("monomial arity does not match variable count")


@dataclass(frozen=True)
class GPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded" | "inaccurate"
    x: np.ndarray | None = None
    value: float | None = None
    kkt_residual: float = np.inf
    newton_steps: int = 0


@dataclass(frozen=True)
class FeasibilityResult:
    status: str  # "feasible" | "infeasible" | "inaccurate"
    x: np.ndarray | None = None
    slack: float = np.inf  # phase-one optimum; feasible iff <= 1 + tol


class LogSumExp:
    """f(y) = log sum_k exp(matrix[k] . y + offsets[k]); smooth and convex."""

    def __init__(self, matrix: np.ndarray, offsets: np.ndarray):
        self.matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
        self.offsets = np.asarray(offsets, dtype=float)

    def value(self, y: np.ndarray) -> float:
        w = self.matrix @ y + self.offsets
        top = w.max()
        return float(top + np.log(np.exp(w - top).sum()))

    def value_grad(self, y: np.ndarray):
        w = self.matrix @ y + self.offsets
        top = w.max()
        e = np.exp(w - top)
        total = e.sum()
        value = float(top + np.log(total))
        softmax = e / total
        return value, self.matrix.T @ softmax

    def value_grad_hess(self, y: np.ndarray):
        w = self.matrix @ y + self.offsets
        top = w.max()
        e = np.exp(w - top)
        total = e.sum()
        value = float(top + np.log(total))
        softmax = e / total
        grad = self.matrix.T @ softmax
        hess = self.matrix.T @ (softmax[:, None] * self.matrix) - np.outer(grad, grad)
        return value, grad, hess

    def compose_affine(self, basis: np.ndarray, shift: np.ndarray) -> "LogSumExp":
        """The function z -> f(shift + basis z)."""
        return LogSumExp(self.matrix @ basis, self.matrix @ shift + self.offsets)

    def shifted(self, amount: float) -> "LogSumExp":
        """The function f - amount (relaxes a constraint f <= 0)."""
        return LogSumExp(self.matrix, self.offsets - amount)

    def with_extra_variable(self, coefficient: float) -> "LogSumExp":
        """Extend the domain by one variable entering every term linearly."""
        column = np.full((self.matrix.shape[0], 1), coefficient)
        return LogSumExp(np.hstack([self.matrix, column]), self.offsets)


@dataclass(frozen=True)
class LogConvexProgram:
    """Log-domain form: minimize objective (None = constant) subject to
    each inequality <= 0 and eq_matrix y = eq_rhs."""

    num_vars: int
    objective: LogSumExp | None
    inequalities: tuple[LogSumExp, ...]
    eq_matrix: np.ndarray
    eq_rhs: np.ndarray


def _posynomial_lse(posy: Posynomial) -> LogSumExp:
    matrix = np.array([m.exponents for m in posy], dtype=float)
    offsets = np.log([m.coefficient for m in posy])
    return LogSumExp(matrix, offsets)


def to_log_convex(gp: GeometricProgram) -> LogConvexProgram:
    """Substitute y = log x.

    Posynomials become log-sum-exp expressions (constraints read <= 0), the
    objective becomes the log of the posynomial value, and each monomial
    equality c * x^a = 1 becomes the affine row a . y = -log c.
    """
    objective = _posynomial_lse(gp.objective) if gp.objective else None
    inequalities = tuple(_posynomial_lse(q) for q in gp.inequalities)
    if gp.equalities:
        eq_matrix = np.array([m.exponents for m in gp.equalities], dtype=float)
        eq_rhs = -np.log([m.coefficient for m in gp.equalities])
    else:
        eq_matrix = np.zeros((0, gp.num_vars))
        eq_rhs = np.zeros(0)
    return LogConvexProgram(
        num_vars=gp.num_vars,
        objective=objective,
        inequalities=inequalities,
        eq_matrix=eq_matrix,
        eq_rhs=eq_rhs,
    )


def _equality_parametrization(eq_matrix, eq_rhs, num_vars, tol):
    """Particular solution and orthonormal nullspace basis of E y = d.

    Returns (y_particular, nullspace) or None when the system is
    inconsistent.
    """
    if eq_matrix.shape[0] == 0:
        return np.zeros(num_vars), np.eye(num_vars)
    y_p, *_ = np.linalg.lstsq(eq_matrix, eq_rhs, rcond=None)
    scale = 1.0 + float(np.abs(eq_rhs).max(initial=0.0))
    if np.max(np.abs(eq_matrix @ y_p - eq_rhs)) > 1e-8 * scale:
        return None
    _, s, vt = np.linalg.svd(eq_matrix)
    cutoff = max(eq_matrix.shape) * np.finfo(float).eps * (s[0] if s.size else 1.0)
    rank = int(np.sum(s > cutoff))
    return y_p, vt[rank:].T


class _BarrierState:
    """Damped-Newton minimization of t*f0(z) + sum_i -log(-f_i(z))."""

    def __init__(self, objective: LogSumExp | None, inequalities: Sequence[LogSumExp]):
        self.objective = objective
        self.inequalities = list(inequalities)
        self.steps = 0

    def constraint_values(self, z):
        return np.array([f.value(z) for f in self.inequalities])

    def strictly_feasible(self, z, margin=0.0):
        return all(f.value(z) < -margin for f in self.inequalities)

    def barrier_value(self, z, t):
        total = 0.0
        if self.objective is not None:
            total += t * self.objective.value(z)
        for f in self.inequalities:
            v = f.value(z)
            if v >= 0:
                return np.inf
            total -= np.log(-v)
        return total

    def barrier_grad_hess(self, z, t):
        dim = z.size
        grad = np.zeros(dim)
        hess = np.zeros((dim, dim))
        f0 = 0.0
        if self.objective is not None:
            f0, g0, h0 = self.objective.value_grad_hess(z)
            grad += t * g0
            hess += t * h0
        for f in self.inequalities:
            v, g, h = f.value_grad_hess(z)
            if v >= 0:
                return None
            grad += g / (-v)
            hess += h / (-v) + np.outer(g, g) / (v * v)
        return f0, grad, hess

    def center(self, z, t, step_budget, early_stop=None):
        """Newton iterations at fixed t.  Returns (z, outcome) with outcome
        one of "centered", "early", "budget", "unbounded", "stalled"."""
        for _ in range(min(step_budget, _MAX_STEPS_PER_CENTER)):
            if early_stop is not None and early_stop(z):
                return z, "early"
            data = self.barrier_grad_hess(z, t)
            if data is None:
                return z, "stalled"
            f0, grad, hess = data
            if self.objective is not None and f0 < _UNBOUNDED_LOG:
                return z, "unbounded"
            step = self._newton_step(hess, grad)
            if step is None:
                return z, "stalled"
            decrement_sq = float(-grad @ step)
            self.steps += 1
            if decrement_sq / 2.0 <= 1e-11 * (1.0 + abs(f0) * t):
                return z, "centered"
            norm = float(np.linalg.norm(step))
            if norm > _MAX_STEP_NORM:
                step = step * (_MAX_STEP_NORM / norm)
            z_new = self._line_search(z, t, step, grad)
            if z_new is None:
                return z, "stalled"
            z = z_new
        return z, "budget"

    @staticmethod
    def _newton_step(hess, grad):
        ridge = 0.0
        eye = np.eye(hess.shape[0])
        base = 1e-12 * (1.0 + float(np.trace(hess)) / hess.shape[0])
        for _ in range(8):
            try:
                chol = np.linalg.cholesky(hess + ridge * eye)
            except np.linalg.LinAlgError:
                ridge = base if ridge == 0.0 else ridge * 100.0
                continue
            w = np.linalg.solve(chol, -grad)
            return np.linalg.solve(chol.T, w)
        return None

    def _line_search(self, z, t, step, grad, alpha=0.25, beta=0.5):
        base = self.barrier_value(z, t)
        slope = float(grad @ step)
        s = 1.0
        for _ in range(60):
            candidate = z + s * step
            value = self.barrier_value(candidate, t)
            if np.isfinite(value) and value <= base + alpha * s * slope:
                return candidate
            s *= beta
        return None


def _phase_one(inequalities, z0, tol, step_budget):
    """Minimize a shared slack sigma with f_i(z) - sigma <= 0.

    Returns (z, sigma, outcome): outcome "strict" when a point with margin
    was found early, "done" when converged, "budget" on iteration cap.
    ``sigma`` is the best value of max_i f_i seen.
    """
    augmented = [f.with_extra_variable(-1.0) for f in inequalities]
    dim = z0.size
    objective = LogSumExp(np.concatenate([np.zeros(dim), [1.0]])[None, :], np.zeros(1))
    state = _BarrierState(objective, augmented)

    values = np.array([f.value(z0) for f in inequalities])
    sigma0 = float(values.max()) + 1.0
    z = np.concatenate([z0, [sigma0]])

    def early_stop(z_aug):
        worst = max(f.value(z_aug[:dim]) for f in inequalities)
        return worst <= -_EARLY_FEASIBLE_MARGIN

    t = 1.0
    outcome = "done"
    while state.steps < step_budget:
        z, status = state.center(z, t, step_budget - state.steps, early_stop=early_stop)
        if status == "early":
            outcome = "strict"
            break
        if status == "budget":
            outcome = "budget"
            break
        # One slack variable and len(inequalities) barrier terms: gap bound.
        if (len(augmented)) / t <= tol / 2:
            break
        t *= 20.0
    sigma = max(f.value(z[:dim]) for f in inequalities)
    return z[:dim], float(sigma), outcome, state.steps


def _solve_reduced(objective, inequalities, z0, tol, step_budget):
    """Barrier method from a strictly feasible z0.  Returns a dict with the
    final point and convergence data."""
    state = _BarrierState(objective, inequalities)
    m = len(inequalities)
    z = z0
    status = "optimal"
    if m == 0:
        z, outcome = state.center(z, 1.0, step_budget)
        if outcome == "unbounded":
            return {"z": z, "status": "unbounded", "steps": state.steps, "t": 1.0}
        if outcome == "budget":
            status = "inaccurate"
        return {"z": z, "status": status, "steps": state.steps, "t": np.inf}
    t = 1.0
    while True:
        z, outcome = state.center(z, t, step_budget - state.steps)
        if outcome == "unbounded":
            return {"z": z, "status": "unbounded", "steps": state.steps, "t": t}
        if outcome == "budget" or (outcome == "stalled" and m / t > tol / 2):
            status = "inaccurate"
            break
        if m / t <= tol / 2:
            break
        t *= 20.0
    return {"z": z, "status": status, "steps": state.steps, "t": t}


def _kkt_residual(objective, inequalities, z, t):
    """Scaled stationarity + duality-gap residual at the final iterate."""
    m = len(inequalities)
    if objective is None:
        return 0.0 if m == 0 else m / t
    _, g0 = objective.value_grad(z)
    stationarity = g0.copy()
    for f in inequalities:
        v, g = f.value_grad(z)
        if v >= 0:
            return np.inf
        stationarity += g / (t * (-v))
    scale = max(1.0, float(np.abs(g0).max(initial=0.0)))
    gap = m / t if np.isfinite(t) else 0.0
    return max(float(np.abs(stationarity).max(initial=0.0)) / scale, gap)


def solve_gp(gp: GeometricProgram,
             tol: float = DEFAULT_TOL,
             start: np.ndarray | None = None,
             max_newton: int = DEFAULT_MAX_NEWTON) -> GPSolution:
    """Solve a geometric program to relative accuracy ``tol``.

    ``start``, when given, must be strictly positive; if it satisfies the
    constraints strictly the phase-one stage is skipped.  Deterministic for
    identical inputs.  Status "inaccurate" reports the reached KKT residual
    after hitting the iteration cap; callers decide whether to use it.
    """
    if tol <= 0:
        raise GPError("tolerance must be positive")
    lcp = to_log_convex(gp)
    param = _equality_parametrization(lcp.eq_matrix, lcp.eq_rhs, gp.num_vars, tol)
    if param is None:
        return GPSolution(status="infeasible")
    y_p, basis = param

    objective = lcp.objective.compose_affine(basis, y_p) if lcp.objective else None
    inequalities = [f.compose_affine(basis, y_p) for f in lcp.inequalities]

    def finish(z, status, steps, t, relaxation=0.0):
        y = y_p + basis @ z
        x = np.exp(y)
        value = float(np.exp(objective.value(z))) if objective is not None else 0.0
        residual = _kkt_residual(objective, inequalities, z, t)
        worst = max((f.value(z) for f in inequalities), default=-np.inf)
        if status == "optimal" and (residual > tol or worst > tol):
            status = "inaccurate"
        return GPSolution(status=status, x=x, value=value,
                          kkt_residual=max(residual, relaxation if relaxation > tol else 0.0),
                          newton_steps=steps)

    if basis.shape[1] == 0:
        # Equalities pin the point; only feasibility remains to check.
        worst = max((f.value(np.zeros(0)) for f in inequalities), default=-np.inf)
        if worst > tol:
            return GPSolution(status="infeasible")
        return finish(np.zeros(0), "optimal", 0, np.inf)

    if start is not None:
        start = np.asarray(start, dtype=float)
        if start.shape != (gp.num_vars,) or not np.all(start > 0):
            raise GPError("start must be a strictly positive vector of GP variables")
        z0 = basis.T @ (np.log(start) - y_p)
    else:
        z0 = basis.T @ (-y_p)

    steps_used = 0
    relaxation = 0.0
    feasible_values = [f.value(z0) for f in inequalities]
    if inequalities and max(feasible_values) >= 0.0:
        z0, sigma, outcome, steps = _phase_one(inequalities, z0, tol, max_newton)
        steps_used += steps
        if sigma > tol:
            return GPSolution(status="infeasible", kkt_residual=float(sigma))
        if sigma > -1e-12:
            # Feasible set has (numerically) empty interior: relax slightly,
            # optimize, and report the relaxation through the residual.
            relaxation = sigma + 10 * tol
            inequalities = [f.shifted(relaxation) for f in inequalities]

    result = _solve_reduced(objective, inequalities, z0, tol,
                            max(1, max_newton - steps_used))
    if result["status"] == "unbounded":
        return GPSolution(status="unbounded", newton_steps=steps_used + result["steps"])
    if relaxation:
        inequalities = [f.shifted(-relaxation) for f in inequalities]
    return finish(result["z"], result["status"], steps_used + result["steps"],
                  result["t"], relaxation=relaxation)


def check_feasibility(gp: GeometricProgram,
                      tol: float = DEFAULT_TOL,
                      max_newton: int = DEFAULT_MAX_NEWTON) -> FeasibilityResult:
    """Phase-one feasibility check of a GP's constraint set.

    Minimizes a slack scaling of the inequality right-hand sides while the
    monomial equalities are enforced exactly; the constraints are feasible
    iff the optimal slack is at most 1 + tol.
    """
    lcp = to_log_convex(gp)
    param = _equality_parametrization(lcp.eq_matrix, lcp.eq_rhs, gp.num_vars, tol)
    if param is None:
        return FeasibilityResult(status="infeasible")
    y_p, basis = param
    inequalities = [f.compose_affine(basis, y_p) for f in lcp.inequalities]

    def point(z):
        return np.exp(y_p + basis @ z)

    if basis.shape[1] == 0:
        worst = max((f.value(np.zeros(0)) for f in inequalities), default=-np.inf)
        slack = float(np.exp(max(worst, 0.0)))
        if worst > tol:
            return FeasibilityResult(status="infeasible", slack=slack)
        return FeasibilityResult(status="feasible", x=point(np.zeros(0)), slack=slack)

    z0 = basis.T @ (-y_p)
    if not inequalities or max(f.value(z0) for f in inequalities) < 0:
        return FeasibilityResult(status="feasible", x=point(z0), slack=1.0)
    z, sigma, outcome, _ = _phase_one(inequalities, z0, tol, max_newton)
    slack = float(np.exp(max(sigma, 0.0)))
    if sigma <= tol:
        return FeasibilityResult(status="feasible", x=point(z), slack=slack)
    if outcome == "budget" and sigma <= 1e-4:
        return FeasibilityResult(status="inaccurate", x=point(z), slack=slack)
    return FeasibilityResult(status="infeasible", x=None, slack=slack)
