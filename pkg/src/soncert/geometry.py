"""Support geometry: polytope vertices, simplex covers, barycentric coords.

All operations work on the exponent set of a canonical sparse polynomial.
Points are identified by their index into the polynomial's support; index 0
is always the constant term (the origin), which the canonical ordering puts
first.  Lower-dimensional simplices are allowed throughout; "interior" then
means relative interior.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .lp import LinearProgram, LPSolution, caratheodory_reduce, solve_lp
from .poly import Exponent, SparsePolynomial, SupportClassification, classify_support

# A barycentric coordinate above this counts as strictly positive.  Lattice
# inputs make true boundary cases exact, so the threshold only absorbs float
# noise from the linear solves.
INTERIOR_TOL = 1e-9

HULL_RESIDUAL_TOL = 1e-9


class GeometryError(RuntimeError):
    """Numerical failure in an underlying LP or linear solve."""


class AffineHullError(ValueError):
    """Point does not lie in the affine hull of the given vertices."""


class UncoverablePointError(ValueError):
    """A point that must be covered lies outside the convex hull of the
    candidate vertices."""

    def __init__(self, point: Exponent):
        super().__init__(f"point {point} is not in the convex hull of the monomial squares")
        self.point = point


@dataclass(frozen=True)
class CoverSimplex:
    """One simplex of a cover.

    ``vertex_indices`` point at monomial squares of the polynomial and are
    affinely independent; ``covered_indices`` are the non-squares in the
    simplex's relative interior.  ``lam`` holds the barycentric coordinates,
    one column per covered point, rows aligned with ``vertex_indices``.
    """

    vertex_indices: tuple[int, ...]
    covered_indices: tuple[int, ...]
    lam: np.ndarray
    contains_origin: bool


@dataclass(frozen=True)
class Cover:
    simplices: tuple[CoverSimplex, ...]
    degenerate_indices: frozenset[int]


def barycentric_coordinates(vertex_exponents, point, tol: float = HULL_RESIDUAL_TOL):
    """Coordinates of ``point`` relative to affinely independent vertices.

    Returns (lam, strictly_interior).  Raises AffineHullError when the point
    is not in the affine hull of the vertices.
    """
    vertices = np.asarray(vertex_exponents, dtype=float)
    target = np.asarray(point, dtype=float)
    stacked = np.vstack([np.ones(len(vertices)), vertices.T])
    rhs = np.concatenate([[1.0], target])
    lam, *_ = np.linalg.lstsq(stacked, rhs, rcond=None)
    scale = 1.0 + float(np.abs(rhs).max())
    if np.max(np.abs(stacked @ lam - rhs)) > tol * scale:
        raise AffineHullError(
            f"point {tuple(point)} is outside the affine hull of the vertices")
    return lam, bool(np.all(lam > INTERIOR_TOL))


def _extremal_lp(point, others) -> LinearProgram:
    others = np.asarray(others, dtype=float)
    return LinearProgram(
        objective=np.zeros(len(others)),
        a_eq=np.vstack([others.T, np.ones(len(others))]),
        b_eq=np.concatenate([np.asarray(point, dtype=float), [1.0]]),
    )


def compute_vertices(p: SparsePolynomial, tol: float = 1e-9) -> frozenset[int]:
    """Indices of support points that are vertices of the Newton polytope.

    A point is extremal iff it cannot be written as a convex combination of
    the remaining support points, decided by one feasibility LP per point.
    """
    exponents = p.exponent_array().astype(float)
    vertices = set()
    for i in range(p.t):
        others = np.delete(exponents, i, axis=0)
        if others.shape[0] == 0:
            vertices.add(i)
            continue
        sol = solve_lp(_extremal_lp(exponents[i], others), tol=tol)
        if sol.status == "infeasible":
            vertices.add(i)
        elif sol.status != "optimal":
            raise GeometryError(f"vertex LP for point {p.exponents[i]} returned {sol.status}")
    return frozenset(vertices)


def point_in_hull(point, points, tol: float = 1e-9) -> bool:
    """Non-strict membership of ``point`` in conv(points)."""
    sol = solve_lp(_extremal_lp(point, points), tol=tol)
    if sol.status == "optimal":
        return True
    if sol.status == "infeasible":
        return False
    raise GeometryError(f"hull membership LP returned {sol.status}")


def point_in_relative_interior(point, points, tol: float = 1e-9) -> bool:
    """Membership of ``point`` in relint(conv(points)).

    Solves  max delta  s.t. the point is a convex combination with every
    weight >= delta; the point is in the relative interior iff delta > 0.
    """
    pts = np.asarray(points, dtype=float)
    k, n = pts.shape
    # Variables: k surplus weights s_v >= 0 and delta >= 0 with
    # lambda_v = s_v + delta.
    a_eq = np.zeros((n + 1, k + 1))
    a_eq[:n, :k] = pts.T
    a_eq[:n, k] = pts.sum(axis=0)
    a_eq[n, :k] = 1.0
    a_eq[n, k] = float(k)
    objective = np.zeros(k + 1)
    objective[k] = 1.0
    lp = LinearProgram(objective=objective, a_eq=a_eq,
                       b_eq=np.concatenate([np.asarray(point, dtype=float), [1.0]]))
    sol = solve_lp(lp, tol=tol)
    if sol.status == "infeasible":
        return False
    if sol.status != "optimal":
        raise GeometryError(f"relative interior LP returned {sol.status}")
    return sol.objective is not None and sol.objective > INTERIOR_TOL


def interior_support_indices(p: SparsePolynomial) -> frozenset[int]:
    """Support indices lying in the relative interior of the Newton polytope."""
    exponents = p.exponent_array().astype(float)
    return frozenset(
        i for i in range(p.t)
        if point_in_relative_interior(exponents[i], exponents)
    )


def refine_classification(p: SparsePolynomial,
                          cls: SupportClassification | None = None) -> SupportClassification:
    """Fill the vertex and interior index sets of a support classification."""
    if cls is None:
        cls = classify_support(p)
    return replace(cls, vertices=compute_vertices(p), interior=interior_support_indices(p))


def lphull(u, squares, tol: float = 1e-9) -> LPSolution:
    """Convex-combination LP for ``u`` over the square points.

    Maximizes the weight of the origin among all representations of ``u`` as
    a convex combination, which biases covers toward simplices containing
    the origin.  Infeasible iff ``u`` is outside conv(squares).
    """
    squares = np.asarray(squares, dtype=float)
    origin_rows = np.nonzero(~squares.any(axis=1))[0]
    if origin_rows.size == 0:
        raise ValueError("the square points must contain the origin")
    objective = np.zeros(len(squares))
    objective[origin_rows[0]] = 1.0
    lp = LinearProgram(
        objective=objective,
        a_eq=np.vstack([squares.T, np.ones(len(squares))]),
        b_eq=np.concatenate([np.asarray(u, dtype=float), [1.0]]),
    )
    return solve_lp(lp, tol=tol)


def _affinely_independent(points) -> bool:
    pts = np.asarray(points, dtype=float)
    stacked = np.vstack([np.ones(len(pts)), pts.T])
    singular = np.linalg.svd(stacked, compute_uv=False)
    cutoff = 1e-10 * (singular[0] if singular.size else 1.0)
    return int(np.sum(singular > cutoff)) == len(pts)


def cover(p: SparsePolynomial,
          cls: SupportClassification | None = None,
          tol: float = 1e-9) -> Cover:
    """Cover every non-square support point by a simplex of square points.

    Repeatedly picks the lexicographically smallest uncovered exponent,
    solves the origin-biased hull LP to obtain a simplex of monomial squares
    containing it (reducing the support by Caratheodory if the solution is
    affinely dependent), and marks every non-square in that simplex's
    relative interior as covered.  The result has at most one simplex per
    non-square point.
    """
    if cls is None:
        cls = classify_support(p)
    exponents = p.exponent_array().astype(float)
    square_indices = sorted(cls.mono_squares)
    square_exponents = exponents[square_indices]
    non_square_indices = sorted(cls.non_squares)

    for i in non_square_indices:
        if not point_in_hull(exponents[i], square_exponents, tol=tol):
            raise UncoverablePointError(p.exponents[i])

    uncovered = set(non_square_indices)
    simplices = []
    while uncovered:
        u_idx = min(uncovered, key=lambda i: p.exponents[i])
        sol = lphull(exponents[u_idx], square_exponents, tol=tol)
        if sol.status == "infeasible":
            raise UncoverablePointError(p.exponents[u_idx])
        if sol.status != "optimal" or sol.x is None:
            raise GeometryError(f"hull LP returned {sol.status}")
        positive = np.nonzero(sol.x > tol)[0]
        weights = sol.x[positive]
        if not _affinely_independent(square_exponents[positive]):
            kept, _ = caratheodory_reduce(
                square_exponents[positive], weights / weights.sum(), exponents[u_idx])
            positive = positive[kept]
        vertex_indices = tuple(square_indices[j] for j in positive)
        vertex_exponents = square_exponents[positive]

        covered = []
        columns = []
        for j in non_square_indices:
            try:
                lam, interior = barycentric_coordinates(vertex_exponents, exponents[j])
            except AffineHullError:
                continue
            if interior:
                covered.append(j)
                columns.append(lam)
        if u_idx not in covered:
            raise GeometryError(
                f"covering simplex for {p.exponents[u_idx]} does not contain it strictly")
        simplices.append(CoverSimplex(
            vertex_indices=vertex_indices,
            covered_indices=tuple(covered),
            lam=np.column_stack(columns),
            contains_origin=0 in vertex_indices,
        ))
        uncovered -= set(covered)

    simplex_tuple = tuple(simplices)
    return Cover(
        simplices=simplex_tuple,
        degenerate_indices=find_degenerate_points(p, simplex_tuple, cls=cls),
    )


def find_degenerate_points(p: SparsePolynomial,
                           simplices: tuple[CoverSimplex, ...],
                           cls: SupportClassification | None = None) -> frozenset[int]:
    """Non-square boundary points covered by some simplex missing the origin.

    Such points cannot be helped by raising the constant term, which is what
    makes them problematic for the bound computation.
    """
    if cls is None:
        cls = classify_support(p)
    boundary = cls.non_squares - interior_support_indices(p)
    if not boundary:
        return frozenset()
    flagged = set()
    for simplex in simplices:
        if simplex.contains_origin:
            continue
        flagged.update(set(simplex.covered_indices) & boundary)
    return frozenset(flagged)
