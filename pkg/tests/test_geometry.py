import itertools

import numpy as np
import pytest

from soncert.geometry import (
    AffineHullError,
    UncoverablePointError,
    barycentric_coordinates,
    compute_vertices,
    cover,
    find_degenerate_points,
    interior_support_indices,
    lphull,
    point_in_hull,
    point_in_relative_interior,
    refine_classification,
)
from soncert.poly import classify_support, make_polynomial, parse_polynomial, scale_exponents

EXAMPLE_4_1 = ("1 + 3*x0^2*x1^6 + 2*x0^6*x1^2 + 6*x0^2*x1^2"
               " - 1*x0^1*x1^2 - 2*x0^2*x1^1 - 3*x0^3*x1^3")
EXAMPLE_3_7 = "x0^2 - 2*x0*x1 + x1^2 - 2*x0 - 2*x1 + 1"


def support_from_exponents(exponents):
    """Polynomial with the given support and all-ones coefficients."""
    n = len(exponents[0])
    return make_polynomial(n, [(e, 1.0) for e in exponents])


def exponent_set(p, indices):
    return {p.exponents[i] for i in indices}


def test_vertices_square_with_midpoint():
    p = support_from_exponents([(0, 0), (2, 0), (0, 2), (1, 1)])
    assert exponent_set(p, compute_vertices(p)) == {(0, 0), (2, 0), (0, 2)}


def test_vertices_seven_term_example():
    p = parse_polynomial(EXAMPLE_4_1)
    vertices = exponent_set(p, compute_vertices(p))
    assert vertices == {(0, 0), (2, 6), (6, 2)}
    interior = exponent_set(p, interior_support_indices(p))
    assert (2, 2) in interior


def test_vertices_single_point():
    p = make_polynomial(2, [((0, 0), 1.0)])
    assert compute_vertices(p) == frozenset({0})


def enumerate_basic_lphull_optimum(u, squares):
    """Oracle for the hull LP: enumerate all basic feasible solutions of the
    (n+1)-row system and take the best origin weight."""
    squares = np.asarray(squares, dtype=float)
    rows = squares.shape[1] + 1
    A = np.vstack([squares.T, np.ones(len(squares))])
    rhs = np.concatenate([np.asarray(u, dtype=float), [1.0]])
    origin = next(i for i, s in enumerate(squares) if not s.any())
    best = None
    for cols in itertools.combinations(range(len(squares)), min(rows, len(squares))):
        sub = A[:, cols]
        lam, *_ = np.linalg.lstsq(sub, rhs, rcond=None)
        if np.max(np.abs(sub @ lam - rhs)) > 1e-9 or np.any(lam < -1e-9):
            continue
        value = lam[cols.index(origin)] if origin in cols else 0.0
        best = value if best is None else max(best, value)
    return best


def test_lphull_prefers_origin_heavy_combination():
    squares = [(0, 0), (2, 0), (0, 2), (2, 2)]
    sol = lphull((1, 1), squares)
    assert sol.status == "optimal"
    assert sol.objective == pytest.approx(0.5, abs=1e-9)
    assert sol.objective == pytest.approx(
        enumerate_basic_lphull_optimum((1, 1), squares), abs=1e-9)


def test_lphull_seven_term_squares():
    squares = [(0, 0), (2, 6), (6, 2), (2, 2)]
    sol = lphull((3, 3), squares)
    assert sol.status == "optimal"
    oracle = enumerate_basic_lphull_optimum((3, 3), squares)
    assert sol.objective == pytest.approx(oracle, abs=1e-9)


def test_lphull_infeasible_outside_hull():
    sol = lphull((3, 0), [(0, 0), (0, 2), (2, 2)])
    assert sol.status == "infeasible"


def test_lphull_requires_origin():
    with pytest.raises(ValueError):
        lphull((1, 1), [(2, 0), (0, 2)])


def test_barycentric_interior():
    lam, interior = barycentric_coordinates([(0, 0), (2, 6), (6, 2)], (2, 2))
    assert np.allclose(lam, [0.5, 0.25, 0.25], atol=1e-12)
    assert interior


def test_barycentric_edge_midpoint_not_interior():
    lam, interior = barycentric_coordinates([(0, 0), (2, 0), (0, 2)], (1, 1))
    assert np.allclose(lam, [0.0, 0.5, 0.5], atol=1e-12)
    assert not interior


def test_barycentric_vertex_not_interior():
    lam, interior = barycentric_coordinates([(0, 0), (2, 6), (6, 2)], (2, 6))
    assert np.allclose(lam, [0.0, 1.0, 0.0], atol=1e-12)
    assert not interior


def test_barycentric_outside_affine_hull():
    with pytest.raises(AffineHullError):
        barycentric_coordinates([(0, 0), (0, 2)], (1, 1))


def cover_as_point_sets(p, c):
    """Each simplex as the set of exponents of its vertices and covered points."""
    return {
        frozenset(p.exponents[i] for i in s.vertex_indices)
        | frozenset(p.exponents[i] for i in s.covered_indices)
        for s in c.simplices
    }


def test_cover_degenerate_example_matches_unique_covering():
    p = parse_polynomial(EXAMPLE_3_7)
    c = cover(p)
    assert cover_as_point_sets(p, c) == {
        frozenset({(0, 2), (1, 1), (2, 0)}),
        frozenset({(2, 0), (1, 0), (0, 0)}),
        frozenset({(0, 2), (0, 1), (0, 0)}),
    }


def test_cover_empty_when_no_non_squares():
    p = parse_polynomial("1 + x0^2 + x0^2*x1^2")
    c = cover(p)
    assert c.simplices == ()
    assert c.degenerate_indices == frozenset()


def test_cover_single_simplex():
    p = parse_polynomial("1 + x0^4 + x1^4 - 3*x0*x1")
    c = cover(p)
    assert len(c.simplices) == 1
    simplex = c.simplices[0]
    assert exponent_set(p, simplex.vertex_indices) == {(0, 0), (4, 0), (0, 4)}
    assert exponent_set(p, simplex.covered_indices) == {(1, 1)}
    assert simplex.contains_origin


def test_cover_uncoverable_point():
    # (3, 0) lies outside the hull of the squares.
    p = make_polynomial(2, [((0, 0), 1.0), ((0, 2), 1.0), ((2, 2), 1.0), ((3, 0), -1.0)])
    with pytest.raises(UncoverablePointError):
        cover(p)


def check_cover_invariants(p, c, cls=None):
    if cls is None:
        cls = classify_support(p)
    covered_union = set()
    exponents = p.exponent_array().astype(float)
    for simplex in c.simplices:
        vertex_set = set(simplex.vertex_indices)
        assert vertex_set <= cls.mono_squares
        vertices = exponents[list(simplex.vertex_indices)]
        stacked = np.vstack([np.ones(len(vertices)), vertices.T])
        assert np.linalg.matrix_rank(stacked, tol=1e-10) == len(vertices)
        assert len(vertices) <= p.n + 1
        assert simplex.lam.shape == (len(simplex.vertex_indices), len(simplex.covered_indices))
        for col, j in enumerate(simplex.covered_indices):
            lam = simplex.lam[:, col]
            assert np.all(lam > 0)
            assert lam.sum() == pytest.approx(1.0, abs=1e-9)
            assert np.max(np.abs(lam @ vertices - exponents[j])) <= 1e-9
        covered_union.update(simplex.covered_indices)
    assert covered_union == set(cls.non_squares)
    assert len(c.simplices) <= max(1, len(cls.non_squares))


def test_cover_invariants_on_fixtures():
    for text in (EXAMPLE_4_1, EXAMPLE_3_7, "1 + x0^4 + x1^4 - 3*x0*x1"):
        p = parse_polynomial(text)
        check_cover_invariants(p, cover(p))


def test_cover_invariants_random_supports():
    rng = np.random.default_rng(5)
    produced = 0
    attempts = 0
    while produced < 15 and attempts < 200:
        attempts += 1
        n = int(rng.integers(2, 4))
        terms = [((0,) * n, 1.0)]
        for _ in range(int(rng.integers(2, 5))):
            terms.append((tuple(2 * rng.integers(0, 4, size=n)), 1.0))
        p_squares = make_polynomial(n, terms)
        squares = p_squares.exponent_array().astype(float)
        candidates = []
        for _ in range(int(rng.integers(1, 4))):
            point = tuple(rng.integers(0, 7, size=n))
            if point not in p_squares.exponents and point_in_hull(point, squares):
                candidates.append(point)
        if not candidates:
            continue
        terms += [(pt, -1.0) for pt in set(candidates)]
        p = make_polynomial(n, terms)
        cls = classify_support(p)
        if not cls.non_squares:
            continue
        check_cover_invariants(p, cover(p, cls), cls)
        produced += 1
    assert produced >= 10


def test_cover_scaling_invariance():
    for text in (EXAMPLE_4_1, "1 + x0^4 + x1^4 - 3*x0*x1"):
        p = parse_polynomial(text)
        base = cover(p)
        for c in (2, 3):
            scaled_cover = cover(scale_exponents(p, c))
            assert len(scaled_cover.simplices) == len(base.simplices)
            for s_base, s_scaled in zip(base.simplices, scaled_cover.simplices):
                assert s_base.vertex_indices == s_scaled.vertex_indices
                assert s_base.covered_indices == s_scaled.covered_indices
                assert np.allclose(s_base.lam, s_scaled.lam, atol=1e-9)


def test_degenerate_points_example():
    p = parse_polynomial(EXAMPLE_3_7)
    c = cover(p)
    assert exponent_set(p, c.degenerate_indices) == {(1, 1)}
    flagged = find_degenerate_points(p, c.simplices)
    assert flagged == c.degenerate_indices


def test_degenerate_points_interior_negative():
    p = parse_polynomial("1 + x0^4 + x1^4 - 3*x0*x1")
    c = cover(p)
    assert c.degenerate_indices == frozenset()


def test_relative_interior_membership():
    square = [(0, 0), (2, 0), (0, 2), (2, 2)]
    assert point_in_relative_interior((1, 1), square)
    assert not point_in_relative_interior((1, 0), square)
    segment = [(0, 0), (0, 2)]
    assert point_in_relative_interior((0, 1), segment)
    assert not point_in_relative_interior((0, 2), segment)


def test_refine_classification():
    p = parse_polynomial(EXAMPLE_4_1)
    cls = refine_classification(p)
    assert exponent_set(p, cls.vertices) == {(0, 0), (2, 6), (6, 2)}
    assert exponent_set(p, cls.interior) == {(2, 2), (1, 2), (2, 1), (3, 3)}
    assert cls.vertices <= cls.mono_squares | cls.non_squares
