"""Certified lower bounds for sparse polynomials via nonnegative circuits.

The public surface re-exports the main entry points: polynomial parsing and
canonical representation, the bound computation with certificate extraction
and independent verification, random instance generation, and the SOS
semidefinite-program exporter.
"""

from .poly import (
    SparsePolynomial,
    SupportClassification,
    PolynomialError,
    PolynomialParseError,
    make_polynomial,
    parse_polynomial,
    format_polynomial,
    polynomial_to_json,
    polynomial_from_json,
    classify_support,
    evaluate,
    evaluate_batch,
    degree,
    scale_exponents,
    add_polynomials,
)

__all__ = [
    "SparsePolynomial",
    "SupportClassification",
    "PolynomialError",
    "PolynomialParseError",
    "make_polynomial",
    "parse_polynomial",
    "format_polynomial",
    "polynomial_to_json",
    "polynomial_from_json",
    "classify_support",
    "evaluate",
    "evaluate_batch",
    "degree",
    "scale_exponents",
    "add_polynomials",
]
