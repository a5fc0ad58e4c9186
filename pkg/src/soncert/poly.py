"""Sparse multivariate polynomials with integer exponents.

A polynomial is stored in canonical form as a pair (A, b): a tuple of
exponent vectors (one tuple of nonnegative ints per term) and a tuple of
real coefficients.  Canonical means:

  * exponents are pairwise distinct,
  * the constant term (all-zero exponent) is always present, even with
    coefficient 0 -- downstream bound computations need the constant
    coefficient explicitly,
  * all other coefficients are nonzero (|b| >= ZERO_COEFF after merging),
  * terms are ordered constant first, then graded lexicographic.

Two text representations are supported: a human-readable term grammar
("1 + 3*x0^2*x1^6 - 2*x1") and a JSON object {"n": ..., "A": ..., "b": ...}.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Exponent = tuple[int, ...]

# Coefficients smaller than this (in absolute value) are dropped when a
# polynomial is canonicalized, except for the constant term.
ZERO_COEFF = 1e-12


class PolynomialError(ValueError):
    """Invalid polynomial data (bad exponents, dimension mismatch, ...)."""


class PolynomialParseError(PolynomialError):
    """Text that does not match the polynomial grammar.

    The ``position`` attribute holds the character offset of the error.
    """

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class SparsePolynomial:
    """Canonical sparse polynomial: coefficients ``b`` on exponents ``A``."""

    n: int
    exponents: tuple[Exponent, ...]
    coefficients: tuple[float, ...]

    @property
    def t(self) -> int:
        """Number of terms (constant term included)."""
        return len(self.exponents)

    def coefficient(self, exponent: Exponent) -> float:
        """Coefficient of ``exponent``, 0.0 if absent from the support."""
        try:
            return self.coefficients[self.exponents.index(tuple(exponent))]
        except ValueError:
            return 0.0

    def exponent_array(self) -> np.ndarray:
        """Support as a (t, n) integer array, rows in canonical order."""
        return np.array(self.exponents, dtype=np.int64).reshape(self.t, self.n)

    def coefficient_array(self) -> np.ndarray:
        return np.array(self.coefficients, dtype=float)


@dataclass(frozen=True)
class SupportClassification:
    """Index partition of a polynomial's support.

    ``mono_squares`` and ``non_squares`` partition range(t).  A term is a
    monomial square when its exponent is even in every entry and its
    coefficient is positive; the constant term always counts as a monomial
    square because the bound algorithm may raise it freely.  ``vertices``
    and ``interior`` are filled by the geometry module.
    """

    mono_squares: frozenset[int]
    non_squares: frozenset[int]
    vertices: frozenset[int] = frozenset()
    interior: frozenset[int] = frozenset()


def make_polynomial(n: int, terms: Iterable[tuple[Sequence[int], float]]) -> SparsePolynomial:
    """Build a canonical polynomial from (exponent, coefficient) pairs.

    Duplicate exponents are merged by summing coefficients; near-zero
    coefficients are dropped; the constant term is inserted if missing.
    """
    if n < 0:
        raise PolynomialError(f"variable count must be nonnegative, got {n}")
    merged: dict[Exponent, float] = {}
    for exponent, coeff in terms:
        key = tuple(int(e) for e in exponent)
        if len(key) != n:
            raise PolynomialError(
                f"exponent {key} has length {len(key)}, expected {n}")
        if any(e < 0 for e in key):
            raise PolynomialError(f"negative exponent entry in {key}")
        merged[key] = merged.get(key, 0.0) + float(coeff)

    origin = (0,) * n
    kept = {e: c for e, c in merged.items() if abs(c) >= ZERO_COEFF or e == origin}
    kept.setdefault(origin, 0.0)
    ordered = sorted(kept, key=lambda e: (sum(e), e))
    return SparsePolynomial(
        n=n,
        exponents=tuple(ordered),
        coefficients=tuple(kept[e] for e in ordered),
    )


_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<var>x\d+)"
    r"|(?P<op>[-+*^])"
    r")")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == match.start():
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise PolynomialParseError(f"unexpected character {stripped[0]!r}", at)
        if match.lastgroup is not None:
            tokens.append((match.lastgroup, match.group(match.lastgroup), match.start(match.lastgroup)))
        pos = match.end()
    return tokens


def parse_polynomial(text: str, n: int | None = None) -> SparsePolynomial:
    """Parse the term grammar into a canonical polynomial.

    Grammar: ``poly := [sign] term (sign term)*`` with
    ``term := coeff | [coeff '*'] var ['^' int] ('*' var ['^' int])*`` and
    ``var := 'x' <int>`` (0-based indices).  Whitespace is insignificant.
    The variable count is inferred from the largest index unless ``n`` is
    given explicitly.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise PolynomialParseError("empty polynomial", 0)

    terms: list[tuple[dict[int, int], float]] = []
    i = 0

    def peek(kind: str) -> bool:
        return i < len(tokens) and tokens[i][0] == kind

    sign = 1.0
    if peek("op") and tokens[i][1] in "+-":
        sign = -1.0 if tokens[i][1] == "-" else 1.0
        i += 1

    while True:
        if i >= len(tokens):
            at = tokens[-1][2] if tokens else 0
            raise PolynomialParseError("expected a term", at)
        coeff = sign
        powers: dict[int, int] = {}
        saw_factor = False

        if peek("number"):
            coeff *= float(tokens[i][1])
            saw_factor = True
            i += 1
            if peek("op") and tokens[i][1] == "*":
                i += 1
                saw_factor = False  # a variable factor must follow
        while True:
            if peek("var"):
                index = int(tokens[i][1][1:])
                i += 1
                power = 1
                if peek("op") and tokens[i][1] == "^":
                    caret_at = tokens[i][2]
                    i += 1
                    if peek("op") and tokens[i][1] == "-":
                        raise PolynomialParseError("negative exponent", tokens[i][2])
                    if not peek("number") or "." in tokens[i][1] or "e" in tokens[i][1].lower():
                        raise PolynomialParseError("expected integer exponent", caret_at + 1)
                    power = int(tokens[i][1])
                    i += 1
                powers[index] = powers.get(index, 0) + power
                saw_factor = True
                if peek("op") and tokens[i][1] == "*":
                    i += 1
                    saw_factor = False
                    continue
            break
        if not saw_factor:
            at = tokens[i][2] if i < len(tokens) else tokens[-1][2]
            raise PolynomialParseError("expected a variable or coefficient", at)
        terms.append((powers, coeff))

        if i >= len(tokens):
            break
        if peek("op") and tokens[i][1] in "+-":
            sign = -1.0 if tokens[i][1] == "-" else 1.0
            i += 1
            continue
        raise PolynomialParseError(f"unexpected token {tokens[i][1]!r}", tokens[i][2])

    inferred = 1 + max((max(p) for p, _ in terms if p), default=-1)
    if n is None:
        n = inferred
    elif inferred > n:
        raise PolynomialError(
            f"variable index {inferred - 1} exceeds requested dimension {n}")

    def to_exponent(powers: dict[int, int]) -> Exponent:
        entries = [0] * n
        for index, power in powers.items():
            entries[index] = power
        return tuple(entries)

    return make_polynomial(n, [(to_exponent(p), c) for p, c in terms])


def format_polynomial(p: SparsePolynomial) -> str:
    """Render ``p`` in the term grammar; parse(format(p)) reproduces p."""
    parts: list[str] = []
    for exponent, coeff in zip(p.exponents, p.coefficients):
        factors = [
            f"x{i}" if e == 1 else f"x{i}^{e}"
            for i, e in enumerate(exponent) if e > 0
        ]
        if factors:
            body = f"{abs(coeff)!r}*" + "*".join(factors)
        else:
            body = repr(abs(coeff))
        if not parts:
            parts.append(body if coeff >= 0 else f"-{body}")
        else:
            parts.append(("+ " if coeff >= 0 else "- ") + body)
    return " ".join(parts)


def polynomial_to_json(p: SparsePolynomial) -> str:
    """Serialize to the JSON object {"n", "A", "b"} (A = exponent rows)."""
    return json.dumps({
        "n": p.n,
        "A": [list(e) for e in p.exponents],
        "b": list(p.coefficients),
    })


def polynomial_from_json(text: str) -> SparsePolynomial:
    """Parse the JSON object form; the result is canonicalized."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PolynomialParseError(f"invalid JSON: {exc.msg}", exc.pos) from exc
    for key in ("n", "A", "b"):
        if key not in data:
            raise PolynomialError(f"polynomial JSON missing key {key!r}")
    if len(data["A"]) != len(data["b"]):
        raise PolynomialError(
            f"A has {len(data['A'])} rows but b has {len(data['b'])} entries")
    return make_polynomial(int(data["n"]), zip(data["A"], data["b"]))


def classify_support(p: SparsePolynomial) -> SupportClassification:
    """Partition support indices into monomial squares and the rest.

    The constant term is always placed with the monomial squares: the bound
    algorithm treats the constant coefficient as adjustable, so its sign
    never makes the polynomial unbounded.
    """
    origin = (0,) * p.n
    squares = set()
    for i, (exponent, coeff) in enumerate(zip(p.exponents, p.coefficients)):
        if exponent == origin:
            squares.add(i)
        elif coeff > 0 and all(e % 2 == 0 for e in exponent):
            squares.add(i)
    rest = frozenset(range(p.t)) - squares
    return SupportClassification(mono_squares=frozenset(squares), non_squares=rest)


def evaluate(p: SparsePolynomial, x: Sequence[float]) -> float:
    """Evaluate p at a point (floating point)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (p.n,):
        raise PolynomialError(f"point has shape {x.shape}, expected ({p.n},)")
    A = p.exponent_array()
    return float(np.prod(x[None, :] ** A, axis=1) @ p.coefficient_array())


def evaluate_batch(p: SparsePolynomial, points: np.ndarray, chunk: int = 20000) -> np.ndarray:
    """Evaluate p at many points, rows of ``points``; chunked to bound memory."""
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != p.n:
        raise PolynomialError(f"points have shape {points.shape}, expected (m, {p.n})")
    A = p.exponent_array()
    b = p.coefficient_array()
    out = np.empty(points.shape[0])
    for start in range(0, points.shape[0], chunk):
        block = points[start:start + chunk]
        out[start:start + chunk] = np.prod(block[:, None, :] ** A[None, :, :], axis=2) @ b
    return out


def degree(p: SparsePolynomial) -> int:
    """Total degree: maximum coordinate sum over the support."""
    return max(sum(e) for e in p.exponents)


def scale_exponents(p: SparsePolynomial, c: int) -> SparsePolynomial:
    """Multiply every exponent entry by c >= 1; coefficients unchanged."""
    if c < 1:
        raise PolynomialError(f"scale factor must be >= 1, got {c}")
    return make_polynomial(
        p.n,
        [(tuple(c * e for e in exp), coeff)
         for exp, coeff in zip(p.exponents, p.coefficients)],
    )


def add_polynomials(p: SparsePolynomial, q: SparsePolynomial) -> SparsePolynomial:
    """Coefficient-wise sum of two polynomials in the same variables."""
    if p.n != q.n:
        raise PolynomialError(f"dimension mismatch: {p.n} vs {q.n}")
    return make_polynomial(
        p.n,
        list(zip(p.exponents, p.coefficients)) + list(zip(q.exponents, q.coefficients)),
    )
