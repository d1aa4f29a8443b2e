"""Sparse multivariate polynomial and symmetric matrix polynomial arithmetic.

A monomial is an exponent tuple ``alpha`` of length ``n`` (one nonnegative
integer per variable).  A :class:`Polynomial` stores a term map from exponent
tuples to float coefficients; zero coefficients are never stored, and
coefficients whose magnitude falls below :data:`COEFF_EPS` after arithmetic
are pruned so term maps stay canonical.  Monomials are ordered by graded
lexicographic order with ``x1 > x2 > ... > xn``, i.e. the basis of degree at
most 2 in two variables reads ``1, x1, x2, x1^2, x1*x2, x2^2``.

All values are immutable after construction and every operation is pure, so
instances can be shared freely between threads.
"""

from __future__ import annotations

import math
from itertools import combinations_with_replacement
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

# Coefficients with magnitude below this are dropped during canonicalization.
COEFF_EPS = 1e-14

Exponent = tuple[int, ...]


def total_degree(alpha: Sequence[int]) -> int:
    """Total degree |alpha| of an exponent vector."""
    return sum(alpha)


def grlex_key(alpha: Sequence[int]):
    """Sort key realizing graded lex order with x1 largest.

    Sorting exponent tuples ascending by this key lists monomials by total
    degree, and within a degree by descending lexicographic exponent order,
    which puts x1^2 before x1*x2 before x2^2.
    """
    return (sum(alpha), tuple(-a for a in alpha))


def monomial_count(n: int, d: int) -> int:
    """Number of monomials in n variables of degree <= d, C(n+d, d)."""
    return math.comb(n + d, d)


def monomial_basis(n: int, d: int) -> list[Exponent]:
    """All exponent tuples with |alpha| <= d in graded lex order.

    The first element is the zero exponent (the constant monomial 1) and the
    result has length C(n+d, d).
    """
    if n < 1:
        raise ValueError(f"variable count must be >= 1, got {n}")
    if d < 0:
        raise ValueError(f"degree must be >= 0, got {d}")
    basis: list[Exponent] = []
    for deg in range(d + 1):
        for combo in combinations_with_replacement(range(n), deg):
            alpha = [0] * n
            for i in combo:
                alpha[i] += 1
            basis.append(tuple(alpha))
    return basis


def add_exponents(a: Exponent, b: Exponent) -> Exponent:
    return tuple(x + y for x, y in zip(a, b))


class Polynomial:
    """Sparse real-coefficient polynomial in n variables."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Exponent, float] | None = None):
        if n < 1:
            raise ValueError(f"variable count must be >= 1, got {n}")
        clean: dict[Exponent, float] = {}
        if terms:
            for alpha, c in terms.items():
                alpha = tuple(int(a) for a in alpha)
                if len(alpha) != n:
                    raise ValueError(
                        f"exponent {alpha} has length {len(alpha)}, expected {n}")
                if any(a < 0 for a in alpha):
                    raise ValueError(f"negative exponent in {alpha}")
                c = float(c)
                if abs(c) > COEFF_EPS:
                    clean[alpha] = c
        self.n = n
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n: int) -> "Polynomial":
        return cls(n, {})

    @classmethod
    def constant(cls, n: int, value: float) -> "Polynomial":
        return cls(n, {(0,) * n: float(value)})

    @classmethod
    def variable(cls, n: int, i: int) -> "Polynomial":
        """The polynomial x_{i+1} (0-based variable index i)."""
        if not 0 <= i < n:
            raise IndexError(f"variable index {i} out of range for n={n}")
        alpha = [0] * n
        alpha[i] = 1
        return cls(n, {tuple(alpha): 1.0})

    # -- basic queries ------------------------------------------------------

    @property
    def degree(self) -> int:
        """Total degree; the zero polynomial has degree 0 by convention."""
        if not self.terms:
            return 0
        return max(sum(a) for a in self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def coefficient(self, alpha: Exponent) -> float:
        return self.terms.get(tuple(alpha), 0.0)

    def sorted_terms(self) -> list[tuple[Exponent, float]]:
        """Terms as (exponent, coeff) in ascending graded lex order."""
        return sorted(self.terms.items(), key=lambda t: grlex_key(t[0]))

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def __iter__(self) -> Iterator[tuple[Exponent, float]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, float)):
            other = Polynomial.constant(self.n, other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.n != self.n:
                raise ValueError(f"variable count mismatch: {self.n} vs {other.n}")
            return other
        if isinstance(other, (int, float, np.floating, np.integer)):
            return Polynomial.constant(self.n, float(other))
        raise TypeError(f"cannot combine Polynomial with {type(other).__name__}")

    def __add__(self, other) -> "Polynomial":
        other = self._coerce(other)
        out = dict(self.terms)
        for alpha, c in other.terms.items():
            out[alpha] = out.get(alpha, 0.0) + c
        return Polynomial(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.n, {a: -c for a, c in self.terms.items()})

    def __sub__(self, other) -> "Polynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + self._coerce(other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, float, np.floating, np.integer)):
            c = float(other)
            return Polynomial(self.n, {a: v * c for a, v in self.terms.items()})
        other = self._coerce(other)
        out: dict[Exponent, float] = {}
        for a1, c1 in self.terms.items():
            for a2, c2 in other.terms.items():
                alpha = add_exponents(a1, a2)
                out[alpha] = out.get(alpha, 0.0) + c1 * c2
        return Polynomial(self.n, out)

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> "Polynomial":
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError("polynomial powers must be nonnegative integers")
        result = Polynomial.constant(self.n, 1.0)
        base = self
        e = exponent
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    # -- calculus -----------------------------------------------------------

    def differentiate(self, i: int) -> "Polynomial":
        """Exact partial derivative with respect to variable index i (0-based)."""
        if not 0 <= i < self.n:
            raise IndexError(f"variable index {i} out of range for n={self.n}")
        out: dict[Exponent, float] = {}
        for alpha, c in self.terms.items():
            e = alpha[i]
            if e == 0:
                continue
            beta = list(alpha)
            beta[i] = e - 1
            key = tuple(beta)
            out[key] = out.get(key, 0.0) + c * e
        return Polynomial(self.n, out)

    def gradient(self) -> list["Polynomial"]:
        return [self.differentiate(i) for i in range(self.n)]

    def evaluate(self, u: Sequence[float]) -> float:
        """Evaluate by direct term summation at the point u."""
        u = np.asarray(u, dtype=float)
        if u.shape != (self.n,):
            raise ValueError(f"point has shape {u.shape}, expected ({self.n},)")
        total = 0.0
        for alpha, c in self.terms.items():
            v = c
            for x, e in zip(u, alpha):
                if e:
                    v *= x ** e
            total += v
        return total

    def scale_variables(self, scales: Sequence[float]) -> "Polynomial":
        """Substitute x_i -> scales[i] * x_i."""
        if len(scales) != self.n:
            raise ValueError("scale vector length mismatch")
        out: dict[Exponent, float] = {}
        for alpha, c in self.terms.items():
            for s, e in zip(scales, alpha):
                if e:
                    c = c * s ** e
            out[alpha] = out.get(alpha, 0.0) + c
        return Polynomial(self.n, out)

    def prune(self, tol: float) -> "Polynomial":
        """Drop coefficients with |c| <= tol."""
        return Polynomial(self.n, {a: c for a, c in self.terms.items() if abs(c) > tol})

    # -- formatting ---------------------------------------------------------

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for alpha, c in self.sorted_terms():
            factors = []
            for i, e in enumerate(alpha):
                if e == 1:
                    factors.append(f"x{i + 1}")
                elif e > 1:
                    factors.append(f"x{i + 1}^{e}")
            mono = "*".join(factors)
            coeff = f"{c:.12g}"
            if mono:
                term = mono if coeff == "1" else (f"-{mono}" if coeff == "-1" else f"{coeff}*{mono}")
            else:
                term = coeff
            parts.append(term)
        out = parts[0]
        for term in parts[1:]:
            out += f" - {term[1:]}" if term.startswith("-") else f" + {term}"
        return out

    def __repr__(self) -> str:
        return f"Polynomial({self})"


class MatrixPolynomial:
    """Dense grid of polynomials forming a rows-by-cols matrix."""

    __slots__ = ("rows", "cols", "entries", "n")

    def __init__(self, entries: Sequence[Sequence[Polynomial]]):
        if not entries or not entries[0]:
            raise ValueError("matrix polynomial must be nonempty")
        rows = len(entries)
        cols = len(entries[0])
        n = entries[0][0].n
        for row in entries:
            if len(row) != cols:
                raise ValueError("ragged matrix polynomial")
            for p in row:
                if not isinstance(p, Polynomial) or p.n != n:
                    raise ValueError("entries must be polynomials in the same variables")
        self.rows = rows
        self.cols = cols
        self.n = n
        self.entries = tuple(tuple(row) for row in entries)

    @classmethod
    def zeros(cls, rows: int, cols: int, n: int) -> "MatrixPolynomial":
        z = Polynomial.zero(n)
        return cls([[z] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, size: int, n: int) -> "MatrixPolynomial":
        one = Polynomial.constant(n, 1.0)
        z = Polynomial.zero(n)
        return cls([[one if i == j else z for j in range(size)] for i in range(size)])

    @classmethod
    def from_scalar(cls, p: Polynomial) -> "MatrixPolynomial":
        return cls([[p]])

    def entry(self, i: int, j: int) -> Polynomial:
        return self.entries[i][j]

    @property
    def degree(self) -> int:
        """Maximum total degree among all entries."""
        return max(p.degree for row in self.entries for p in row)

    def is_symmetric(self) -> bool:
        if self.rows != self.cols:
            return False
        return all(self.entries[i][j] == self.entries[j][i]
                   for i in range(self.rows) for j in range(i + 1, self.cols))

    def transpose(self) -> "MatrixPolynomial":
        return MatrixPolynomial([[self.entries[i][j] for i in range(self.rows)]
                                 for j in range(self.cols)])

    def map(self, fn) -> "MatrixPolynomial":
        return MatrixPolynomial([[fn(p) for p in row] for row in self.entries])

    def __add__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("matrix shape mismatch")
        return MatrixPolynomial([[a + b for a, b in zip(r1, r2)]
                                 for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("matrix shape mismatch")
        return MatrixPolynomial([[a - b for a, b in zip(r1, r2)]
                                 for r1, r2 in zip(self.entries, other.entries)])

    def __matmul__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.rows}x{self.cols} by "
                             f"{other.rows}x{other.cols}")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = Polynomial.zero(self.n)
                for k in range(self.cols):
                    p, q = self.entries[i][k], other.entries[k][j]
                    if p.terms and q.terms:
                        acc = acc + p * q
                row.append(acc)
            out.append(row)
        return MatrixPolynomial(out)

    def scale(self, c: float) -> "MatrixPolynomial":
        return self.map(lambda p: p * c)

    def differentiate(self, i: int) -> "MatrixPolynomial":
        return self.map(lambda p: p.differentiate(i))

    def evaluate(self, u: Sequence[float]) -> np.ndarray:
        """Entrywise evaluation to a dense float matrix."""
        return np.array([[p.evaluate(u) for p in row] for row in self.entries])

    def prune(self, tol: float) -> "MatrixPolynomial":
        return self.map(lambda p: p.prune(tol))

    def max_abs_coeff(self) -> float:
        return max(p.max_abs_coeff() for row in self.entries for p in row)

    def __str__(self) -> str:
        return "[" + "; ".join(", ".join(str(p) for p in row) for row in self.entries) + "]"

    def __repr__(self) -> str:
        return f"MatrixPolynomial({self.rows}x{self.cols}: {self})"


def vstack(top: MatrixPolynomial, bottom: MatrixPolynomial) -> MatrixPolynomial:
    if top.cols != bottom.cols:
        raise ValueError("column count mismatch in vstack")
    return MatrixPolynomial(list(top.entries) + list(bottom.entries))


def upper_triangle_pairs(m: int) -> list[tuple[int, int]]:
    """Index pairs (i, j), i <= j, in column-stacked upper triangle order.

    This is the order (0,0), (0,1), (1,1), (0,2), (1,2), (2,2), ... matching
    the layout of :func:`uvec`.
    """
    return [(i, j) for j in range(m) for i in range(j + 1)]


def delta(m: int) -> int:
    """Length of the upper-triangle vectorization, m(m+1)/2."""
    return m * (m + 1) // 2


def uvec(S, m: int | None = None):
    """Column-stacked upper-triangle vectorization of a symmetric matrix.

    For a symmetric 2x2 matrix [[a, b], [b, c]] this returns (a, b, c).  No
    scaling factor is applied to off-diagonal entries.  Accepts either a
    symmetric :class:`MatrixPolynomial` (returning a list of polynomials) or
    a symmetric real array (returning a 1-D float array).
    """
    if isinstance(S, MatrixPolynomial):
        if not S.is_symmetric():
            raise ValueError("uvec requires a symmetric matrix polynomial")
        m = S.rows
        return [S.entry(i, j) for i, j in upper_triangle_pairs(m)]
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("uvec requires a square matrix")
    if not np.allclose(S, S.T, rtol=1e-10, atol=1e-12):
        raise ValueError("uvec requires a symmetric matrix")
    m = S.shape[0]
    return np.array([S[i, j] for i, j in upper_triangle_pairs(m)])


def from_uvec_polys(v: Sequence[Polynomial], m: int) -> MatrixPolynomial:
    """Rebuild the symmetric matrix polynomial whose uvec equals v."""
    if len(v) != delta(m):
        raise ValueError(f"uvec length {len(v)} does not match m={m}")
    n = v[0].n
    grid = [[Polynomial.zero(n) for _ in range(m)] for _ in range(m)]
    for pos, (i, j) in enumerate(upper_triangle_pairs(m)):
        grid[i][j] = v[pos]
        grid[j][i] = v[pos]
    return MatrixPolynomial(grid)


def from_uvec_array(v: Sequence[float], m: int) -> np.ndarray:
    """Rebuild the symmetric float matrix whose uvec equals v."""
    v = np.asarray(v, dtype=float)
    if v.shape != (delta(m),):
        raise ValueError(f"uvec length {v.shape} does not match m={m}")
    out = np.zeros((m, m))
    for pos, (i, j) in enumerate(upper_triangle_pairs(m)):
        out[i, j] = v[pos]
        out[j, i] = v[pos]
    return out
