"""Assembly of moment relaxations as concrete conic problems.

A truncated moment vector y is indexed by the monomials of degree at most 2k
in graded lex order.  This module turns (f, G[, Theta], k) into a linear
objective over y, equality rows, and PSD blocks affine in y:

* standard hierarchy: y_0 = 1, M_k(y) >= 0, L_G(y) >= 0;
* strengthened hierarchy: additionally L_Theta(y) >= 0 plus the complete
  ideal-truncation equality rows <h * x^beta, y> = 0 for every entry h of
  G*Theta and of grad f - grad G^*[Theta].

Localizing blocks use the uniform truncation t = k - ceil(deg(H)/2) across
all entries, so the block matrix is well formed and symmetric whenever H is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from . import lme
from .polycore import (
    Exponent,
    MatrixPolynomial,
    Polynomial,
    add_exponents,
    monomial_basis,
    monomial_count,
)

Kind = Literal["standard", "strengthened"]

# Rows are dropped as duplicates when they agree to this many digits after
# inf-norm normalization.
_ROW_KEY_DIGITS = 12


class OrderTooSmallError(ValueError):
    """Requested relaxation order below the minimal admissible one."""

    def __init__(self, k: int, k_min: int):
        self.k = k
        self.k_min = k_min
        super().__init__(f"order k={k} is below the minimal admissible order {k_min}")


@dataclass(frozen=True)
class MomentIndex:
    """Bijection between monomials of degree <= max_degree and 0-based positions."""

    n: int
    max_degree: int
    monomials: tuple[Exponent, ...]
    position: dict[Exponent, int]

    @classmethod
    def build(cls, n: int, max_degree: int) -> "MomentIndex":
        basis = monomial_basis(n, max_degree)
        return cls(n=n, max_degree=max_degree, monomials=tuple(basis),
                   position={alpha: i for i, alpha in enumerate(basis)})

    def pos(self, alpha: Exponent) -> int:
        try:
            return self.position[tuple(alpha)]
        except KeyError:
            raise ValueError(
                f"monomial {alpha} exceeds the index degree bound {self.max_degree}"
            ) from None

    def __len__(self) -> int:
        return len(self.monomials)


@dataclass
class MomentVector:
    """A truncated moment sequence: values aligned with a MomentIndex."""

    index: MomentIndex
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (len(self.index),):
            raise ValueError(
                f"moment vector has length {self.values.shape}, expected {len(self.index)}")

    @classmethod
    def from_point(cls, u: Sequence[float], index: MomentIndex) -> "MomentVector":
        """Moments of the Dirac measure at u."""
        u = np.asarray(u, dtype=float)
        vals = np.empty(len(index))
        for i, alpha in enumerate(index.monomials):
            v = 1.0
            for x, e in zip(u, alpha):
                if e:
                    v *= x ** e
            vals[i] = v
        return cls(index, vals)

    @classmethod
    def from_atoms(cls, atoms: Sequence[Sequence[float]], weights: Sequence[float],
                   index: MomentIndex) -> "MomentVector":
        """Moments of the atomic measure sum_j weights[j] * delta(atoms[j])."""
        vals = np.zeros(len(index))
        for u, w in zip(atoms, weights):
            vals += w * cls.from_point(u, index).values
        return cls(index, vals)


@dataclass(frozen=True)
class LinearFunctionalRow:
    """One equality <p, y> = rhs as a sparse coefficient map over positions."""

    coeffs: dict[int, float]
    rhs: float

    def normalized(self) -> "LinearFunctionalRow":
        scale = max((abs(c) for c in self.coeffs.values()), default=0.0)
        if scale == 0.0:
            return self
        return LinearFunctionalRow(
            coeffs={p: c / scale for p, c in self.coeffs.items()},
            rhs=self.rhs / scale)

    def key(self):
        items = tuple(sorted((p, round(c, _ROW_KEY_DIGITS)) for p, c in self.coeffs.items()))
        return items, round(self.rhs, _ROW_KEY_DIGITS)


@dataclass(frozen=True)
class PsdBlock:
    """An affine-in-y PSD constraint A0 + sum_alpha y_alpha A_alpha >= 0.

    Entries are (position, i, j, coeff) with i <= j; position -1 addresses the
    constant part A0.  Off-diagonal entries are stored once and mirrored when
    the block is materialized.
    """

    label: str
    size: int
    entries: tuple[tuple[int, int, int, float], ...]

    def materialize(self, y: np.ndarray) -> np.ndarray:
        mat = np.zeros((self.size, self.size))
        for pos, i, j, c in self.entries:
            v = c if pos < 0 else c * y[pos]
            mat[i, j] += v
            if i != j:
                mat[j, i] += v
        return mat


@dataclass(frozen=True)
class ConicProblem:
    """Linear objective over y, equality rows, and affine PSD blocks."""

    index: MomentIndex
    objective: dict[int, float]
    equalities: tuple[LinearFunctionalRow, ...]
    psd_blocks: tuple[PsdBlock, ...]

    @property
    def num_vars(self) -> int:
        return len(self.index)

    def objective_value(self, y: np.ndarray) -> float:
        return float(sum(c * y[p] for p, c in self.objective.items()))


@dataclass(frozen=True)
class RelaxationMeta:
    kind: Kind
    k: int
    d0: int
    n: int
    block_dims: tuple[int, ...]
    num_equalities: int
    moment_length: int


def riesz(p: Polynomial, y: MomentVector) -> float:
    """The Riesz functional <p, y> = sum_alpha p_alpha y_alpha."""
    total = 0.0
    for alpha, c in p.terms.items():
        total += c * y.values[y.index.pos(alpha)]
    return total


def moment_matrix(y: MomentVector, k: int) -> np.ndarray:
    """The order-k moment matrix M_k[y], of size C(n+k, n)."""
    n = y.index.n
    if 2 * k > y.index.max_degree:
        raise ValueError(f"moment vector indexed to degree {y.index.max_degree}, "
                         f"cannot form M_{k}")
    basis = monomial_basis(n, k)
    size = len(basis)
    mat = np.empty((size, size))
    for a in range(size):
        for b in range(a, size):
            v = y.values[y.index.pos(add_exponents(basis[a], basis[b]))]
            mat[a, b] = v
            mat[b, a] = v
    return mat


def _as_matrix(H) -> MatrixPolynomial:
    if isinstance(H, Polynomial):
        return MatrixPolynomial.from_scalar(H)
    return H


def localizing_matrix(H, y: MomentVector, k: int) -> np.ndarray:
    """The block localizing matrix of H for y at order k.

    All blocks share the uniform truncation t = k - ceil(deg(H)/2); block
    (i, j) is <H_ij * [x]_t [x]_t^T, y>.  For H = 1 this is the moment matrix.
    """
    H = _as_matrix(H)
    n = y.index.n
    t = k - math.ceil(H.degree / 2)
    if t < 0:
        raise ValueError(f"deg(H)={H.degree} too high for order k={k}")
    basis = monomial_basis(n, t)
    nt = len(basis)
    m1, m2 = H.rows, H.cols
    out = np.zeros((m1 * nt, m2 * nt))
    for bi in range(m1):
        for bj in range(m2):
            h = H.entry(bi, bj)
            if h.is_zero():
                continue
            for a in range(nt):
                for b in range(nt):
                    base = add_exponents(basis[a], basis[b])
                    v = 0.0
                    for dexp, c in h.terms.items():
                        v += c * y.values[y.index.pos(add_exponents(base, dexp))]
                    out[bi * nt + a, bj * nt + b] = v
    return out


def ideal_rows(h: Polynomial, two_k: int, index: MomentIndex) -> list[LinearFunctionalRow]:
    """Equality rows <h * x^beta, y> = 0 for all |beta| <= 2k - deg(h)."""
    if h.is_zero():
        return []
    if h.degree > two_k:
        raise ValueError(f"deg(h)={h.degree} exceeds 2k={two_k}")
    rows = []
    for beta in monomial_basis(index.n, two_k - h.degree):
        coeffs: dict[int, float] = {}
        for alpha, c in h.terms.items():
            p = index.pos(add_exponents(alpha, beta))
            coeffs[p] = coeffs.get(p, 0.0) + c
        rows.append(LinearFunctionalRow(coeffs=coeffs, rhs=0.0))
    return rows


def _psd_block_entries(H: MatrixPolynomial, index: MomentIndex, t: int
                       ) -> tuple[int, tuple[tuple[int, int, int, float], ...]]:
    """Upper-triangle entry list for the localizing block of symmetric H."""
    basis = monomial_basis(index.n, t)
    nt = len(basis)
    m = H.rows
    acc: dict[tuple[int, int, int], float] = {}
    for bi in range(m):
        for bj in range(bi, m):
            h = H.entry(bi, bj)
            if h.is_zero():
                continue
            for a in range(nt):
                bstart = a if bi == bj else 0
                for b in range(bstart, nt):
                    i = bi * nt + a
                    j = bj * nt + b
                    base = add_exponents(basis[a], basis[b])
                    for dexp, c in h.terms.items():
                        key = (index.pos(add_exponents(base, dexp)), i, j)
                        acc[key] = acc.get(key, 0.0) + c
    entries = tuple((pos, i, j, c) for (pos, i, j), c in sorted(acc.items()) if c != 0.0)
    return m * nt, entries


def relaxation_order_bound(kind: Kind, f: Polynomial, G: MatrixPolynomial,
                           theta: MatrixPolynomial | None = None) -> int:
    """Minimal admissible order k_min for the requested hierarchy."""
    if kind == "strengthened":
        if theta is None:
            raise ValueError("strengthened relaxation requires theta")
        return max(math.ceil(f.degree / 2),
                   math.ceil((G.degree + theta.degree) / 2), 1)
    return max(math.ceil(f.degree / 2), math.ceil(G.degree / 2), 1)


def build_relaxation(
    kind: Kind,
    f: Polynomial,
    G: MatrixPolynomial,
    theta: MatrixPolynomial | None,
    k: int,
) -> tuple[ConicProblem, RelaxationMeta]:
    """Assemble the order-k moment relaxation of the requested kind.

    The strengthened variant requires theta (symmetric); its equality set is
    the full ideal truncation of every entry of G*Theta and of
    grad f - grad G^*[Theta], which subsumes the entrywise localizing
    equalities of those matrices.  Rows are inf-norm normalized, deduplicated
    and sorted, so assembly is deterministic.
    """
    if kind not in ("standard", "strengthened"):
        raise ValueError(f"unknown relaxation kind {kind!r}")
    if not G.is_symmetric():
        raise ValueError("constraint matrix G must be symmetric")
    if kind == "standard" and theta is not None:
        theta = None
    if kind == "strengthened":
        if theta is None:
            raise ValueError("strengthened relaxation requires theta")
        if not theta.is_symmetric():
            raise ValueError("theta must be symmetric")
    n = f.n
    k_min = relaxation_order_bound(kind, f, G, theta)
    if k < k_min:
        raise OrderTooSmallError(k, k_min)

    index = MomentIndex.build(n, 2 * k)
    objective = {index.pos(alpha): c for alpha, c in f.terms.items()}

    rows: list[LinearFunctionalRow] = [
        LinearFunctionalRow(coeffs={0: 1.0}, rhs=1.0)]
    blocks: list[PsdBlock] = []

    size, entries = _psd_block_entries(MatrixPolynomial.identity(1, n), index, k)
    blocks.append(PsdBlock(label="moment", size=size, entries=entries))

    tg = k - math.ceil(G.degree / 2)
    size, entries = _psd_block_entries(G, index, tg)
    blocks.append(PsdBlock(label="loc_G", size=size, entries=entries))

    if kind == "strengthened":
        tt = k - math.ceil(theta.degree / 2)
        size, entries = _psd_block_entries(theta, index, tt)
        blocks.append(PsdBlock(label="loc_theta", size=size, entries=entries))

        gtheta = G @ theta
        for i in range(gtheta.rows):
            for j in range(gtheta.cols):
                rows.extend(ideal_rows(gtheta.entry(i, j), 2 * k, index))
        stationarity = [fi - gi for fi, gi in
                        zip(f.gradient(), lme.gradient_adjoint(G, theta))]
        for h in stationarity:
            rows.extend(ideal_rows(h, 2 * k, index))

    normalized = [r.normalized() for r in rows]
    seen = {}
    for r in normalized:
        seen.setdefault(r.key(), r)
    dedup = [seen[key] for key in sorted(seen)]

    problem = ConicProblem(
        index=index,
        objective=objective,
        equalities=tuple(dedup),
        psd_blocks=tuple(blocks),
    )
    meta = RelaxationMeta(
        kind=kind,
        k=k,
        d0=k_min,
        n=n,
        block_dims=tuple(b.size for b in blocks),
        num_equalities=len(dedup),
        moment_length=len(index),
    )
    return problem, meta
