"""Lagrange multiplier matrix expressions from the first order optimality system.

Given the constraint matrix G(x), the first order conditions couple the
gradient adjoint and the complementarity product through the matrix
polynomial P(x) = [P1(x); P2(x)], where

* column (a, b) of P1 is the gradient of G_ab, doubled when a != b, and
* P2 column-stacks G(x)*Lambda so that vec(G(x)*Lambda) = P2(x) * uvec(Lambda).

Solving the polynomial identity L(x) P(x) = I by minimum-norm least squares
over coefficients yields a multiplier expression Theta(x) with
uvec(Theta) = L * [grad f; 0]: at every point u admitting a multiplier matrix
Lambda, Theta(u) = Lambda.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .polycore import (
    MatrixPolynomial,
    Polynomial,
    delta,
    from_uvec_polys,
    monomial_basis,
    upper_triangle_pairs,
    vstack,
)

# Relative threshold for scrubbing least-squares noise out of L and Theta.
PRUNE_REL = 1e-9

DEFAULT_TOL_LME = 1e-8


class LmeSynthesisError(RuntimeError):
    """No feasible multiplier expression up to the degree cap.

    Carries the best residual achieved at each attempted degree, which is the
    useful diagnostic when G is (numerically) degenerate.
    """

    def __init__(self, residuals: dict[int, float]):
        self.residuals = dict(residuals)
        best = min(residuals.values()) if residuals else float("nan")
        super().__init__(
            "no multiplier expression found for degrees "
            f"{sorted(residuals)} (best residual {best:.3e}); "
            "G may be degenerate")


@dataclass(frozen=True)
class KktSystem:
    """The matrix polynomials coupling multipliers to the optimality system."""

    P1: MatrixPolynomial  # n x Delta(m)
    P2: MatrixPolynomial  # m^2 x Delta(m)
    P: MatrixPolynomial   # (n + m^2) x Delta(m), vertical stack [P1; P2]
    m: int
    n: int


@dataclass(frozen=True)
class LmeSolution:
    """A feasible multiplier expression and the identity witness L."""

    L: MatrixPolynomial          # Delta(m) x (n + m^2)
    theta: MatrixPolynomial      # m x m symmetric
    degree: int                  # degree bound used for L
    residual: float              # inf-norm coefficient mismatch of L*P - I
    residual_history: dict[int, float] = field(default_factory=dict)


@dataclass(frozen=True)
class LSolveResult:
    """Outcome of one fixed-degree identity solve."""

    feasible: bool
    L: MatrixPolynomial | None
    residual: float
    degree: int


def build_kkt_system(G: MatrixPolynomial, n: int | None = None) -> KktSystem:
    """Assemble P1, P2 and their stack P for a symmetric constraint matrix."""
    if not G.is_symmetric():
        raise ValueError("constraint matrix G must be symmetric")
    m = G.rows
    if n is None:
        n = G.n
    elif n != G.n:
        raise ValueError(f"variable count mismatch: G has {G.n}, got {n}")
    pairs = upper_triangle_pairs(m)
    zero = Polynomial.zero(n)

    p1_rows = [[zero] * len(pairs) for _ in range(n)]
    for col, (a, b) in enumerate(pairs):
        w = 1.0 if a == b else 2.0
        for i in range(n):
            p1_rows[i][col] = G.entry(a, b).differentiate(i) * w
    P1 = MatrixPolynomial(p1_rows)

    # vec(G*Lambda) row (c, d) sits at index d*m + c; Lambda_ab with a <= b
    # feeds (G*Lambda)_{cd} through G_ca when d == b and G_cb when d == a.
    p2_rows = [[zero] * len(pairs) for _ in range(m * m)]
    for d in range(m):
        for c in range(m):
            r = d * m + c
            for col, (a, b) in enumerate(pairs):
                entry = zero
                if d == b:
                    entry = entry + G.entry(c, a)
                if a != b and d == a:
                    entry = entry + G.entry(c, b)
                p2_rows[r][col] = entry
    P2 = MatrixPolynomial(p2_rows)

    return KktSystem(P1=P1, P2=P2, P=vstack(P1, P2), m=m, n=n)


def _identity_residual(L: MatrixPolynomial, P: MatrixPolynomial) -> float:
    """Inf-norm of the coefficient mismatch of L*P - I."""
    prod = L @ P
    res = 0.0
    for i in range(prod.rows):
        for j in range(prod.cols):
            diff = prod.entry(i, j) - (1.0 if i == j else 0.0)
            res = max(res, diff.max_abs_coeff())
    return res


def solve_L(sys: KktSystem, ell: int, tol_lme: float = DEFAULT_TOL_LME) -> LSolveResult:
    """Solve L(x) P(x) = I with deg L <= ell by minimum 2-norm least squares.

    The coefficient-matching system A v = rhs is shared across all Delta(m)
    right-hand sides and solved through the SVD pseudoinverse with relative
    cutoff 1e-10, so the output is deterministic.  Infeasibility (residual
    above ``tol_lme * (1 + ||rhs||_inf)``) is reported, not raised.
    """
    if ell < 0:
        raise ValueError(f"degree bound must be >= 0, got {ell}")
    P = sys.P
    n, m = sys.n, sys.m
    dm = delta(m)
    basis_l = monomial_basis(n, ell)
    basis_g = monomial_basis(n, ell + P.degree)
    pos_g = {alpha: r for r, alpha in enumerate(basis_g)}
    nl, ng = len(basis_l), len(basis_g)
    n_rows_p = P.rows

    A = np.zeros((dm * ng, n_rows_p * nl))
    for s in range(n_rows_p):
        for j in range(dm):
            p = P.entry(s, j)
            if p.is_zero():
                continue
            for dexp, c in p.terms.items():
                for b_idx, beta in enumerate(basis_l):
                    gamma = tuple(x + y for x, y in zip(beta, dexp))
                    A[j * ng + pos_g[gamma], s * nl + b_idx] += c

    rhs = np.zeros((dm * ng, dm))
    for i in range(dm):
        rhs[i * ng, i] = 1.0  # constant-monomial row of column i

    V, *_ = np.linalg.lstsq(A, rhs, rcond=1e-10)
    resid = np.max(np.abs(A @ V - rhs))
    feasible = resid <= tol_lme * 2.0
    if not feasible:
        return LSolveResult(feasible=False, L=None, residual=float(resid), degree=ell)

    rows = []
    for i in range(dm):
        row = []
        for s in range(n_rows_p):
            coeffs = {beta: V[s * nl + b_idx, i] for b_idx, beta in enumerate(basis_l)}
            row.append(Polynomial(n, coeffs))
        rows.append(row)
    L = MatrixPolynomial(rows)

    # Scrub SVD noise; keep the pruned L only if the identity still holds.
    cut = PRUNE_REL * (1.0 + L.max_abs_coeff())
    pruned = L.prune(cut)
    pruned_resid = _identity_residual(pruned, P)
    if pruned_resid <= tol_lme * 2.0:
        return LSolveResult(feasible=True, L=pruned, residual=float(pruned_resid), degree=ell)
    return LSolveResult(feasible=True, L=L, residual=float(resid), degree=ell)


def gradient_adjoint(G: MatrixPolynomial, theta: MatrixPolynomial) -> list[Polynomial]:
    """The polynomial vector grad G(x)^*[Theta(x)], entry i = tr(d_i G * Theta)."""
    n = G.n
    out = []
    for i in range(n):
        acc = Polynomial.zero(n)
        for a, b in upper_triangle_pairs(G.rows):
            w = 1.0 if a == b else 2.0
            d = G.entry(a, b).differentiate(i)
            t = theta.entry(a, b)
            if d.terms and t.terms:
                acc = acc + d * t * w
        out.append(acc)
    return out


def theta_from_L(f: Polynomial, L: MatrixPolynomial, m: int) -> MatrixPolynomial:
    """Build Theta with uvec(Theta) = L * [grad f; 0]."""
    n = f.n
    grad = f.gradient()
    vec = []
    for i in range(L.rows):
        acc = Polynomial.zero(n)
        for s in range(n):
            coeff = L.entry(i, s)
            if coeff.terms and grad[s].terms:
                acc = acc + coeff * grad[s]
        vec.append(acc)
    theta = from_uvec_polys(vec, m)
    cut = PRUNE_REL * (1.0 + theta.max_abs_coeff())
    return theta.prune(cut)


def synthesize_lme(
    f: Polynomial,
    G: MatrixPolynomial,
    ell_start: int = 0,
    ell_max: int | None = None,
    tol_lme: float = DEFAULT_TOL_LME,
) -> LmeSolution:
    """Search for the smallest-degree multiplier expression.

    Degrees ell = ell_start, ell_start + 1, ..., ell_max are tried in turn;
    the first feasible identity solve wins and Theta is read off from L.
    Raises :class:`LmeSynthesisError` with the per-degree residuals when no
    degree works, which signals possible degeneracy of G.
    """
    if ell_max is None:
        ell_max = f.degree + G.degree + 2
    if ell_start > ell_max:
        raise ValueError(f"ell_start {ell_start} exceeds ell_max {ell_max}")
    sys = build_kkt_system(G)
    history: dict[int, float] = {}
    for ell in range(ell_start, ell_max + 1):
        result = solve_L(sys, ell, tol_lme)
        history[ell] = result.residual
        if result.feasible:
            theta = theta_from_L(f, result.L, sys.m)
            return LmeSolution(
                L=result.L,
                theta=theta,
                degree=ell,
                residual=result.residual,
                residual_history=history,
            )
    raise LmeSynthesisError(history)


def kkt_residual(
    f: Polynomial,
    G: MatrixPolynomial,
    theta: MatrixPolynomial,
    u,
) -> tuple[float, float, float]:
    """Numeric first order residuals at the point u.

    Returns (r_grad, r_comp, psd_viol): the stationarity residual
    ``||grad f(u) - grad G(u)^*[Theta(u)]||_inf``, the entrywise
    complementarity residual ``||G(u) Theta(u)||_inf``, and the PSD violation
    ``max(0, -lambda_min(G(u)), -lambda_min(Theta(u)))``.
    """
    u = np.asarray(u, dtype=float)
    n = f.n
    if u.shape != (n,):
        raise ValueError(f"point has shape {u.shape}, expected ({n},)")
    Gu = G.evaluate(u)
    Tu = theta.evaluate(u)
    grad_f = np.array([f.differentiate(i).evaluate(u) for i in range(n)])
    adjoint = np.array([np.trace(G.differentiate(i).evaluate(u) @ Tu) for i in range(n)])
    r_grad = float(np.max(np.abs(grad_f - adjoint))) if n else 0.0
    r_comp = float(np.max(np.abs(Gu @ Tu)))
    eig_g = float(np.min(np.linalg.eigvalsh(Gu)))
    eig_t = float(np.min(np.linalg.eigvalsh(Tu)))
    psd_viol = max(0.0, -eig_g, -eig_t)
    return r_grad, r_comp, psd_viol


def _evaluate_complex(p: Polynomial, u: np.ndarray) -> complex:
    total = 0.0 + 0.0j
    for alpha, c in p.terms.items():
        v = complex(c)
        for x, e in zip(u, alpha):
            if e:
                v *= x ** e
        total += v
    return total


def nondegeneracy_probe(
    G: MatrixPolynomial,
    num_points: int = 8,
    seed: int = 0,
    tol_rank: float = 1e-8,
) -> tuple[int, int]:
    """Heuristic rank probe of P(x) at random complex points.

    Returns (min_rank, full_rank); full column rank at random points is a
    necessary signal for nondegeneracy, never a certificate.
    """
    sys = build_kkt_system(G)
    rng = np.random.default_rng(seed)
    dm = delta(sys.m)
    min_rank = dm
    for _ in range(num_points):
        u = rng.standard_normal(sys.n) + 1j * rng.standard_normal(sys.n)
        mat = np.array([[ _evaluate_complex(sys.P.entry(i, j), u)
                          for j in range(sys.P.cols)]
                        for i in range(sys.P.rows)])
        svals = np.linalg.svd(mat, compute_uv=False)
        rank = int(np.sum(svals > tol_rank * max(svals[0], 1.0)))
        min_rank = min(min_rank, rank)
    return min_rank, dm
