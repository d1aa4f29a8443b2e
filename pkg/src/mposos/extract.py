"""Flat truncation detection and atomic minimizer extraction.

Once a moment relaxation minimizer y exhibits rank stabilization
rank M_t[y] = rank M_{t-gap}[y] = r, its truncation admits an r-atomic
probability measure.  The atoms are recovered in the usual way: factor
M_t ~ V V^T with a rank-r truncated eigendecomposition, column-echelon-reduce
V^T to pick r basis monomials, form the multiplication operators on that
basis, and read the atom coordinates off the real Schur form of a random
convex combination of the operators.  Weights come from moment matching with
nonnegativity clipping.

Detection first scans the certificate gap d0 prescribed by the relaxation
degree; if no order in [d0, k] stabilizes, it falls back to the adjacent-rank
condition (gap 1), which is the flat-extension requirement actually needed by
the atomic-measure construction and is what makes multi-atom solutions
detectable at the low orders where they appear in practice.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .polycore import Exponent, MatrixPolynomial, Polynomial, monomial_basis, monomial_count
from .relax import MomentVector, moment_matrix
from . import lme
from .sdp import SolveReport

DEFAULT_TOL_RANK = 1e-6


class NoFlatTruncation(RuntimeError):
    """No order in the scan window exhibits the rank stabilization."""

    def __init__(self, rank_profile: dict[int, int]):
        self.rank_profile = dict(rank_profile)
        super().__init__(f"no flat truncation: rank profile {self.rank_profile}")


class ExtractionFailure(RuntimeError):
    """The echelon or Schur step degenerated beyond tolerance."""


@dataclass(frozen=True)
class FlatCertificate:
    t: int
    r: int
    gap: int
    rank_profile: dict[int, int]


@dataclass(frozen=True)
class AtomSet:
    atoms: tuple[np.ndarray, ...]
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.atoms)


@dataclass(frozen=True)
class AtomCheck:
    point: np.ndarray
    weight: float
    min_eig_G: float
    objective: float
    objective_gap: float
    kkt: tuple[float, float, float] | None
    verdict: str  # certified | suspect | rejected


@dataclass(frozen=True)
class CertReport:
    checks: tuple[AtomCheck, ...]
    verdict: str  # certified | suspect | rejected

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"


def numeric_rank(M: np.ndarray, tol_rank: float = DEFAULT_TOL_RANK) -> int:
    """Count singular values above tol_rank times the largest (0 for M = 0)."""
    M = np.asarray(M, dtype=float)
    svals = np.linalg.svd(M, compute_uv=False)
    if svals.size == 0 or svals[0] <= 0.0:
        return 0
    return int(np.sum(svals > tol_rank * svals[0]))


def _find_flat_order(ranks: dict[int, int], lo: int, hi: int, gap: int) -> int | None:
    for t in range(lo, hi + 1):
        if t - gap >= 0 and ranks[t] == ranks[t - gap]:
            return t
    return None


def flat_extract(
    y: MomentVector,
    k: int,
    d0: int,
    tol_rank: float = DEFAULT_TOL_RANK,
    seed: int = 0,
) -> tuple[FlatCertificate, AtomSet]:
    """Detect flat truncation of y and extract the atomic support.

    Scans t = d0, ..., k for rank M_t = rank M_{t-d0} and takes the first
    stabilized order (then the same scan with gap 1 as a fallback).  Raises
    :class:`NoFlatTruncation` with the computed rank profile when no order
    qualifies, and :class:`ExtractionFailure` when the numerical extraction
    steps degenerate.
    """
    if d0 < 1:
        raise ValueError("d0 must be >= 1")
    if 2 * k > y.index.max_degree:
        raise ValueError("moment vector is too short for the requested order")
    n = y.index.n
    ranks = {s: numeric_rank(moment_matrix(y, s), tol_rank) for s in range(k + 1)}

    gap = d0
    t = _find_flat_order(ranks, d0, k, d0)
    if t is None:
        gap = 1
        t = _find_flat_order(ranks, 1, k, 1)
    if t is None:
        raise NoFlatTruncation(ranks)
    r = ranks[t]
    cert = FlatCertificate(t=t, r=r, gap=gap, rank_profile=ranks)
    if r == 0:
        raise ExtractionFailure("moment matrix is numerically zero")

    Mt = moment_matrix(y, t)
    w, V = np.linalg.eigh(Mt)
    order = np.argsort(w)[::-1][:r]
    w_top = w[order]
    if w_top[-1] <= 0:
        raise ExtractionFailure("rank-r eigenvalues are not positive")
    Vr = V[:, order] * np.sqrt(w_top)

    # Pick r pivot monomials among degrees <= t-1 (their rank equals r by the
    # stabilization), so every x_i shift of a basis monomial stays indexed.
    n_lower = monomial_count(n, t - 1)
    _, R, piv = scipy.linalg.qr(Vr[:n_lower].T, pivoting=True, mode="economic")
    diag = np.abs(np.diag(R))
    if diag.size < r or diag[r - 1] <= 1e-12 * max(diag[0], 1.0):
        raise ExtractionFailure("column echelon step is rank-deficient")
    pivots = sorted(piv[:r])

    B = Vr[pivots, :]
    C = np.linalg.solve(B.T, Vr.T).T  # rows: coordinates over the pivot basis

    basis_t = monomial_basis(n, t)
    pos_t = {alpha: i for i, alpha in enumerate(basis_t)}
    pivot_monomials: list[Exponent] = [basis_t[p] for p in pivots]
    ops = []
    for i in range(n):
        Ni = np.empty((r, r))
        for j, beta in enumerate(pivot_monomials):
            shifted = list(beta)
            shifted[i] += 1
            Ni[j, :] = C[pos_t[tuple(shifted)], :]
        ops.append(Ni)

    rng = np.random.default_rng(seed)
    lam = rng.random(n) + 0.1
    lam /= lam.sum()
    N = sum(l * Ni for l, Ni in zip(lam, ops))
    T, Q = scipy.linalg.schur(N, output="real")
    sub = np.diag(T, -1)
    if sub.size and np.max(np.abs(sub)) > 1e-6 * (1.0 + np.max(np.abs(T))):
        raise ExtractionFailure("complex eigenvalues in the Schur step")

    raw_atoms = []
    for l in range(r):
        q = Q[:, l]
        raw_atoms.append(np.array([q @ Ni @ q for Ni in ops]))

    # Merge near-duplicate atoms so the support is pairwise distinct.
    scale = 1.0 + max((float(np.max(np.abs(u))) for u in raw_atoms), default=0.0)
    merged: list[list[np.ndarray]] = []
    for u in raw_atoms:
        for group in merged:
            if np.max(np.abs(u - group[0])) <= 1e-6 * scale:
                group.append(u)
                break
        else:
            merged.append([u])
    atoms = [np.mean(group, axis=0) for group in merged]
    atoms.sort(key=lambda u: tuple(np.round(u, 12)))

    # Moment matching for the weights, clipped at zero and renormalized.
    A = np.empty((len(basis_t), len(atoms)))
    for col, u in enumerate(atoms):
        for row, alpha in enumerate(basis_t):
            v = 1.0
            for x, e in zip(u, alpha):
                if e:
                    v *= x ** e
            A[row, col] = v
    rhs = np.array([y.values[y.index.pos(alpha)] for alpha in basis_t])
    tau, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    tau = np.clip(tau, 0.0, None)
    total = float(tau.sum())
    if total <= 1e-8:
        raise ExtractionFailure("moment matching produced no positive weight")
    tau = tau / total

    keep = tau > 1e-8
    atom_set = AtomSet(atoms=tuple(np.asarray(u) for u, kp in zip(atoms, keep) if kp),
                       weights=tau[keep] / tau[keep].sum())
    return cert, atom_set


def certify(
    atoms: AtomSet,
    f: Polynomial,
    G: MatrixPolynomial,
    theta: MatrixPolynomial | None,
    report: SolveReport,
    tol_feas: float = 1e-4,
    tol_gap: float = 1e-3,
    tol_kkt: float = 1e-3,
) -> CertReport:
    """Check each atom for feasibility, objective match, and (with a
    multiplier expression) first order optimality.

    An atom is certified when all thresholds hold, rejected when it is
    infeasible beyond tol_feas, and suspect otherwise.  Verdicts are data,
    not exceptions.
    """
    bound = report.primal_obj
    checks = []
    for u, tau in zip(atoms.atoms, atoms.weights):
        Gu = G.evaluate(u)
        min_eig = float(np.min(np.linalg.eigvalsh(Gu)))
        fu = f.evaluate(u)
        gap = abs(fu - bound)
        feasible = min_eig >= -tol_feas
        gap_ok = np.isfinite(bound) and gap <= tol_gap * (1.0 + abs(bound))
        kkt = None
        kkt_ok = True
        if theta is not None:
            kkt = lme.kkt_residual(f, G, theta, u)
            kkt_ok = max(kkt) <= tol_kkt
        if not feasible:
            verdict = "rejected"
        elif gap_ok and kkt_ok:
            verdict = "certified"
        else:
            verdict = "suspect"
        checks.append(AtomCheck(point=np.asarray(u), weight=float(tau),
                                min_eig_G=min_eig, objective=fu,
                                objective_gap=gap, kkt=kkt, verdict=verdict))
    if any(c.verdict == "rejected" for c in checks):
        overall = "rejected"
    elif all(c.verdict == "certified" for c in checks):
        overall = "certified"
    else:
        overall = "suspect"
    return CertReport(checks=tuple(checks), verdict=overall)
