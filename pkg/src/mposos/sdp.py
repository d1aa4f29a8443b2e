"""Conic solver backends and the SDPA sparse exchange format.

The backend contract is narrow: take a :class:`~mposos.relax.ConicProblem`
plus :class:`SolverSettings`, return a :class:`SolveReport` with primal/dual
bounds and an explicit status.  Three adapters are provided:

* ``clarabel`` (default for desk-scale blocks): an interior-point solver with
  static regularization, run on the equality-reduced problem.  Equality rows
  are eliminated against an SVD nullspace basis first, because
  ideal-truncation rows are heavily redundant.
* ``cvxopt``: the CVXOPT cone LP on the same reduced formulation; kept as an
  independent interior-point implementation and used by the SDPA re-import
  path.
* ``scs``: a first-order splitting solver fed the problem directly (zero cone
  for equalities, scaled triangular PSD cones).  It covers the larger
  standard-hierarchy instances whose dense PSD scaling blocks no longer fit
  an interior-point factorization.

Dual infeasibility certificates are mapped to an explicit unbounded status
(the relaxation value is minus infinity) rather than any large negative
number.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .relax import ConicProblem, MomentVector, PsdBlock

STATUS_OPTIMAL = "optimal"
STATUS_NEAR_OPTIMAL = "near_optimal"
STATUS_PRIMAL_INFEASIBLE = "primal_infeasible"
STATUS_UNBOUNDED = "dual_infeasible_unbounded"
STATUS_MAX_ITER = "max_iter"
STATUS_FAILED = "failed"

ENV_TOL = "MPOSOS_SOLVER_TOL"

# Interior-point backends keep a dense scaling block per PSD cone of size
# Delta(m)^2; above this budget the first-order backend takes over.
_IPM_BLOCK_BUDGET = 6.0e7


@dataclass
class SolverSettings:
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8
    max_iter: int = 200
    time_limit: float | None = None
    verbosity: int = 0
    backend: str = "auto"  # auto | clarabel | cvxopt | scs

    def __post_init__(self):
        if self.feas_tol <= 0 or self.gap_tol <= 0:
            raise ValueError("solver tolerances must be positive")

    @classmethod
    def from_env(cls, **overrides) -> "SolverSettings":
        """Defaults, with MPOSOS_SOLVER_TOL overriding both tolerances."""
        settings = cls(**overrides)
        raw = os.environ.get(ENV_TOL)
        if raw:
            tol = float(raw)
            settings.feas_tol = tol
            settings.gap_tol = tol
        return settings


@dataclass
class SolveReport:
    status: str
    y: MomentVector | None
    primal_obj: float
    dual_obj: float
    residuals: dict[str, float] = field(default_factory=dict)
    wall_time: float = 0.0
    iterations: int | None = None
    backend: str = ""
    message: str = ""

    @property
    def optimal(self) -> bool:
        return self.status in (STATUS_OPTIMAL, STATUS_NEAR_OPTIMAL)

    @property
    def unbounded(self) -> bool:
        return self.status == STATUS_UNBOUNDED


# ---------------------------------------------------------------------------
# shared assembly helpers
# ---------------------------------------------------------------------------

def _objective_vector(problem: ConicProblem) -> np.ndarray:
    c = np.zeros(problem.num_vars)
    for p, v in problem.objective.items():
        c[p] = v
    return c


def _equality_system(problem: ConicProblem) -> tuple[np.ndarray, np.ndarray]:
    nv = problem.num_vars
    rows = len(problem.equalities)
    A = np.zeros((rows, nv))
    b = np.zeros(rows)
    for r, row in enumerate(problem.equalities):
        for p, c in row.coeffs.items():
            A[r, p] = c
        b[r] = row.rhs
    return A, b


def _reduce_equalities(A: np.ndarray, b: np.ndarray, tol: float
                       ) -> tuple[np.ndarray, np.ndarray, float]:
    """Particular solution and nullspace basis of A y = b via SVD.

    Returns (y_p, N, inconsistency) where the columns of N span ker A and
    inconsistency is ||A y_p - b||_inf.
    """
    nv = A.shape[1]
    if A.shape[0] == 0:
        return np.zeros(nv), np.eye(nv), 0.0
    U, s, Vt = np.linalg.svd(A, full_matrices=True)
    cutoff = tol * (s[0] if s.size else 1.0)
    rank = int(np.sum(s > cutoff))
    y_p = Vt[:rank].T @ ((U[:, :rank].T @ b) / s[:rank])
    N = Vt[rank:].T
    inconsistency = float(np.max(np.abs(A @ y_p - b))) if A.size else 0.0
    return y_p, N, inconsistency


def _block_matrix_full(block: PsdBlock, nv: int) -> sp.csr_matrix:
    """Sparse E with vec_full(block(y)) = E @ [y; 1], column-major full vec."""
    m = block.size
    rows, cols, vals = [], [], []
    for pos, i, j, c in block.entries:
        col = nv if pos < 0 else pos
        rows.append(j * m + i)
        cols.append(col)
        vals.append(c)
        if i != j:
            rows.append(i * m + j)
            cols.append(col)
            vals.append(c)
    return sp.csr_matrix((vals, (rows, cols)), shape=(m * m, nv + 1))


def _block_matrix_tri(block: PsdBlock, nv: int, lower: bool) -> sp.csr_matrix:
    """Sparse E with svec(block(y)) = E @ [y; 1], sqrt(2)-scaled triangle.

    ``lower=False`` packs the upper triangle by columns (Clarabel layout);
    ``lower=True`` packs the lower triangle by columns (SCS layout).
    """
    m = block.size
    sq2 = math.sqrt(2.0)
    rows, cols, vals = [], [], []
    for pos, i, j, c in block.entries:
        col = nv if pos < 0 else pos
        if lower:
            idx = i * m - (i * (i - 1)) // 2 + (j - i)
        else:
            idx = (j * (j + 1)) // 2 + i
        rows.append(idx)
        cols.append(col)
        vals.append(c if i == j else c * sq2)
    return sp.csr_matrix((vals, (rows, cols)), shape=(m * (m + 1) // 2, nv + 1))


def _min_eigs(problem: ConicProblem, y: np.ndarray) -> dict[str, float]:
    out = {}
    for block in problem.psd_blocks:
        mat = block.materialize(y)
        out[f"min_eig_{block.label}"] = float(np.min(np.linalg.eigvalsh(mat)))
    return out


def _validated_report(problem: ConicProblem, y: np.ndarray, primal: float,
                      dual: float, status: str, settings: SolverSettings,
                      backend: str, iterations: int | None, message: str = ""
                      ) -> SolveReport:
    A, b = _equality_system(problem)
    eq_resid = float(np.max(np.abs(A @ y - b))) if A.size else 0.0
    residuals = {"equality": eq_resid}
    residuals.update(_min_eigs(problem, y))
    scale = 1.0 + float(np.max(np.abs(y)))
    worst_eig = min((v for k, v in residuals.items() if k.startswith("min_eig")),
                    default=0.0)
    if status == STATUS_OPTIMAL:
        ok = (eq_resid <= 100 * settings.feas_tol * scale
              and worst_eig >= -100 * settings.feas_tol * scale)
        if not ok:
            status = STATUS_NEAR_OPTIMAL
    return SolveReport(
        status=status,
        y=MomentVector(problem.index, y),
        primal_obj=primal,
        dual_obj=dual,
        residuals=residuals,
        backend=backend,
        iterations=iterations,
        message=message,
    )


@dataclass
class _Reduced:
    """Equality-eliminated form shared by the interior-point backends."""

    y_p: np.ndarray
    N: np.ndarray
    c_red: np.ndarray
    offset: float
    inconsistency: float

    @property
    def nz(self) -> int:
        return self.N.shape[1]


def _reduce(problem: ConicProblem) -> _Reduced:
    c_full = _objective_vector(problem)
    A, b = _equality_system(problem)
    y_p, N, inconsistency = _reduce_equalities(A, b, 1e-12)
    return _Reduced(y_p=y_p, N=N, c_red=N.T @ c_full,
                    offset=float(c_full @ y_p), inconsistency=inconsistency)


def _pinned_report(problem: ConicProblem, red: _Reduced,
                   settings: SolverSettings, backend: str) -> SolveReport:
    """Handle the degenerate case where equalities pin y uniquely."""
    y = red.y_p
    eigs = _min_eigs(problem, y)
    scale = 1.0 + float(np.max(np.abs(y)))
    feasible = min(eigs.values(), default=0.0) >= -settings.feas_tol * scale
    primal = red.offset if feasible else math.inf
    return SolveReport(
        status=STATUS_OPTIMAL if feasible else STATUS_PRIMAL_INFEASIBLE,
        y=MomentVector(problem.index, y), primal_obj=primal, dual_obj=primal,
        residuals=eigs, backend=backend,
        message="equalities pin the moment vector uniquely")


def _infeasible_rows_report(red: _Reduced, backend: str) -> SolveReport:
    return SolveReport(status=STATUS_PRIMAL_INFEASIBLE, y=None,
                       primal_obj=math.inf, dual_obj=math.inf,
                       residuals={"equality_inconsistency": red.inconsistency},
                       backend=backend,
                       message="equality rows are inconsistent")


# ---------------------------------------------------------------------------
# backends
# ---------------------------------------------------------------------------

# Moment relaxations of problems with non-attained optima make interior-point
# iterates pass close to the optimal value and then diverge.  When the
# requested accuracy is unreachable, retry at these gap/feasibility targets
# and report the first convergent run as near-optimal.
_CLARABEL_LADDER = (1e-6, 8e-5, 3e-4, 1e-3)


def _solve_clarabel(problem: ConicProblem, settings: SolverSettings) -> SolveReport:
    import clarabel

    red = _reduce(problem)
    if red.inconsistency > settings.feas_tol:
        return _infeasible_rows_report(red, "clarabel")
    if red.nz == 0:
        return _pinned_report(problem, red, settings, "clarabel")

    nv = problem.num_vars
    aug = np.concatenate([red.y_p, [1.0]])
    a_parts, b_parts, cones = [], [], []
    for block in problem.psd_blocks:
        E = _block_matrix_tri(block, nv, lower=False)
        a_parts.append(-(E[:, :nv] @ red.N))
        b_parts.append(E @ aug)
        cones.append(clarabel.PSDTriangleConeT(block.size))
    A = sp.csc_matrix(np.vstack(a_parts))
    b = np.concatenate(b_parts)
    P = sp.csc_matrix((red.nz, red.nz))

    def attempt(tol: float):
        cl_settings = clarabel.DefaultSettings()
        cl_settings.verbose = settings.verbosity > 1
        # Chordal decomposition destabilizes the tiny equality-pinned reduced
        # problems this adapter sees, and buys nothing at desk scale.
        cl_settings.chordal_decomposition_enable = False
        cl_settings.max_iter = settings.max_iter
        cl_settings.tol_gap_abs = tol
        cl_settings.tol_gap_rel = tol
        cl_settings.tol_feas = max(tol, settings.feas_tol)
        if settings.time_limit:
            cl_settings.time_limit = settings.time_limit
        solver = clarabel.DefaultSolver(P, red.c_red, A, b, cones, cl_settings)
        return solver.solve()

    ladder = [settings.gap_tol]
    ladder += [t for t in _CLARABEL_LADDER if t > settings.gap_tol]
    sol = None
    status = STATUS_FAILED
    used_tol = ladder[0]
    message = ""
    for tol in ladder:
        try:
            sol = attempt(tol)
        except BaseException as exc:  # the rust bridge raises raw pyo3 errors
            return SolveReport(status=STATUS_FAILED, y=None,
                               primal_obj=math.nan, dual_obj=math.nan,
                               backend="clarabel", message=f"clarabel error: {exc}")
        S = clarabel.SolverStatus
        status_raw = sol.status
        message = f"clarabel status {status_raw} at tol {tol:g}"
        if status_raw in (S.DualInfeasible, S.AlmostDualInfeasible):
            return SolveReport(status=STATUS_UNBOUNDED, y=None,
                               primal_obj=-math.inf, dual_obj=-math.inf,
                               backend="clarabel", iterations=sol.iterations,
                               message="certificate of an unbounded objective ray")
        if status_raw in (S.PrimalInfeasible, S.AlmostPrimalInfeasible):
            return SolveReport(status=STATUS_PRIMAL_INFEASIBLE, y=None,
                               primal_obj=math.inf, dual_obj=math.inf,
                               backend="clarabel", iterations=sol.iterations,
                               message="certificate of primal infeasibility")
        if status_raw in (S.Solved, S.AlmostSolved):
            tight = tol <= settings.gap_tol
            status = (STATUS_OPTIMAL
                      if status_raw == S.Solved and tight else STATUS_NEAR_OPTIMAL)
            used_tol = tol
            break
        if status_raw in (S.MaxIterations, S.MaxTime):
            status = STATUS_MAX_ITER
            used_tol = tol
            break
        # NumericalError / InsufficientProgress: retry at the next rung

    if sol is None or status == STATUS_FAILED:
        return SolveReport(status=STATUS_FAILED, y=None,
                           primal_obj=math.nan, dual_obj=math.nan,
                           backend="clarabel", message=message)
    y = red.y_p + red.N @ np.asarray(sol.x)
    primal = float(sol.obj_val) + red.offset
    dual = float(sol.obj_val_dual) + red.offset
    report = _validated_report(problem, y, primal, dual, status, settings,
                               "clarabel", sol.iterations, message=message)
    report.residuals["achieved_tol"] = used_tol
    return report


def _solve_cvxopt(problem: ConicProblem, settings: SolverSettings) -> SolveReport:
    import cvxopt
    import cvxopt.solvers

    red = _reduce(problem)
    if red.inconsistency > settings.feas_tol:
        return _infeasible_rows_report(red, "cvxopt")
    if red.nz == 0:
        return _pinned_report(problem, red, settings, "cvxopt")

    nv = problem.num_vars
    aug = np.concatenate([red.y_p, [1.0]])
    g_parts, h_parts, dims_s = [], [], []
    for block in problem.psd_blocks:
        E = _block_matrix_full(block, nv)
        g_parts.append(-(E[:, :nv] @ red.N))
        h_parts.append(E @ aug)
        dims_s.append(block.size)
    G = cvxopt.matrix(np.vstack(g_parts))
    h = cvxopt.matrix(np.concatenate(h_parts))
    c = cvxopt.matrix(red.c_red)

    options = {
        "show_progress": settings.verbosity > 1,
        "maxiters": settings.max_iter,
        "abstol": settings.gap_tol,
        "reltol": settings.gap_tol,
        "feastol": settings.feas_tol,
    }
    try:
        sol = cvxopt.solvers.conelp(
            c, G, h, dims={"l": 0, "q": [], "s": dims_s}, options=options)
    except (ValueError, ArithmeticError) as exc:
        return SolveReport(status=STATUS_FAILED, y=None,
                           primal_obj=math.nan, dual_obj=math.nan,
                           backend="cvxopt", message=f"cvxopt error: {exc}")

    status_raw = sol["status"]
    iterations = sol.get("iterations")
    if status_raw == "dual infeasible":
        return SolveReport(status=STATUS_UNBOUNDED, y=None,
                           primal_obj=-math.inf, dual_obj=-math.inf,
                           backend="cvxopt", iterations=iterations,
                           message="certificate of an unbounded objective ray")
    if status_raw == "primal infeasible":
        return SolveReport(status=STATUS_PRIMAL_INFEASIBLE, y=None,
                           primal_obj=math.inf, dual_obj=math.inf,
                           backend="cvxopt", iterations=iterations,
                           message="certificate of primal infeasibility")
    if sol["x"] is None:
        return SolveReport(status=STATUS_FAILED, y=None,
                           primal_obj=math.nan, dual_obj=math.nan,
                           backend="cvxopt", iterations=iterations,
                           message=f"cvxopt status {status_raw!r} without iterate")

    y = red.y_p + red.N @ np.array(sol["x"]).ravel()
    primal = float(sol["primal objective"]) + red.offset
    dual_raw = sol["dual objective"]
    dual = (float(dual_raw) + red.offset) if dual_raw is not None else -math.inf
    if status_raw == "optimal":
        status = STATUS_OPTIMAL
    else:
        gap = sol.get("relative gap")
        pres = sol.get("primal infeasibility")
        dres = sol.get("dual infeasibility")
        close = all(v is not None and v < 1e-5 for v in (gap, pres, dres))
        if close:
            status = STATUS_NEAR_OPTIMAL
        elif iterations is not None and iterations >= settings.max_iter:
            status = STATUS_MAX_ITER
        else:
            status = STATUS_FAILED
    return _validated_report(problem, y, primal, dual, status, settings,
                             "cvxopt", iterations,
                             message=f"cvxopt status {status_raw!r}")


def _solve_scs(problem: ConicProblem, settings: SolverSettings) -> SolveReport:
    import scs

    nv = problem.num_vars
    c_full = _objective_vector(problem)

    parts = []
    b_parts = []
    n_eq = len(problem.equalities)
    rows, cols, vals = [], [], []
    for r, row in enumerate(problem.equalities):
        for p, c in row.coeffs.items():
            rows.append(r)
            cols.append(p)
            vals.append(c)
    parts.append(sp.csr_matrix((vals, (rows, cols)), shape=(n_eq, nv)))
    b_parts.append(np.array([row.rhs for row in problem.equalities]))

    sizes = []
    for block in problem.psd_blocks:
        E = _block_matrix_tri(block, nv, lower=True)
        parts.append(-E[:, :nv])
        b_parts.append(np.asarray(E[:, nv].todense()).ravel())
        sizes.append(block.size)
    A = sp.csc_matrix(sp.vstack(parts))
    b = np.concatenate(b_parts)
    cone = {"z": n_eq, "s": sizes}

    eps = min(settings.feas_tol, settings.gap_tol)
    kwargs = dict(
        eps_abs=eps,
        eps_rel=eps,
        eps_infeas=1e-9,
        max_iters=max(settings.max_iter * 2500, 50000),
        verbose=settings.verbosity > 1,
    )
    if settings.time_limit:
        kwargs["time_limit_secs"] = settings.time_limit
    sol = scs.solve({"A": A, "b": b, "c": c_full}, cone, **kwargs)

    info = sol["info"]
    raw = info["status"]
    iterations = info.get("iter")
    if raw.startswith("unbounded"):
        return SolveReport(status=STATUS_UNBOUNDED, y=None,
                           primal_obj=-math.inf, dual_obj=-math.inf,
                           backend="scs", iterations=iterations,
                           message=f"scs status {raw!r}")
    if raw.startswith("infeasible"):
        return SolveReport(status=STATUS_PRIMAL_INFEASIBLE, y=None,
                           primal_obj=math.inf, dual_obj=math.inf,
                           backend="scs", iterations=iterations,
                           message=f"scs status {raw!r}")
    if sol["x"] is None or not np.all(np.isfinite(sol["x"])):
        return SolveReport(status=STATUS_FAILED, y=None,
                           primal_obj=math.nan, dual_obj=math.nan,
                           backend="scs", iterations=iterations,
                           message=f"scs status {raw!r}")

    y = np.asarray(sol["x"], dtype=float)
    primal = float(info["pobj"])
    dual = float(info["dobj"])
    if raw == "solved":
        status = STATUS_OPTIMAL
    elif raw.startswith("solved"):
        status = STATUS_MAX_ITER if "max_iters" in raw else STATUS_NEAR_OPTIMAL
    else:
        status = STATUS_FAILED
    return _validated_report(problem, y, primal, dual, status, settings,
                             "scs", iterations, message=f"scs status {raw!r}")


_BACKENDS = {
    "clarabel": _solve_clarabel,
    "cvxopt": _solve_cvxopt,
    "scs": _solve_scs,
}


def _pick_backend(problem: ConicProblem) -> str:
    budget = sum((b.size * (b.size + 1) // 2) ** 2 for b in problem.psd_blocks)
    return "clarabel" if budget <= _IPM_BLOCK_BUDGET else "scs"


def solve(problem: ConicProblem, settings: SolverSettings | None = None) -> SolveReport:
    """Solve the conic problem with the configured (or auto-chosen) backend.

    In ``auto`` mode a failed interior-point run falls through to the next
    adapter (clarabel, then cvxopt, then scs); the report names the backend
    that actually produced it.
    """
    if settings is None:
        settings = SolverSettings.from_env()
    if settings.backend == "auto":
        chain = (["clarabel", "cvxopt", "scs"]
                 if _pick_backend(problem) == "clarabel" else ["scs"])
    elif settings.backend in _BACKENDS:
        chain = [settings.backend]
    else:
        raise ValueError(f"unknown backend {settings.backend!r}")
    terminal = (STATUS_OPTIMAL, STATUS_NEAR_OPTIMAL,
                STATUS_PRIMAL_INFEASIBLE, STATUS_UNBOUNDED)
    rank = {s: i for i, s in enumerate(
        (*terminal, STATUS_MAX_ITER, STATUS_FAILED))}
    start = time.perf_counter()
    best = None
    for backend in chain:
        report = _BACKENDS[backend](problem, settings)
        if best is None or rank[report.status] < rank[best.status]:
            best = report
        if report.status in terminal:
            break
    best.wall_time = time.perf_counter() - start
    return best


# ---------------------------------------------------------------------------
# SDPA sparse format
# ---------------------------------------------------------------------------

_SDPA_HEADER = (
    '"mposos SDPA sparse export. Dialect: variables are the moment entries; '
    'each PSD block B(y) = A0 + sum y_a A_a >= 0 becomes F_a = A_a, F0 = -A0. '
    'Equality rows a^T y = r are encoded as paired inequalities '
    '(+a^T y >= r, -a^T y >= -r) in one trailing diagonal block.'
)


def export_sdpa(problem: ConicProblem, path: str) -> None:
    """Write the problem in SDPA sparse (.dat-s) text, deterministically."""
    nv = problem.num_vars
    lines = [_SDPA_HEADER, str(nv)]
    block_sizes = [b.size for b in problem.psd_blocks]
    n_eq = len(problem.equalities)
    if n_eq:
        block_sizes.append(-2 * n_eq)
    lines.append(str(len(block_sizes)))
    lines.append(" ".join(str(s) for s in block_sizes))
    c_full = _objective_vector(problem)
    lines.append(" ".join(f"{v:.17g}" for v in c_full))

    entries: list[tuple[int, int, int, int, float]] = []
    for bno, block in enumerate(problem.psd_blocks, start=1):
        for pos, i, j, c in block.entries:
            matno = 0 if pos < 0 else pos + 1
            val = -c if pos < 0 else c  # F0 = -A0
            entries.append((matno, bno, i + 1, j + 1, val))
    if n_eq:
        bno = len(problem.psd_blocks) + 1
        for r, row in enumerate(problem.equalities):
            d_plus, d_minus = 2 * r + 1, 2 * r + 2
            for p, c in sorted(row.coeffs.items()):
                entries.append((p + 1, bno, d_plus, d_plus, c))
                entries.append((p + 1, bno, d_minus, d_minus, -c))
            if row.rhs != 0.0:
                entries.append((0, bno, d_plus, d_plus, row.rhs))
                entries.append((0, bno, d_minus, d_minus, -row.rhs))
    entries.sort()
    for matno, bno, i, j, val in entries:
        lines.append(f"{matno} {bno} {i} {j} {val:.17g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


@dataclass(frozen=True)
class SdpaData:
    """Parsed SDPA sparse problem: min c^T x s.t. sum x_i F_i - F0 >= 0 per block."""

    num_vars: int
    block_sizes: tuple[int, ...]
    c: np.ndarray
    entries: tuple[tuple[int, int, int, int, float], ...]


def read_sdpa(path: str) -> SdpaData:
    """Parse an SDPA sparse (.dat-s) file."""
    raw_lines = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith(('"', "*")):
                continue
            raw_lines.append(line)
    mdim = int(raw_lines[0])
    nblocks = int(raw_lines[1])
    sizes = tuple(int(tok) for tok in raw_lines[2].replace(",", " ").split())
    if len(sizes) != nblocks:
        raise ValueError("SDPA block size line does not match nBLOCK")
    c = np.array([float(tok) for tok in raw_lines[3].replace(",", " ").split()])
    if c.shape != (mdim,):
        raise ValueError("SDPA objective line does not match mDIM")
    entries = []
    for line in raw_lines[4:]:
        toks = line.replace(",", " ").split()
        matno, bno, i, j = (int(t) for t in toks[:4])
        entries.append((matno, bno, i, j, float(toks[4])))
    return SdpaData(num_vars=mdim, block_sizes=sizes, c=c, entries=tuple(entries))


def solve_sdpa(data: SdpaData, settings: SolverSettings | None = None
               ) -> tuple[float, np.ndarray]:
    """Solve a parsed SDPA problem directly with the CVXOPT cone LP.

    Serves as the re-import oracle for :func:`export_sdpa`: it never goes
    through :class:`ConicProblem`, only through the file's own block data.
    """
    import cvxopt
    import cvxopt.solvers

    if settings is None:
        settings = SolverSettings.from_env()
    nv = data.num_vars
    lin_rows = sum(-s for s in data.block_sizes if s < 0)
    sdp_sizes = [s for s in data.block_sizes if s > 0]
    sdp_offsets = {}
    lin_offsets = {}
    off = lin_rows
    lin_off = 0
    for bno, s in enumerate(data.block_sizes, start=1):
        if s > 0:
            sdp_offsets[bno] = off
            off += s * s
        else:
            lin_offsets[bno] = lin_off
            lin_off += -s
    total = off

    G = np.zeros((total, nv))
    h = np.zeros(total)
    for matno, bno, i, j, val in data.entries:
        s = data.block_sizes[bno - 1]
        if s > 0:
            base = sdp_offsets[bno]
            for idx in {base + (j - 1) * s + (i - 1), base + (i - 1) * s + (j - 1)}:
                if matno == 0:
                    h[idx] = -val  # slack is B(x) = sum x F - F0, so h = -F0
                else:
                    G[idx, matno - 1] = -val
        else:
            if i != j:
                raise ValueError("off-diagonal entry in a diagonal SDPA block")
            idx = lin_offsets[bno] + (i - 1)
            if matno == 0:
                h[idx] = -val
            else:
                G[idx, matno - 1] = -val

    options = {
        "show_progress": settings.verbosity > 1,
        "maxiters": settings.max_iter,
        "abstol": settings.gap_tol,
        "reltol": settings.gap_tol,
        "feastol": settings.feas_tol,
    }
    sol = cvxopt.solvers.conelp(
        cvxopt.matrix(data.c), cvxopt.matrix(G), cvxopt.matrix(h),
        dims={"l": lin_rows, "q": [], "s": sdp_sizes}, options=options)
    if sol["status"] not in ("optimal", "unknown") or sol["x"] is None:
        raise RuntimeError(f"SDPA re-import solve failed: status {sol['status']!r}")
    x = np.array(sol["x"]).ravel()
    return float(data.c @ x), x
