# Scratch probe: relaxation bounds at the paper's pinned orders.
import sys
import time

import numpy as np

from mposos.polycore import Polynomial, MatrixPolynomial
from mposos.lme import synthesize_lme
from mposos.relax import build_relaxation
from mposos.sdp import SolverSettings, solve


def mk_71():
    n = 2
    x1, x2 = (Polynomial.variable(n, i) for i in range(n))
    G = MatrixPolynomial([[x1 * x1 - 2, 0.5 * x1 * x2], [0.5 * x1 * x2, x2 * x2 - 2]])
    f = x1 * x1 + x2 * x2
    return f, G


def mk_72():
    n = 6
    xs = [Polynomial.variable(n, i) for i in range(n)]
    G = MatrixPolynomial([[xs[0], xs[1], xs[2]], [xs[1], xs[3], xs[4]], [xs[2], xs[4], xs[5]]])
    f = (xs[0] + 1) * (xs[3] + 1) - (xs[1] + 1) ** 2 + 0.1 * (xs[0] + xs[3] + xs[5] - 3)
    return f, G


def mk_73():
    n = 6
    xs = [Polynomial.variable(n, i) for i in range(n)]
    G = MatrixPolynomial([
        [1 + 2 * xs[0], xs[2] - xs[3], xs[4] - xs[5]],
        [xs[2] - xs[3], 1 + 2 * xs[2], xs[0] - xs[1]],
        [xs[4] - xs[5], xs[0] - xs[1], 1 + 2 * xs[5]],
    ])
    f = (1 + 2 * xs[0]) * (1 + 2 * xs[2]) - (xs[2] - xs[3]) ** 2 + xs[0] + xs[2] + xs[5]
    return f, G


def mk_74():
    n = 3
    x1, x2, x3 = (Polynomial.variable(n, i) for i in range(n))
    G = MatrixPolynomial([[x1, x1 * x2 - 1], [x1 * x2 - 1, x2 * x3 - 1]])
    f = (x1 ** 3 + x2 ** 3 + x3 ** 3 + 4 * x1 * x2 * x3
         - x1 * (x2 ** 2 + x3 ** 2) - x2 * (x1 ** 2 + x3 ** 2) - x3 * (x2 ** 2 + x1 ** 2))
    return f, G


def mk_75():
    n = 3
    x1, x2, x3 = (Polynomial.variable(n, i) for i in range(n))
    G = MatrixPolynomial([[x1 - x2, x2 + x3 ** 2], [x2 + x3 ** 2, x3]])
    f = x1 * x2 - x2 * x3
    return f, G


def run(name, f, G, kind, k, theta=None, backend="auto"):
    t0 = time.perf_counter()
    prob, meta = build_relaxation(kind, f, G, theta, k)
    t_build = time.perf_counter() - t0
    settings = SolverSettings(backend=backend)
    rep = solve(prob, settings)
    print(f"{name} {kind} k={k}: bound={rep.primal_obj} dual={rep.dual_obj} "
          f"status={rep.status} backend={rep.backend} t_build={t_build:.2f}s "
          f"t_solve={rep.wall_time:.2f}s dims={meta.block_dims} "
          f"neq={meta.num_equalities} nv={meta.moment_length}")
    return rep


which = sys.argv[1] if len(sys.argv) > 1 else "all"

if which in ("all", "71"):
    f, G = mk_71()
    sol = synthesize_lme(f, G)
    run("7.1", f, G, "strengthened", 3, sol.theta)
    for k in (3, 4, 8):
        run("7.1", f, G, "standard", k)

if which in ("all", "72"):
    f, G = mk_72()
    sol = synthesize_lme(f, G)
    run("7.2", f, G, "strengthened", 1, sol.theta)
    run("7.2", f, G, "strengthened", 2, sol.theta)

if which in ("all", "73"):
    f, G = mk_73()
    sol = synthesize_lme(f, G)
    run("7.3", f, G, "strengthened", 1, sol.theta)
    run("7.3", f, G, "strengthened", 2, sol.theta)
    run("7.3", f, G, "standard", 1)

if which in ("all", "74"):
    f, G = mk_74()
    sol = synthesize_lme(f, G)
    for k in (3, 4, 5):
        run("7.4", f, G, "strengthened", k, sol.theta)
    run("7.4", f, G, "standard", 2)
    run("7.4", f, G, "standard", 3)

if which in ("all", "75"):
    f, G = mk_75()
    sol = synthesize_lme(f, G)
    run("7.5", f, G, "strengthened", 3, sol.theta)
    run("7.5", f, G, "strengthened", 4, sol.theta)

if which == "73big":
    f, G = mk_73()
    run("7.3", f, G, "standard", 4, backend="scs")
