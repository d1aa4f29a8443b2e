# Scratch probe: minimal L degrees, Theta degrees, KKT checks on paper examples.
import numpy as np
from mposos.polycore import Polynomial, MatrixPolynomial, uvec
from mposos.lme import build_kkt_system, solve_L, synthesize_lme, kkt_residual, nondegeneracy_probe


def poly(n, terms):
    return Polynomial(n, terms)


def matpoly(entries):
    return MatrixPolynomial(entries)


# ---- Example 3.3(ii) / 7.1 ----
n = 2
x1 = Polynomial.variable(n, 0)
x2 = Polynomial.variable(n, 1)
G71 = matpoly([[x1 * x1 - 2, 0.5 * x1 * x2], [0.5 * x1 * x2, x2 * x2 - 2]])
f71 = x1 * x1 + x2 * x2

sys71 = build_kkt_system(G71)
print("P1 =", sys71.P1)
print("P2 col2 check:", [str(sys71.P2.entry(r, 1)) for r in range(4)])
for ell in range(0, 5):
    r = solve_L(sys71, ell)
    print(f"7.1 ell={ell} feasible={r.feasible} residual={r.residual:.3e}")

sol71 = synthesize_lme(f71, G71)
print("7.1 chosen ell:", sol71.degree, "residual", sol71.residual)
print("7.1 deg theta:", sol71.theta.degree)
print("theta :", sol71.theta)
for u in [(2, 2), (2, -2), (-2, 2), (-2, -2)]:
    print("theta(", u, ") =", np.round(sol71.theta.evaluate(np.array(u, float)), 8))
    print("  kkt:", kkt_residual(f71, G71, sol71.theta, np.array(u, float)))
print("ndc probe 7.1:", nondegeneracy_probe(G71))

# ---- Example 7.2 (3x3 Hankel linear G). Corrected objective reading. ----
n = 6
xs = [Polynomial.variable(n, i) for i in range(6)]
G72 = matpoly([
    [xs[0], xs[1], xs[2]],
    [xs[1], xs[3], xs[4]],
    [xs[2], xs[4], xs[5]],
])
f72 = (xs[0] + 1) * (xs[3] + 1) - (xs[1] + 1) * (xs[1] + 1) + 0.1 * (xs[0] + xs[3] + xs[5] - 3)
print("\nf72 =", f72, " deg", f72.degree, " nterms", len(f72))
for ell in range(0, 2):
    r = solve_L(build_kkt_system(G72), ell)
    print(f"7.2 ell={ell} feasible={r.feasible} residual={r.residual:.3e}")
sol72 = synthesize_lme(f72, G72)
print("7.2 chosen ell:", sol72.degree, "deg theta:", sol72.theta.degree)
u0 = np.zeros(6)
print("theta(0) =\n", np.round(sol72.theta.evaluate(u0), 8))
print("kkt at 0:", kkt_residual(f72, G72, sol72.theta, u0))

# ---- Example 7.3 ----
n = 6
xs = [Polynomial.variable(n, i) for i in range(6)]
G73 = matpoly([
    [1 + 2 * xs[0], xs[2] - xs[3], xs[4] - xs[5]],
    [xs[2] - xs[3], 1 + 2 * xs[2], xs[0] - xs[1]],
    [xs[4] - xs[5], xs[0] - xs[1], 1 + 2 * xs[5]],
])
f73 = (1 + 2 * xs[0]) * (1 + 2 * xs[2]) - (xs[2] - xs[3]) ** 2 + xs[0] + xs[2] + xs[5]
for ell in range(0, 2):
    r = solve_L(build_kkt_system(G73), ell)
    print(f"\n7.3 ell={ell} feasible={r.feasible} residual={r.residual:.3e}")
sol73 = synthesize_lme(f73, G73)
print("7.3 chosen ell:", sol73.degree, "deg theta:", sol73.theta.degree)
u = -0.5 * np.ones(6)
print("theta(-.5 1) =\n", np.round(sol73.theta.evaluate(u), 8))
print("kkt at -0.5*1:", kkt_residual(f73, G73, sol73.theta, u))

# ---- Example 7.4 (G of 3.3(iii)) ----
n = 3
x1, x2, x3 = (Polynomial.variable(n, i) for i in range(3))
G74 = matpoly([[x1, x1 * x2 - 1], [x1 * x2 - 1, x2 * x3 - 1]])
f74 = (x1 ** 3 + x2 ** 3 + x3 ** 3 + 4 * x1 * x2 * x3
       - x1 * (x2 ** 2 + x3 ** 2) - x2 * (x1 ** 2 + x3 ** 2) - x3 * (x2 ** 2 + x1 ** 2))
for ell in range(0, 4):
    r = solve_L(build_kkt_system(G74), ell)
    print(f"\n7.4 ell={ell} feasible={r.feasible} residual={r.residual:.3e}")
sol74 = synthesize_lme(f74, G74)
print("7.4 chosen ell:", sol74.degree, "deg theta:", sol74.theta.degree)
u_print = np.array([0.6798, 1.0876, 1.0113])
print("kkt at printed minimizer (4dp):", kkt_residual(f74, G74, sol74.theta, u_print))

# check the paper's printed L for 3.3(iii) against our P
L_paper = matpoly([
    [1 - x1 * x2, Polynomial.zero(n), 1 - x2 * x3, x2, Polynomial.zero(n), Polynomial.zero(n), x2],
    [x1, -0.5 * x2, 0.5 * x3, Polynomial.constant(n, -1), Polynomial.zero(n), Polynomial.zero(n), Polynomial.zero(n)],
    [-1 * x1, x2, Polynomial.zero(n), Polynomial.constant(n, 1), Polynomial.zero(n), Polynomial.zero(n), Polynomial.constant(n, -1)],
])
sys74 = build_kkt_system(G74)
prod = L_paper @ sys74.P
err = 0.0
for i in range(3):
    for j in range(3):
        d = prod.entry(i, j) - (1.0 if i == j else 0.0)
        err = max(err, d.max_abs_coeff())
print("paper L for 3.3(iii): ||L P - I|| =", err)

# ---- Example 7.5 ----
n = 3
x1, x2, x3 = (Polynomial.variable(n, i) for i in range(3))
G75 = matpoly([[x1 - x2, x2 + x3 ** 2], [x2 + x3 ** 2, x3]])
f75 = x1 * x2 - x2 * x3
for ell in range(0, 3):
    r = solve_L(build_kkt_system(G75), ell)
    print(f"\n7.5 ell={ell} feasible={r.feasible} residual={r.residual:.3e}")
sol75 = synthesize_lme(f75, G75)
print("7.5 chosen ell:", sol75.degree, "deg theta:", sol75.theta.degree)
u_print = np.array([0.3375, 0.0829, 0.5348])
print("kkt at printed minimizer (4dp):", kkt_residual(f75, G75, sol75.theta, u_print))

# ---- degenerate case: m=n=1, G=(x^2+1)^2 (x-1) ----
n = 1
x = Polynomial.variable(n, 0)
Gdeg = matpoly([[(x * x + 1) ** 2 * (x - 1)]])
sysd = build_kkt_system(Gdeg)
for ell in range(0, 7):
    r = solve_L(sysd, ell)
    print(f"degenerate ell={ell} feasible={r.feasible} residual={r.residual:.3e}")

# ---- paper L for 3.3(ii) check ----
n = 2
x1 = Polynomial.variable(n, 0)
x2 = Polynomial.variable(n, 1)
z = Polynomial.zero(n)
L33ii = matpoly([
    [0.25 * x1, z, Polynomial.constant(n, -0.5), z, z, z],
    [0.25 * x2 - (3 / 32) * x1 ** 2 * x2, 0.25 * x1 - (3 / 32) * x1 * x2 ** 2,
     (3 / 16) * x1 * x2, Polynomial.constant(n, -0.25), Polynomial.constant(n, -0.25), (3 / 16) * x1 * x2],
    [z, 0.25 * x2, z, z, z, Polynomial.constant(n, -0.5)],
])
prod = L33ii @ sys71.P
err = 0.0
for i in range(3):
    for j in range(3):
        d = prod.entry(i, j) - (1.0 if i == j else 0.0)
        err = max(err, d.max_abs_coeff())
print("paper L for 3.3(ii): ||L P - I|| =", err)
