"""Independent reference values for the C++ tests.

Run once; the printed header is frozen as tests/oracle_values.hpp.
Uses sympy for exact polynomial algebra and numpy/cvxpy for the
interpolation problems.
"""
import cvxpy as cp
import numpy as np
import sympy as sp

out = []


def emit(line=""):
    out.append(line)


def fmt(x):
    return repr(float(x))


# degree-3 pencil: det[x 1 - A - z B]
x, z, t = sp.symbols("x z t")
s3 = sp.sqrt(3)
A = sp.diag(-1, sp.Rational(-1, 2), 1)
B = sp.Matrix([[0, sp.Rational(-1, 2), 0], [sp.Rational(-1, 2), 0, -s3 / 2], [0, -s3 / 2, 0]])
p = sp.expand((x * sp.eye(3) - A - z * B).det())
poly = sp.Poly(p, x, z)
emit("// det[x 1 - A - z B] for the degree-3 pair, coefficient of x^a z^b")
emit("inline constexpr double kDegree3Coefficients[4][4] = {")
for a in range(4):
    row = [fmt(poly.coeff_monomial(x**a * z**b)) for b in range(4)]
    emit("    {" + ", ".join(row) + "},")
emit("};")
factors = sp.factor_list(p, x, z)[1]
emit("// real factor degrees in x: " + ", ".join(str(sp.degree(f, x)) for f, _ in factors))
emit("inline constexpr int kDegree3FactorDegrees[2] = {%s};" % ", ".join(
    sorted(str(sp.degree(f, x)) for f, _ in factors)))
emit()

# irreducible family: d/dt det[x 1 + A + i B + t B] at t = 0
emit("// derivative of det[x 1 + A + iB + tB] at t = 0, for D = 2..6 and x in kExpansionX")
xs = [0.3, 1.7, -0.8]
emit("inline constexpr double kExpansionX[3] = {%s};" % ", ".join(fmt(v) for v in xs))
emit("inline constexpr double kExpansionDerivative[5][3][2] = {")
for D in range(2, 7):
    Am = sp.Matrix(D, D, lambda j, k: 0 if j == k else sp.Rational(1, 2))
    Bm = sp.Matrix(D, D, lambda j, k: 0 if j == k else (sp.I / 2 if j < k else -sp.I / 2))
    d = sp.diff((x * sp.eye(D) + Am + sp.I * Bm + t * Bm).det(method="berkowitz"), t).subs(t, 0)
    vals = []
    for xv in xs:
        v = complex(sp.N(d.subs(x, sp.Rational(str(xv))), 30))
        vals.append("{%s, %s}" % (fmt(v.real), fmt(v.imag)))
    emit("    {" + ", ".join(vals) + "},")
emit("};")
# irreducibility over Q(i) of the curve det[x 1 - A - z B] of the family, D = 2..6
deg = []
for D in range(2, 7):
    Am = sp.Matrix(D, D, lambda j, k: 0 if j == k else sp.Rational(1, 2))
    Bm = sp.Matrix(D, D, lambda j, k: 0 if j == k else (sp.I / 2 if j < k else -sp.I / 2))
    q = sp.expand((x * sp.eye(D) - Am - z * Bm).det(method="berkowitz"))
    fl = sp.factor_list(q, x, z, extension=sp.I)[1]
    deg.append(max(sp.degree(f, x) for f, _ in fl))
emit("// largest factor degree of the family curve over Q(i), D = 2..6")
emit("inline constexpr int kIrreducibleLargestFactor[5] = {%s};" % ", ".join(map(str, deg)))
emit()

# planted instances
X1 = np.array([[0.20, 0.08], [0.08, 0.35]], dtype=complex)
Y1 = np.array([[0.30, -0.05 + 0.07j], [-0.05 - 0.07j, 0.12]])
Z1 = np.eye(2) - X1 - Y1
lam1 = min(np.linalg.eigvalsh(m).min() for m in (X1, Y1, Z1))
emit("// first planted instance: the interpolation is unique with Choi blocks B_i,")
emit("// so the optimum of the min-eigenvalue program is min_i lambda_min(B_i)")
emit("inline constexpr double kPlanted1Lambda = %s;" % fmt(lam1))

# second planted instance: C^3 -> M_2 map F_k with sum_k V_ik F_k = A_i
th = [2 * np.pi * i / 3 for i in range(3)]
Ai = [(2 / 3) * np.outer([np.cos(a), np.sin(a)], [np.cos(a), np.sin(a)]) for a in th]
Xd = np.array([0.11, 0.37, 0.23])
Yd = np.array([0.29, 0.07, 0.41])
Bd = [Xd, Yd, 1 - Xd - Yd]
V = np.array([[b[k] / 2 + 1 / 6 for k in range(3)] for b in Bd])
Vi = np.linalg.inv(V)
F = [sum(Vi[k, i] * Ai[i] for i in range(3)) for k in range(3)]
lam2 = min(np.linalg.eigvalsh(f).min() for f in F)
emit("// second planted instance: unique linear interpolation onto M_2, not positive")
emit("inline constexpr double kPlanted2Lambda = %s;" % fmt(lam2))

# cross-check with a generic SDP: maximize lambda s.t. Choi blocks >= lambda
Fs = [cp.Variable((2, 2), hermitian=True) for _ in range(3)]
lam = cp.Variable()
cons = [Fs[k] >> lam * np.eye(2) for k in range(3)]
for i in range(3):
    cons.append(sum(V[i, k] * Fs[k] for k in range(3)) == Ai[i])
cp.Problem(cp.Maximize(lam), cons).solve()
assert abs(lam.value - lam2) < 1e-5, (lam.value, lam2)

# Phi(A_i) = B_i / 2 + 1/6 on the diagonal C^3
emit("// Phi(A_1) on C^3 for the second planted instance")
emit("inline constexpr double kPlanted2PhiA1[3] = {%s};" % ", ".join(fmt(Bd[0][k] / 2 + 1 / 6) for k in range(3)))

print("#pragma once")
print()
print("// Generated by tests/oracles/derive_oracles.py; do not edit by hand.")
print()
print("namespace oracle {")
print()
print("\n".join(out))
print()
print("}  // namespace oracle")
