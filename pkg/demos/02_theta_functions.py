"""Tour 2: canonical theta bases, the factor of automorphy, the group action,
and the invariant section of M^n.

Run with:  python demos/02_theta_functions.py
"""

import math

import numpy as np

from thetamu import (
    ThetaBasis,
    ThetaTilde,
    TorsionPoint,
    automorphy_factor,
    k_group,
    quasi_periodicity_residual,
    section_index,
    translate_action,
    validate_polarized,
)

# --- evaluation and a closed-form cross-check --------------------------------
pav = validate_polarized(np.array([[1j]]), (1,), simple_asserted=True)
basis = ThetaBasis(pav, 1)
value = basis.eval(section_index(pav, 1, [0]), np.zeros(1))
closed = math.pi ** 0.25 / math.gamma(0.75)
print(f"theta(0; i) = {value.real:.15f}")
print(f"pi^(1/4)/Gamma(3/4) = {closed:.15f}   (diff {abs(value - closed):.1e})")

# --- quasi-periodicity --------------------------------------------------------
# Sections of L^m transform under the period lattice by the level-m cocycle.
pav3 = validate_polarized(np.array([[0.25 + 1.0j]]), (3,))
basis2 = ThetaBasis(pav3, 2)
idx = basis2.indices[1]
z = np.array([0.31 + 0.22j])
lam = pav3.lattice_vector([1], [-2])
print(f"\nlattice residual: {quasi_periodicity_residual(pav3, idx, lam, z, basis=basis2):.2e}")
off = pav3.matrix @ np.array([0.5])  # not a period
print(f"off-lattice residual: {quasi_periodicity_residual(pav3, idx, off, z, basis=basis2):.2f}")
print(f"factor for a real period is trivial: {automorphy_factor(pav3, 2, np.array([3.0 + 0j]), z):.1f}")

# --- the normalized theta-group action ----------------------------------------
# Points Omega a in K(L^m)_1 permute the characteristics once the cocycle
# factor is stripped; here m = 2 on the square elliptic curve swaps the two.
pav1 = validate_polarized(np.array([[1j]]), (1,))
x = TorsionPoint([0.5], [0], (1,))
source = section_index(pav1, 2, [0])
target, factor = translate_action(pav1, 2, x, source)
print(f"\ntranslate by Omega/2 at level 2: c = {[str(q) for q in source.c]} -> "
      f"{[str(q) for q in target.c]}")
b2 = ThetaBasis(pav1, 2)
lhs = b2.eval(source, z + x.to_complex(pav1))
rhs = factor(z) * b2.eval(target, z)
print(f"numeric check of the permuted identity: {abs(lhs - rhs):.2e}")

# --- the invariant section ------------------------------------------------------
# theta~ spans the unique line of H^0(M^n) fixed by the normalized K(M^n)_1
# action; it is the theta series of the quotient period matrix Omega/n and
# equals the sum of all level-n basis elements.
n = 3
tilde = ThetaTilde(pav1, n)
zr = np.array([0.4 + 0.0j])
print(f"\ntheta~(z) = {tilde.eval(zr):.12f}")
print(f"sum of level-{n} basis = {ThetaBasis(pav1, n).eval_matrix(zr[None, :]).sum():.12f}")
worst = 0.0
for point in k_group(pav1, n).k1:
    a = np.array([float(q) for q in point.a])
    strip = np.exp(-1j * math.pi * n * (a @ pav1.matrix @ a) - 2j * math.pi * n * (zr @ a))
    worst = max(worst, abs(tilde.eval(zr + pav1.matrix @ a) - strip * tilde.eval(zr)))
print(f"worst invariance defect over K(M^{n})_1: {worst:.2e}")
