"""Tour of the interface kernels.

The velocity of the interface is driven by the horizontally periodic
Stokeslet S(x); the dissipation functional pairs slopes through the
bilaplacian Green function. This script evaluates both, checks the
symmetries that the conservation proofs rest on, and compares the truncated
series against the exact polylogarithm evaluation.
"""

import numpy as np

import stokescontour as sc

rng = np.random.default_rng(1)

print("== periodic Stokeslet ==")
s = sc.stokeslet(np.pi, 0.0)
print(f"S(pi, 0) = (log 4 / 8 pi) Id : s11 = {s.s11:.12f}, expected {np.log(4)/(8*np.pi):.12f}")

x1, x2 = rng.uniform(-np.pi, np.pi, 5), rng.uniform(-2, 2, 5)
a, b = sc.stokeslet(x1, x2), sc.stokeslet(-x1, -x2)
print("point symmetry S(x) = S(-x):  max dev =",
      np.max(np.abs(a.s11 - b.s11) + np.abs(a.s12 - b.s12)))

print("\n== mixed derivative of the bilaplacian Green function ==")
print(f"d1d2K(pi/2, 1) = {sc.dK12(np.pi/2, 1.0):.12f}  (= 1/(8 pi cosh 1))")
print(f"d1d2K = -s12 check: {sc.dK12(1.0, 0.7) + sc.stokeslet(1.0, 0.7).s12:.2e}")

print("\n== dK1 series and the pair kernel ==")
print(f"dK1(0, x2) vanishes: {sc.dK1_series(0.0, 1.0, 50):.1e}")
eps = 1e-4
fd = (sc.dK1_series(np.pi/2, 1 + eps, 0) - sc.dK1_series(np.pi/2, 1 - eps, 0)) / (2*eps)
print(f"d/dx2 of dK1 vs closed-form d1d2K: {abs(fd - sc.dK12(np.pi/2, 1.0)):.2e}")

print(f"pair kernel single term at origin: {sc.biharm_pair_kernel(0.0, 0.0, 1):.12f}"
      f"  (= 1/4pi = {1/(4*np.pi):.12f})")
exact = sc.bilaplacian_pair_kernel_exact(1.2, 0.4)
series = sc.biharm_pair_kernel(1.2, 0.4, 2000)
print(f"exact (polylog) vs 2000-term series at (1.2, 0.4): {abs(exact - series):.2e}")
