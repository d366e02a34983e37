"""Certifying the turning instability of a stably stratified interface.

The family z1 = alpha - sin(alpha), z2 = b * zstar (before the split point)
has a vertical tangent at alpha = 0. The sign of the initial slope velocity
there decides whether the curve straightens into a graph or turns over; it
is computed by the certificate integral, whose positive part is suppressed
as b grows. This script locates the threshold b*, cross-checks the
certificate against an adaptive-quadrature oracle on the analytic family
and against the contour-dynamics velocity itself, and then evolves the
curve past the threshold to watch the minimum slope dive through zero.
"""

import warnings

import numpy as np
from scipy.integrate import quad

import stokescontour as sc
from stokescontour.geometry import central_diff
from stokescontour.turning import zstar_basic

p = sc.TurningFamilyParams(b=1.0)
m = 2048

print("== certificate at b = 1 (grid Simpson vs adaptive quadrature) ==")
curve = sc.build_turning_family(p, m)
J1, J2, total = sc.turning_integral(curve)

def integrand(beta, b):
    zs = float(zstar_basic(np.array([beta]), p)[0])
    z2 = b * zs if beta <= p.alpha2 else zs
    z1 = beta - np.sin(beta)
    return z2 * np.sin(z1) * (1 - np.cos(beta)) / (np.cosh(z2) - np.cos(z1))

r1, _ = quad(integrand, 0, p.alpha2, args=(1.0,), points=[0.0], limit=400)
r2, _ = quad(integrand, p.alpha2, np.pi, args=(1.0,), limit=400)
pref = sc.turning.BASIC_AMPLITUDE * np.pi / p.alpha2 / (4 * np.pi)
print(f"  J1 = {J1:.6e} (oracle {pref*r1:.6e}),  J2 = {J2:.6e} (oracle {pref*r2:.6e})")

print("\n== threshold ==")
b_star = sc.find_b_threshold(p, 1.0, 100.0, m=1024)
print(f"  b* = {b_star:.4f}; total(2 b*) = {sc.turning_integral(sc.build_turning_family(sc.TurningFamilyParams(b=2*b_star), 1024))[2]:.3e}")

print("\n== certificate vs direct contour-dynamics slope velocity (b = 2) ==")
c2 = sc.build_turning_family(sc.TurningFamilyParams(b=2.0), m)
with warnings.catch_warnings():
    warnings.simplefilter("ignore", RuntimeWarning)
    u1, _ = sc.rhs_curve(sc.CurveState(0.0, c2, delta_rho=1.0))
direct = central_diff(u1, c2.spacing)[m // 2]
tot2 = sc.turning_integral(c2)[2]
print(f"  certificate {tot2:+.5e} vs d/dt slope(0) {direct:+.5e}")

print("\n== evolution past the threshold (stable stratification) ==")
curve = sc.build_turning_family(sc.TurningFamilyParams(b=2 * b_star), 1024)
ip = sc.IntegratorParams(t_end=0.03, rel_tol=1e-8, abs_tol=1e-11, dt_init=5e-4, dt_max=0.005)
with warnings.catch_warnings():
    warnings.simplefilter("ignore", RuntimeWarning)
    traj = sc.evolve_curve(sc.CurveState(0.0, curve, delta_rho=1.0), ip,
                           [0.0, 0.005, 0.01, 0.02, 0.03])
for r in traj.records:
    print(f"  t = {r.t:5.3f}: min slope of z1 = {r.min_slope_x1:+.3e}")
print("  the minimum slope crosses zero: the interface stops being a graph")
