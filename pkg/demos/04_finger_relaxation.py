"""Relaxation of the number of fingers for cubed-sine initial data.

The profile sin(alpha)^3 carries a third harmonic whose slope wiggles give
four near-flat windows at t = 0. The first harmonic grows fastest, so two
of the windows steepen away early and the finger count drops from 4 to 2
and stays there, while the energy grows monotonically at the rate measured
by the dissipation functional.

Scaled-down version of the acceptance-scale run (m = 512 instead of 2048).
"""

import stokescontour as sc

m = 512
state = sc.GraphState(0.0, sc.GraphInterface(h=sc.preset_f2(m)))
params = sc.SchemeParams(sign_factor=-1.0, viscosity=1e-3, m=m)
ip = sc.IntegratorParams(t_end=0.25, rel_tol=1e-6, abs_tol=1e-9, dt_init=1e-3, dt_max=0.01)
samples = [round(0.025 * i, 10) for i in range(11)]

traj = sc.evolve(state, params, ip, samples, options=sc.DiagnosticsOptions(mu=0.05))
assert not traj.failed, traj.failure_message

dEdt = sc.dE_dt_fd(traj)
print(f"{'t':>6} {'fingers':>8} {'E':>9} {'dE/dt':>10} {'delta':>10} {'rel':>8}")
for i, r in enumerate(traj.records):
    rel = abs(r.delta - dEdt[i]) / abs(dEdt[i]) if 0 < i < len(samples) - 1 else float("nan")
    print(f"{r.t:6.3f} {r.finger_count:8d} {r.energy:9.3f} {dEdt[i]:10.3f} "
          f"{r.delta:10.3f} {rel:8.1e}")

counts = [r.finger_count for r in traj.records]
print(f"\nfinger count (mu = 0.05): {counts[0]} initially -> {counts[-1]} at t = {samples[-1]}")
