"""Full contour dynamics for parametrized (possibly non-graph) interfaces.

The material velocity of the interface is the Stokeslet boundary integral

    dz/dt (a) = (rho^- - rho^+) int S(z(a) - z(b)) zdot_perp(b) z2(b) db,

with zdot_perp = (-dz2, dz1). Quadrature is the periodic trapezoid rule: the
smooth part of the kernel is summed over nodes with its removable diagonal
limits filled in (the log remainder tends to log |zdot(a)|^2 and the rational
matrix term to -(1/4pi)(dz2/|zdot|^2) [[-dz2, dz1], [dz1, dz2]]), while the
log(4 sin^2((a-b)/2)) factor is integrated analytically over the two half
panels adjacent to the singular node against the frozen node value. The
tangential component of the velocity is kept exactly as the integral
produces it; node clustering is only monitored.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

from .diagnostics import DiagnosticsOptions, Trajectory, record_for_curve
from .evolution_graph import AMPLITUDE_GUARD, BlowupError
from .geometry import (
    TWO_PI,
    ParamCurve,
    central_diff,
    even_projection_curve,
    odd_projection_curve,
    symmetry_errors,
)
from .integrators import IntegratorParams, StepFailureError, advance

ONE_OVER_8PI = 1.0 / (8.0 * np.pi)

SPEED_RATIO_WARN = 20.0


@dataclass(frozen=True)
class CurveState:
    """A parametrized interface at a moment in time, with its density jump."""

    t: float
    curve: ParamCurve
    delta_rho: float


@lru_cache(maxsize=32)
def _half_cell_log_integral(half_width: float) -> float:
    """int_0^{half_width} log(4 sin^2(s/2)) ds, the frozen half-panel weight."""
    val, _ = quad(
        lambda s: np.log(4.0 * np.sin(s / 2.0) ** 2),
        0.0,
        half_width,
        points=[0.0],
        limit=200,
        epsabs=1e-13,
        epsrel=1e-12,
    )
    return float(val)


def _rhs_curve_arrays(z1, z2, alpha, delta_rho):
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        return _rhs_curve_arrays_raw(z1, z2, alpha, delta_rho)


def _rhs_curve_arrays_raw(z1: np.ndarray, z2: np.ndarray, alpha: np.ndarray, delta_rho: float):
    m = z1.size
    d = TWO_PI / m
    p = z1 - alpha
    dz1 = 1.0 + central_diff(p, d)
    dz2 = central_diff(z2, d)
    speed2 = dz1 * dz1 + dz2 * dz2

    # integrand vector zdot_perp * z2 at the source nodes
    v1 = -dz2 * z2
    v2 = dz1 * z2

    cell = 2.0 * _half_cell_log_integral(0.5 * d)

    # r = 0: diagonal limits; the log singular factor contributes the frozen
    # half-panel cell, the smooth remainder its limit log |zdot|^2, and the
    # rational matrix term its one-sided Taylor limit.
    g0 = np.log(speed2)
    a_ss0 = 2.0 * dz2 * dz2 / speed2
    a_sn0 = 2.0 * dz2 * dz1 / speed2
    u1 = d * (g0 * v1 + a_ss0 * v1 - a_sn0 * v2) + cell * v1
    u2 = d * (g0 * v2 - a_sn0 * v1 - a_ss0 * v2) + cell * v2

    for r in range(1, m):
        # the kernel is 2pi-periodic in x1, so the winding of z1 across the
        # seam is immaterial here
        x1 = z1 - np.roll(z1, r)
        x2 = z2 - np.roll(z2, r)
        sh2 = np.sinh(0.5 * x2)
        sn2 = np.sin(0.5 * x1)
        den = 2.0 * (sh2 * sh2 + sn2 * sn2)
        lg = np.log(2.0 * den)
        q = x2 / den
        a_ss = q * np.sinh(x2)
        a_sn = q * np.sin(x1)
        v1b = np.roll(v1, r)
        v2b = np.roll(v2, r)
        u1 += d * ((lg + a_ss) * v1b - a_sn * v2b)
        u2 += d * (lg * v2b - a_sn * v1b - a_ss * v2b)

    u1 *= delta_rho * ONE_OVER_8PI
    u2 *= delta_rho * ONE_OVER_8PI
    if not (np.all(np.isfinite(u1)) and np.all(np.isfinite(u2))):
        bad = ~(np.isfinite(u1) & np.isfinite(u2))
        raise BlowupError(int(np.flatnonzero(bad)[0]))
    return u1, u2


def rhs_curve(state: CurveState):
    """Material velocity (dz1/dt, dz2/dt) of the contour dynamics."""
    c = state.curve
    ratio = _speed_ratio(c)
    if ratio > SPEED_RATIO_WARN:
        warnings.warn(
            f"node clustering: max/min speed ratio {ratio:.1f} exceeds "
            f"{SPEED_RATIO_WARN}",
            RuntimeWarning,
            stacklevel=2,
        )
    return _rhs_curve_arrays(c.z1, c.z2, c.alpha, state.delta_rho)


def _speed_ratio(curve: ParamCurve) -> float:
    from .geometry import curve_derivatives

    dz1, dz2 = curve_derivatives(curve)
    speed = np.hypot(dz1, dz2)
    return float(np.max(speed) / np.min(speed))


def evolve_curve(
    initial: CurveState,
    ip: IntegratorParams,
    sample_times: Sequence[float],
    options: Optional[DiagnosticsOptions] = None,
    on_sample: Optional[Callable] = None,
) -> Trajectory:
    """Integrate the contour dynamics with the shared embedded RK machinery.

    Snapshots land exactly on the sample times; each record additionally
    stores min_slope_x1 so turning (a sign change of the minimum slope) can
    be read off the trajectory. Failures truncate the trajectory as in the
    graph scheme. Symmetries present in the initial curve to machine
    precision are enforced by projection after every accepted step, as in
    the graph scheme.
    """
    from .evolution_graph import _prepare_samples

    ts = _prepare_samples(initial.t, ip, sample_times)
    m = initial.curve.m
    alpha = initial.curve.alpha
    traj = Trajectory()
    csym0, esym0 = symmetry_errors(initial.curve)
    enforce_odd = csym0 <= 1e-12
    enforce_even = esym0 <= 1e-12

    def project(y):
        z1, z2 = y[:m], y[m:]
        if enforce_odd:
            z1, z2 = odd_projection_curve(z1, z2)
        if enforce_even:
            z1, z2 = even_projection_curve(z1, z2)
        return np.concatenate([z1, z2])

    def f(t, y):
        u1, u2 = _rhs_curve_arrays(y[:m], y[m:], alpha, initial.delta_rho)
        return np.concatenate([u1, u2])

    def take_sample(t, y):
        curve = ParamCurve(z1=y[:m].copy(), z2=y[m:].copy())
        state = CurveState(t=t, curve=curve, delta_rho=initial.delta_rho)
        rec = record_for_curve(t, curve, options)
        traj.states.append(state)
        traj.records.append(rec)
        if on_sample is not None:
            on_sample(state, rec)

    t = initial.t
    y = np.concatenate([initial.curve.z1, initial.curve.z2]).astype(float)
    idx = 0
    if abs(ts[0] - t) <= 1e-14:
        take_sample(t, y)
        idx = 1
    dt = ip.dt_init
    k1 = None
    try:
        while idx < ts.size:
            target = ts[idx]
            t, y, _, _, dt, k1 = advance(
                f, t, y, dt, ip, k1=k1, dt_cap=target - t,
                recoverable=(BlowupError,),
            )
            y = project(y)
            if np.max(np.abs(np.concatenate([y[:m] - alpha, y[m:]]))) > AMPLITUDE_GUARD:
                raise BlowupError(int(np.argmax(np.abs(y))), t)
            if abs(t - target) <= 1e-12:
                t = target
                take_sample(t, y)
                idx += 1
    except (BlowupError, StepFailureError, ValueError) as exc:
        traj.failed = True
        traj.failure_time = t
        traj.failure_message = str(exc)
    return traj
