"""Adaptive embedded Runge-Kutta time stepping (Dormand-Prince 4(5) pair).

The tableau is the seven-stage DOPRI5 pair behind MATLAB's ode45: the fifth
order solution is propagated, the embedded fourth-order solution provides the
local error estimate, and the last stage equals the first stage of the next
step (FSAL). Step control is plain proportional,

    dt_new = dt * min(5, max(0.2, 0.9 * err_norm**(-1/5))),

with the error normalized componentwise by abs_tol + rel_tol * |y| and a step
accepted when the norm is <= 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class StepFailureError(RuntimeError):
    """dt_min reached with error estimate above tolerance."""

    def __init__(self, t, message="step size underflow"):
        super().__init__(f"{message} at t={t}")
        self.t = t


# Dormand-Prince coefficients
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    np.array([]),
    np.array([1 / 5]),
    np.array([3 / 40, 9 / 40]),
    np.array([44 / 45, -56 / 15, 32 / 9]),
    np.array([19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729]),
    np.array([9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656]),
    np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84]),
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
# b5 - b4, applied to the stages to get the embedded error
_E = np.array(
    [71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40]
)

MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
SAFETY = 0.9


@dataclass
class IntegratorParams:
    """Tolerances, step bounds and horizon for the adaptive integrator."""

    t_end: float
    rel_tol: float = 1e-6
    abs_tol: float = 1e-9
    dt_init: float = 1e-3
    dt_min: float = 1e-12
    dt_max: float = 0.1

    def __post_init__(self):
        if self.rel_tol < 1e-12 or self.abs_tol < 1e-12:
            raise ValueError("tolerances must be >= 1e-12")
        if not (0 < self.dt_min <= self.dt_init <= self.dt_max):
            raise ValueError("need 0 < dt_min <= dt_init <= dt_max")


def dopri_step(f, t, y, dt, rel_tol, abs_tol, k1=None):
    """One trial Dormand-Prince step from (t, y) of size dt.

    Returns (y_new, err_norm, k_first_next) where err_norm <= 1 means the
    step is acceptable and k_first_next is the FSAL stage f(t+dt, y_new).
    """
    k = [None] * 7
    k[0] = f(t, y) if k1 is None else k1
    for i in range(1, 6):
        yi = y + dt * sum(a * kj for a, kj in zip(_A[i], k[:i]))
        k[i] = f(t + _C[i] * dt, yi)
    y_new = y + dt * sum(b * kj for b, kj in zip(_B5[:6], k[:6]))
    k[6] = f(t + dt, y_new)
    err = dt * sum(e * kj for e, kj in zip(_E, k))
    scale = abs_tol + rel_tol * np.maximum(np.abs(y), np.abs(y_new))
    err_norm = float(np.max(np.abs(err) / scale))
    return y_new, err_norm, k[6]


def _step_factor(err_norm: float) -> float:
    if err_norm == 0.0:
        return MAX_FACTOR
    return min(MAX_FACTOR, max(MIN_FACTOR, SAFETY * err_norm ** (-0.2)))


def advance(f, t, y, dt, ip: IntegratorParams, k1=None, dt_cap=None, recoverable=()):
    """Advance one *accepted* step, retrying with smaller dt on rejection.

    ``dt_cap`` optionally shortens the attempted step (used to land exactly
    on sample times). Exceptions of the ``recoverable`` types raised while
    evaluating a *trial* step count as an infinite error estimate and shrink
    the step like any rejection (a blowup at the current state itself still
    propagates, as does one persisting at dt_min). Returns
    (t_new, y_new, dt_used, err_norm, dt_next, k1_next) where dt_next is the
    uncapped proposal for the following step.

    Raises
    ------
    StepFailureError
        If the error cannot be brought under tolerance at dt_min.
    """
    dt = min(max(dt, ip.dt_min), ip.dt_max)
    if k1 is None:
        k1 = f(t, y)
    while True:
        dt_try = dt if dt_cap is None else min(dt, dt_cap)
        try:
            y_new, err_norm, k_last = dopri_step(
                f, t, y, dt_try, ip.rel_tol, ip.abs_tol, k1=k1
            )
        except recoverable:
            if dt_try <= ip.dt_min:
                raise
            err_norm = np.inf
        if err_norm <= 1.0:
            dt_next = min(max(dt_try * _step_factor(err_norm), ip.dt_min), ip.dt_max)
            return t + dt_try, y_new, dt_try, err_norm, dt_next, k_last
        if dt_try <= ip.dt_min:
            raise StepFailureError(t)
        # the first stage f(t, y) stays valid on retry; only dt shrinks
        dt = max(dt_try * _step_factor(err_norm), ip.dt_min)
