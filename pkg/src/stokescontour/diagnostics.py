"""Scalar monitors along the interface evolution.

The modulated potential energy of a graph interface separating density +1
above from -1 below reduces to E = integral of h^2 over the period (each
vertical column between the flat stratified profile and the graph contributes
2|x2| over half the height range). Its exact production rate in the
normalization rho+- = +-1 is

    delta = 4 * iint h'(a) h'(b) Kpair(a - b, h(a) - h(b)) da db,

the squared L2 norm of (-Delta)^{-1} d1 rho written through the measure form
of grad rho. A run integrated with a different density jump is the same flow
with time rescaled; ``delta_rate`` applies that exact factor so the stored
dissipation matches dE/dt in the run's own time units (sign_factor =
(rho^- - rho^+)/(8 pi), so the factor is -4 pi * sign_factor).

Finger counting follows the flat/steep decomposition: I_mu collects the
maximal node ranges where |h'| <= mu, and the count is the number of such
ranges (each isolated near-flat window between steep flanks marks one
extremum of the interface), plus any slope sign flips happening at grid scale
strictly between steep nodes. A state with no steep region has no fingers.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .geometry import (
    TWO_PI,
    DiagnosticsRecord,
    GraphInterface,
    ParamCurve,
    central_diff,
    curve_derivatives,
    curvature,
    graph_to_curve,
    height_extremes,
    min_slope_x1,
    perimeter,
    simpson_weights,
    symmetry_errors,
)
from .kernels import biharm_pair_kernel, bilaplacian_pair_kernel_exact


def energy(interface: GraphInterface) -> float:
    """Modulated potential energy: composite Simpson of h^2 over the period."""
    w = simpson_weights(interface.m, interface.spacing)
    return float(np.dot(w, interface.h**2))


def energy_curve(curve: ParamCurve) -> float:
    """Energy of a general curve via the flux form integral of z2^2 * dz1.

    Reduces to the graph formula when z1 = alpha; valid before and after
    turning (the signed dz1 keeps the underlying area integral exact).
    """
    dz1, _ = curve_derivatives(curve)
    w = simpson_weights(curve.m, curve.spacing)
    return float(np.dot(w, curve.z2**2 * dz1))


def delta_spectral(interface: GraphInterface, n_max: int = 0) -> float:
    """Dissipation rate delta in the rho = +-1 normalization.

    Double periodic-trapezoid quadrature of
    4 * h'(a) h'(b) Kpair(a - b, h(a) - h(b)); ``n_max = 0`` evaluates the
    pair kernel exactly, ``n_max >= 16`` uses the truncated series.

    Raises
    ------
    ValueError
        If the quadrature returns a value below -1e-6 (series/quadrature
        inconsistency; the exact result is a squared norm).
    """
    if n_max != 0 and n_max < 16:
        raise ValueError("n_max must be 0 (exact) or >= 16")
    h = interface.h
    d = interface.spacing
    hp = central_diff(h, d)
    x1 = interface.alpha[:, None] - interface.alpha[None, :]
    x1 = (x1 + np.pi) % TWO_PI - np.pi
    x2 = h[:, None] - h[None, :]
    if n_max == 0:
        ker = bilaplacian_pair_kernel_exact(x1, x2)
    else:
        ker = biharm_pair_kernel(x1, x2, n_max)
    val = 4.0 * d * d * float(hp @ ker @ hp)
    if val < -1e-6:
        raise ValueError(f"delta_spectral returned {val}, inconsistent quadrature")
    return val


def delta_rate(interface: GraphInterface, sign_factor: float, n_max: int = 0) -> float:
    """delta expressed in the time units of a run with the given sign_factor.

    The contour velocity scales linearly with the density jump
    rho^- - rho^+ = 8 pi * sign_factor while delta is quadratic in it, so
    along such a run dE/dt = -4 pi * sign_factor * delta_spectral. Negative
    values (stable stratification, sign_factor > 0) mean E decreases.
    """
    return -4.0 * np.pi * sign_factor * delta_spectral(interface, n_max)


def dE_dt_fd(trajectory: "Trajectory") -> np.ndarray:
    """Centered finite differences of the energy series in t (one-sided at ends)."""
    t = np.array([r.t for r in trajectory.records])
    e = np.array([r.energy for r in trajectory.records])
    return dEdt_series(t, e)


def dEdt_series(t: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Derivative of samples e(t) by 3-point formulas, exact for quadratics."""
    t = np.asarray(t, dtype=float)
    e = np.asarray(e, dtype=float)
    if t.size < 3:
        raise ValueError("need at least 3 samples")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    out = np.empty_like(e)
    a = t[1:-1] - t[:-2]
    b = t[2:] - t[1:-1]
    out[1:-1] = (e[2:] * a**2 - e[:-2] * b**2 + e[1:-1] * (b**2 - a**2)) / (
        a * b * (a + b)
    )
    out[0] = (e[1] - e[0]) / (t[1] - t[0])
    out[-1] = (e[-1] - e[-2]) / (t[-1] - t[-2])
    return out


@dataclass
class FingerDecomposition:
    """Flat/steep split of the grid at slope threshold mu.

    ``flat_intervals`` lists the maximal index ranges with |h'| <= mu as
    (start, length) pairs in cyclic order (a range may wrap past node m-1).
    """

    mu: float
    flat_intervals: List[Tuple[int, int]]
    zero_count_in_R: int
    zero_locations: List[int]


def finger_decomposition(interface: GraphInterface, mu: float) -> FingerDecomposition:
    """Decompose the grid into I_mu (|h'| <= mu) and R_mu, and count fingers.

    Every maximal I_mu range bordered by steep nodes contributes one count
    (its minimum-|h'| node is reported as the zero location); a sign change
    of h' between two adjacent steep nodes (an extremum unresolved at grid
    scale) also counts once. If the whole grid is flat there is no finger.
    """
    if mu <= 0:
        raise ValueError("mu must be positive")
    h = interface.h
    m = interface.m
    slope = central_diff(h, interface.spacing)
    flat = np.abs(slope) <= mu

    if flat.all():
        return FingerDecomposition(
            mu=mu, flat_intervals=[(0, m)], zero_count_in_R=0, zero_locations=[]
        )

    intervals: List[Tuple[int, int]] = []
    locations: List[int] = []
    if flat.any():
        # maximal cyclic runs of flat nodes
        starts = np.flatnonzero(flat & ~np.roll(flat, 1))
        for s in starts:
            length = 1
            while flat[(s + length) % m]:
                length += 1
            intervals.append((int(s), int(length)))
            idx = (s + np.arange(length)) % m
            locations.append(int(idx[np.argmin(np.abs(slope[idx]))]))

    count = len(intervals)
    # grid-scale sign flips strictly inside the steep region
    steep = ~flat
    nxt = np.roll(slope, -1)
    flips = steep & np.roll(steep, -1) & (slope * nxt < 0.0)
    for j in np.flatnonzero(flips):
        count += 1
        locations.append(int(j))

    return FingerDecomposition(
        mu=mu,
        flat_intervals=intervals,
        zero_count_in_R=count,
        zero_locations=sorted(locations),
    )


def wiener_norm(interface: GraphInterface, s: float, nu: float) -> float:
    """Weighted Fourier-coefficient sum  sum_k e^{nu |k|} |k|^s |h_hat(k)|.

    h_hat(k) = (1/2pi)(2pi/m) sum_j h_j e^{-ik alpha_j} over k in
    (-m/2, m/2]; the k = 0 term enters only for s = 0. Requires m to be a
    power of two and nu * m/2 <= 700 (overflow guard).
    """
    m = interface.m
    if m & (m - 1) != 0:
        raise ValueError("wiener_norm requires m to be a power of two")
    if nu < 0 or s < 0:
        raise ValueError("s and nu must be nonnegative")
    if nu * (m / 2) > 700.0:
        raise ValueError("nu * m/2 exceeds the overflow guard (700)")
    coeffs = np.abs(np.fft.fft(interface.h)) / m
    # coefficients at FFT roundoff level are exact zeros of the data; without
    # this floor the e^{nu k} weight amplifies machine noise astronomically
    floor = 64.0 * np.finfo(float).eps * np.max(coeffs, initial=0.0)
    coeffs[coeffs <= floor] = 0.0
    k = np.abs(np.fft.fftfreq(m, d=1.0 / m))
    weights = np.exp(nu * k) * k**s  # numpy's 0**0 == 1 covers the s = 0 rule
    return float(np.dot(weights, coeffs))


# ---------------------------------------------------------------------------
# per-sample records and trajectory container


@dataclass
class DiagnosticsOptions:
    """Knobs for the per-sample record computation."""

    mu: float = 0.05
    wiener_s: float = 0.0
    wiener_nu: float = 0.0
    delta_n_max: int = 0
    compute_delta: bool = True


@dataclass
class Trajectory:
    """Time-ordered states and their diagnostics records.

    ``states`` holds GraphState or CurveState snapshots at the sample times;
    a failed run keeps everything recorded up to the failure time.
    """

    states: list = field(default_factory=list)
    records: List[DiagnosticsRecord] = field(default_factory=list)
    failed: bool = False
    failure_time: Optional[float] = None
    failure_message: Optional[str] = None


def record_for_graph(
    t: float,
    interface: GraphInterface,
    sign_factor: float,
    options: Optional[DiagnosticsOptions] = None,
) -> DiagnosticsRecord:
    """DiagnosticsRecord for a graph state (delta in the run's time units)."""
    opt = options or DiagnosticsOptions()
    curve = graph_to_curve(interface)
    big, small = height_extremes(curve)
    csym, esym = symmetry_errors(curve)
    if opt.compute_delta:
        delta = delta_rate(interface, sign_factor, opt.delta_n_max)
    else:
        delta = float("nan")
    try:
        wnorm = wiener_norm(interface, opt.wiener_s, opt.wiener_nu)
    except ValueError:
        wnorm = None
    return DiagnosticsRecord(
        t=t,
        energy=energy(interface),
        delta=delta,
        perimeter=perimeter(curve),
        max_curvature=float(np.max(curvature(curve))),
        max_height=big,
        min_height=small,
        central_sym_err=csym,
        even_sym_err=esym,
        finger_count=finger_decomposition(interface, opt.mu).zero_count_in_R,
        wiener_norm=wnorm,
    )


def record_for_curve(
    t: float, curve: ParamCurve, options: Optional[DiagnosticsOptions] = None
) -> DiagnosticsRecord:
    """DiagnosticsRecord for a parametric state (no delta/finger/wiener)."""
    big, small = height_extremes(curve)
    csym, esym = symmetry_errors(curve)
    return DiagnosticsRecord(
        t=t,
        energy=energy_curve(curve),
        delta=float("nan"),
        perimeter=perimeter(curve),
        max_curvature=float(np.max(curvature(curve))),
        max_height=big,
        min_height=small,
        central_sym_err=csym,
        even_sym_err=esym,
        min_slope_x1=min_slope_x1(curve),
    )


# ---------------------------------------------------------------------------
# diagnostics CSV: fixed column order, full precision, one flushed row per
# sample so a crashed run still leaves a valid file.

DIAG_COLUMNS = [
    "t",
    "E",
    "dEdt",
    "delta",
    "L",
    "Kmax",
    "Mheight",
    "mheight",
    "csym",
    "esym",
    "fingers",
    "wiener",
]


def _fmt(x) -> str:
    if x is None:
        return "nan"
    return f"{float(x):.17g}"


class DiagnosticsWriter:
    """Incremental CSV writer for DiagnosticsRecord rows.

    The dEdt column is the backward difference of the energy column between
    consecutive samples (nan on the first row); verification recomputes the
    centered version from the stored E series.
    """

    def __init__(self, path):
        self._fh = open(path, "w", newline="")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(DIAG_COLUMNS)
        self._fh.flush()
        self._prev: Optional[Tuple[float, float]] = None

    def write(self, rec: DiagnosticsRecord) -> None:
        dEdt = float("nan")
        if self._prev is not None and rec.t > self._prev[0]:
            dEdt = (rec.energy - self._prev[1]) / (rec.t - self._prev[0])
        self._writer.writerow(
            [
                _fmt(rec.t),
                _fmt(rec.energy),
                _fmt(dEdt),
                _fmt(rec.delta),
                _fmt(rec.perimeter),
                _fmt(rec.max_curvature),
                _fmt(rec.max_height),
                _fmt(rec.min_height),
                _fmt(rec.central_sym_err),
                _fmt(rec.even_sym_err),
                _fmt(rec.finger_count),
                _fmt(rec.wiener_norm),
            ]
        )
        self._fh.flush()
        self._prev = (rec.t, rec.energy)

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def read_diagnostics_csv(path) -> dict:
    """Read a diagnostics CSV back into a dict of float arrays."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != DIAG_COLUMNS:
            raise ValueError(f"unexpected diagnostics header {header!r}")
        rows = [[float(x) for x in row] for row in reader if row]
    data = np.asarray(rows, dtype=float)
    if data.size == 0:
        data = data.reshape(0, len(DIAG_COLUMNS))
    return {name: data[:, i] for i, name in enumerate(DIAG_COLUMNS)}
