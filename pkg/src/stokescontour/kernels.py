"""Periodic Stokeslet and bilaplacian Green-function kernels.

The velocity kernel is the x1-periodic Stokeslet

    S(x) = (1/8pi) [ log(2(cosh x2 - cos x1)) Id
                     - x2/(cosh x2 - cos x1) * [[-sinh x2, sin x1],
                                                [ sin x1, sinh x2]] ],

which is smooth away from x = (0 mod 2pi, 0) where it has a log singularity.
The mixed second derivative of the bilaplacian Green function K (with
Delta^2 K = delta on T x R) has the closed form

    d1 d2 K(x) = (1/8pi) x2 sin(x1) / (cosh x2 - cos x1),

while d1 K and the k != 0 part of K itself are only available as series over
the horizontal wavenumbers. The pair kernel used by the dissipation
functional is

    Kpair(x) = (1/4pi) sum_{n>=1} (1 + n|x2|)/n^3 * exp(-n|x2|) cos(n x1),

smooth everywhere (including the origin). Besides the truncated sums, an
exact evaluation through the polylogarithms Li2/Li3 of w = exp(-|x2| + i x1)
is provided; it agrees with the series to machine precision and costs O(1)
per point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import bernoulli, zeta

ONE_OVER_8PI = 1.0 / (8.0 * np.pi)
ONE_OVER_4PI = 1.0 / (4.0 * np.pi)

_NMAX_CAP = 100_000


@dataclass(frozen=True)
class Stokeslet2x2:
    """Components of the 2x2 periodic Stokeslet matrix (s12 == s21)."""

    s11: np.ndarray
    s12: np.ndarray
    s21: np.ndarray
    s22: np.ndarray


def _denominator(x1, x2):
    den = np.cosh(x2) - np.cos(x1)
    if np.any(den <= 0.0):
        raise ValueError("stokeslet kernel evaluated at a singular point")
    return den


def stokeslet(x1, x2) -> Stokeslet2x2:
    """Evaluate the x1-periodic Stokeslet at (x1, x2), scalars or arrays.

    Raises
    ------
    ValueError
        At the singular points (x1, x2) = (0 mod 2pi, 0).
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    den = _denominator(x1, x2)
    logterm = np.log(2.0 * den)
    q = x2 / den
    s11 = ONE_OVER_8PI * (logterm + q * np.sinh(x2))
    s22 = ONE_OVER_8PI * (logterm - q * np.sinh(x2))
    s12 = -ONE_OVER_8PI * q * np.sin(x1)
    return Stokeslet2x2(s11=s11, s12=s12, s21=s12, s22=s22)


def dK12(x1, x2):
    """Mixed derivative d1 d2 K of the bilaplacian Green function (closed form)."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    den = _denominator(x1, x2)
    return ONE_OVER_8PI * x2 * np.sin(x1) / den


def _auto_nmax(x2) -> int:
    scale = max(float(np.min(np.abs(x2))), 0.05)
    return min(_NMAX_CAP, max(64, math.ceil(40.0 / scale)))


def dK1_series(x1, x2, n_max: int):
    """Partial sum of d1 K(x) = -(1/4pi) sum (n|x2|+1)/n^2 e^{-n|x2|} sin(n x1).

    ``n_max = 0`` picks the truncation from x2 so that the geometric tail is
    below 1e-12 for |x2| >= 0.1 (n_max = ceil(40/|x2|), floored at 64 and
    capped at 1e5).
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    if n_max < 0:
        raise ValueError("n_max must be >= 1, or 0 for automatic truncation")
    if n_max == 0:
        n_max = _auto_nmax(x2)
    n = np.arange(1, n_max + 1, dtype=float)
    a = np.abs(x2)[..., None]
    terms = (n * a + 1.0) / n**2 * np.exp(-n * a) * np.sin(n * x1[..., None])
    return -ONE_OVER_4PI * terms.sum(axis=-1)


def biharm_pair_kernel(x1, x2, n_max: int):
    """Partial sum of the k != 0 bilaplacian pair kernel.

    Returns (1/4pi) sum_{n=1..n_max} (1 + n|x2|)/n^3 e^{-n|x2|} cos(n x1).
    ``n_max = 0`` switches to the exact polylogarithm evaluation.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 1, or 0 for the exact evaluation")
    if n_max == 0:
        return bilaplacian_pair_kernel_exact(x1, x2)
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    n = np.arange(1, n_max + 1, dtype=float)
    a = np.abs(x2)[..., None]
    terms = (1.0 + n * a) / n**3 * np.exp(-n * a) * np.cos(n * x1[..., None])
    return ONE_OVER_4PI * terms.sum(axis=-1)


# ---------------------------------------------------------------------------
# exact evaluation via polylogarithms
#
# Kpair = (1/4pi) (Re Li3(w) + |x2| Re Li2(w)),  w = exp(-|x2| + i x1).
# For |w| <= 1/2 the defining series converges fast; otherwise |x2| < log 2
# and the expansion of Li_s(e^mu) around mu = 0 applies, mu = -|x2| + i x1
# staying inside its |mu| < 2pi disk of validity:
#
#   Li2(e^mu) = mu (1 - log(-mu))      + sum_{k != 1} zeta(2-k) mu^k / k!
#   Li3(e^mu) = mu^2/2 (3/2 - log(-mu)) + sum_{k != 2} zeta(3-k) mu^k / k!
#
# zeta at non-positive integers comes from Bernoulli numbers.

_EXP_TERMS = 60
_SERIES_TERMS = 48


def _zeta_int(n: int) -> float:
    if n > 1:
        return float(zeta(n))
    if n == 0:
        return -0.5
    if n == 1:
        raise ValueError("zeta(1) requested")
    k = -n
    return float(-_BERNOULLI[k + 1] / (k + 1))


_BERNOULLI = bernoulli(_EXP_TERMS + 4)
_C2 = np.array(
    [0.0 if (2 - k) == 1 else _zeta_int(2 - k) / math.factorial(k) for k in range(_EXP_TERMS)]
)
_C3 = np.array(
    [0.0 if (3 - k) == 1 else _zeta_int(3 - k) / math.factorial(k) for k in range(_EXP_TERMS)]
)


def _polylog23(w: np.ndarray):
    """Li2 and Li3 on the closed unit disk, vectorized, ~1e-14 absolute."""
    w = np.asarray(w, dtype=complex)
    li2 = np.empty_like(w)
    li3 = np.empty_like(w)

    small = np.abs(w) <= 0.5
    ws = w[small]
    acc2 = np.zeros_like(ws)
    acc3 = np.zeros_like(ws)
    p = np.ones_like(ws)
    for n in range(1, _SERIES_TERMS + 1):
        p = p * ws
        acc2 += p / n**2
        acc3 += p / n**3
    li2[small] = acc2
    li3[small] = acc3

    wb = w[~small]
    mu = np.log(wb)
    # mu = 0 occurs only at w = 1; the log factor is multiplied by mu/mu^2
    safe = np.where(mu == 0, 1.0, mu)
    lg = np.log(-safe)
    s2 = np.zeros_like(wb)
    s3 = np.zeros_like(wb)
    p = np.ones_like(wb)
    for k in range(_EXP_TERMS):
        s2 += _C2[k] * p
        s3 += _C3[k] * p
        p = p * mu
    li2[~small] = mu * (1.0 - lg) + s2
    li3[~small] = 0.5 * mu**2 * (1.5 - lg) + s3
    return li2, li3


def bilaplacian_pair_kernel_exact(x1, x2):
    """Exact k != 0 bilaplacian pair kernel via Li2/Li3 (the n_max -> inf limit)."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    a = np.abs(x2)
    w = np.exp(-a) * (np.cos(x1) + 1j * np.sin(x1))
    li2, li3 = _polylog23(w)
    return ONE_OVER_4PI * (li3.real + a * li2.real)
