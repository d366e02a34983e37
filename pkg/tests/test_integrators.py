import numpy as np
import pytest

import stokescontour as sc
from stokescontour.integrators import StepFailureError, advance, dopri_step

from conftest import make_integrator


def test_params_validation():
    with pytest.raises(ValueError):
        sc.IntegratorParams(t_end=1.0, rel_tol=1e-13)
    with pytest.raises(ValueError):
        sc.IntegratorParams(t_end=1.0, dt_init=1e-3, dt_min=1e-2)
    with pytest.raises(ValueError):
        sc.IntegratorParams(t_end=1.0, dt_init=1.0, dt_max=0.5)


def test_fifth_order_on_exponential():
    f = lambda t, y: -y
    y0 = np.array([1.0])
    errs = []
    for dt in (0.1, 0.05):
        y1, _, _ = dopri_step(f, 0.0, y0, dt, 1e-12, 1e-12)
        errs.append(abs(y1[0] - np.exp(-dt)))
    assert errs[0] <= 5e-10
    # local error is O(dt^6): halving dt shrinks it by about 64
    assert 40 <= errs[0] / errs[1] <= 90


def test_error_norm_semantics():
    f = lambda t, y: -y
    y0 = np.array([1.0])
    _, err, _ = dopri_step(f, 0.0, y0, 0.05, 1e-6, 1e-9)
    assert err <= 1.0  # an easy step is acceptable
    _, err_big, _ = dopri_step(f, 0.0, y0, 3.0, 1e-12, 1e-14)
    assert err_big > 1.0


def test_advance_grows_dt_on_trivial_field():
    f = lambda t, y: np.zeros_like(y)
    ip = make_integrator(t_end=10.0, dt_init=1e-3, dt_max=0.5)
    t, y, dt_used, err, dt_next, _ = advance(f, 0.0, np.ones(4), ip.dt_init, ip)
    assert err == 0.0
    assert dt_next == pytest.approx(min(5 * dt_used, ip.dt_max))


def test_advance_respects_cap():
    f = lambda t, y: -y
    ip = make_integrator(t_end=1.0, dt_init=0.01, dt_max=0.5)
    t, *_ = advance(f, 0.0, np.ones(2), 0.01, ip, dt_cap=0.003)
    assert t == pytest.approx(0.003)


def test_step_failure_at_dt_min():
    f = lambda t, y: -1e8 * y
    ip = sc.IntegratorParams(
        t_end=1.0, rel_tol=1e-10, abs_tol=1e-12, dt_init=0.5, dt_min=0.5, dt_max=0.5
    )
    with pytest.raises(StepFailureError):
        advance(f, 0.0, np.ones(3), 0.5, ip)


def test_recoverable_blowup_is_rejected_not_fatal():
    calls = {"n": 0}

    class Boom(RuntimeError):
        pass

    def f(t, y):
        calls["n"] += 1
        if t > 0.0 and calls["n"] < 12:
            raise Boom()  # any stage away from the current state explodes
        return -y

    ip = make_integrator(t_end=1.0, dt_init=0.2, dt_max=0.2)
    t, y, dt_used, *_ = advance(f, 0.0, np.ones(1), 0.2, ip, recoverable=(Boom,))
    assert t == pytest.approx(dt_used)
    assert dt_used < 0.2  # had to shrink past the failing trials
