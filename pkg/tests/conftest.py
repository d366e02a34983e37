import numpy as np
import pytest

import stokescontour as sc


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240817)


def sine_interface(m, amplitude=1.0, k=1):
    return sc.GraphInterface(h=amplitude * np.sin(k * sc.uniform_grid(m)))


def make_integrator(t_end, rel_tol=1e-6, abs_tol=1e-9, dt_init=1e-3, dt_max=0.02):
    return sc.IntegratorParams(
        t_end=t_end, rel_tol=rel_tol, abs_tol=abs_tol, dt_init=dt_init, dt_max=dt_max
    )
