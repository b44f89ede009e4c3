import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose

from sbp_fdec.integrators import (
    ConfigError,
    CrankNicolson,
    IntegratorConfig,
    cfl_timestep,
    crank_nicolson_step,
    integrate,
    maxwell_ssprk3_step,
    ssprk3_step,
    step_schedule,
)
from sbp_fdec.linalg import SolverError
from sbp_fdec.maxwell import hamiltonian, initial_state, random_state


def _decay_error(dt, T=1.0):
    y = np.array([1.0])
    for _ in range(round(T / dt)):
        y = ssprk3_step(lambda v: -v, y, dt)
    return abs(y[0] - math.exp(-T))


def test_ssprk3_third_order():
    e = [_decay_error(1 / n) for n in (20, 40, 80)]
    rates = np.log2(np.array(e[:-1]) / np.array(e[1:]))
    assert_allclose(rates, 3.0, atol=0.1)


def test_ssprk3_stability_function():
    # one step on y' = z y gives 1 + z + z^2/2 + z^3/6
    z = -0.7
    got = ssprk3_step(lambda v: z * v, np.array([1.0]), 1.0)[0]
    assert got == pytest.approx(1 + z + z**2 / 2 + z**3 / 6, rel=1e-15)


def test_ssprk3_nonfinite_raises():
    with pytest.raises(FloatingPointError):
        ssprk3_step(lambda v: v * np.inf, np.ones(2), 0.1)


@given(st.floats(-5.0, 5.0), st.floats(0.01, 2.0))
def test_crank_nicolson_scalar_rational(lam, dt):
    cn = CrankNicolson(lambda v: lam * v, tol=1e-14)
    got = cn.step(np.array([1.0]), dt)[0]
    z = lam * dt
    if abs(1 - z / 2) > 1e-3:
        assert got == pytest.approx((1 + z / 2) / (1 - z / 2), rel=1e-12)


def test_crank_nicolson_rotation_preserves_norm():
    A = np.array([[0.0, 2.0], [-2.0, 0.0]])
    cn = CrankNicolson(lambda v: A @ v, tol=1e-14)
    u = np.array([1.0, 0.5])
    for _ in range(50):
        u = cn.step(u, 0.3)
    assert np.linalg.norm(u) == pytest.approx(np.linalg.norm([1.0, 0.5]), rel=1e-12)


def test_crank_nicolson_zero_step_is_identity():
    u = np.arange(3.0)
    assert_allclose(CrankNicolson(lambda v: v).step(u, 0.0), u)


def test_crank_nicolson_unconverged_raises():
    cn = CrankNicolson(lambda v: 1e8 * np.roll(v, 1), tol=1e-14, restart=2, max_iters=2)
    with pytest.raises(SolverError):
        cn.step(np.random.default_rng(0).standard_normal(40), 1.0)


def test_maxwell_cn_conserves_energy_ssprk3_dissipates(ops_24):
    s = random_state(ops_24, np.random.default_rng(1))
    h0 = hamiltonian(ops_24, s)
    dt = cfl_timestep(ops_24, 1.0)
    cn = crank_nicolson_step(ops_24, s, dt, tol=1e-13)
    assert abs(hamiltonian(ops_24, cn) - h0) <= 1e-11 * h0
    rk = maxwell_ssprk3_step(ops_24, s, dt)
    assert hamiltonian(ops_24, rk) <= h0 * (1 + 1e-14)
    assert cn.t == rk.t == pytest.approx(dt)


def test_cn_forward_backward_roundtrip(ops_36):
    s = initial_state(ops_36)
    dt = cfl_timestep(ops_36, 1.0)
    back = crank_nicolson_step(ops_36, crank_nicolson_step(ops_36, s, dt), -dt)
    u0 = s.as_vector()
    assert np.linalg.norm(back.as_vector() - u0) <= 1e-10 * np.linalg.norm(u0)


@given(st.floats(1e-3, 10.0), st.floats(1e-4, 1.0))
def test_step_schedule_covers_end_time(T, dt):
    n, tail = step_schedule(T, dt)
    assert 0 <= tail < dt
    assert n * dt + tail == pytest.approx(T, rel=1e-9)


def test_step_schedule_exact_division():
    assert step_schedule(1.0, 2e-5) == (50000, 0.0)
    assert step_schedule(0.0, 0.1) == (0, 0.0)


@pytest.mark.parametrize("kwargs", [
    dict(scheme="euler", end_time=1.0, dt=0.1),
    dict(scheme="ssprk3", end_time=1.0),
    dict(scheme="ssprk3", end_time=1.0, dt=0.1, cfl=1.0),
    dict(scheme="ssprk3", end_time=1.0, dt=0.0),
    dict(scheme="ssprk3", end_time=1.0, cfl=-1.0),
    dict(scheme="ssprk3", end_time=-1.0, dt=0.1),
    dict(scheme="crank_nicolson", end_time=1.0, dt=0.1, tol=0.0),
    dict(scheme="ssprk3", end_time=1.0, dt=0.1, stride=0),
])
def test_config_validation(kwargs):
    with pytest.raises(ConfigError):
        IntegratorConfig(**kwargs)


def test_integrate_sampling_and_final_time(ops_24):
    dt = cfl_timestep(ops_24, 1.0)
    cfg = IntegratorConfig("ssprk3", end_time=10.5 * dt, dt=dt, stride=4)
    res = integrate(cfg, ops_24)
    assert res.n_steps == 11
    assert [s.step for s in res.samples] == [0, 4, 8, 11]
    assert res.samples[-1].t == res.state.t == 10.5 * dt
    assert res.samples[0].energy_drift == 0.0


def test_integrate_zero_end_time(ops_24):
    res = integrate(IntegratorConfig("crank_nicolson", end_time=0.0, cfl=1.0), ops_24)
    assert len(res.samples) == 1 and res.samples[0].energy_drift == 0.0 and res.n_steps == 0


def test_integrate_counts_gmres_iterations(ops_24):
    res = integrate(IntegratorConfig("crank_nicolson", end_time=0.02, cfl=1.0), ops_24)
    assert res.gmres_iterations >= res.n_steps > 0
