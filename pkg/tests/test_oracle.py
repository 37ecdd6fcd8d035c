import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dampwave.errors import InequalityViolation, OracleBudgetError
from dampwave.oracle import (InequalityReport, ModeState, check_dissipation_inequality,
                             confluent_radius, default_dt, dissipation_dt, energy_functionals,
                             guard_dt, oracle_check, rk4_mode)
from dampwave.spectral import kernels, key_rho
from dampwave.symbols import (SymbolSpec, builtin_catalog, fractional, hypc_log, logarithmic,
                              power_law)


def const(mu):
    return SymbolSpec(f"const{mu}", lambda r, m=mu: np.full_like(r, m))


def test_zero_frequency_is_linear_motion():
    assert rk4_mode(0.0, fractional(), 1.0, 2.0, 3.0).final.u == pytest.approx(7.0, abs=1e-12)


def test_rk4_matches_oscillatory_kernel():
    traj = rk4_mode(1.0, fractional(), 1.0, 0.0, 1.0, dt=1e-3)
    assert traj.final.u == pytest.approx(kernels(1.0, 1.0, fractional()).k0, abs=1e-8)


def test_rk4_matches_confluent_kernel():
    traj = rk4_mode(1.0, const(2.0), 0.0, 1.0, 1.0)
    assert traj.final.u == pytest.approx(math.exp(-1), abs=1e-8)


def test_step_guard_enforced():
    with pytest.raises(ValueError):
        rk4_mode(4.0, fractional(), 1.0, 0.0, 1.0, dt=0.1)


def test_budget():
    with pytest.raises(OracleBudgetError):
        rk4_mode(0.0, fractional(), 1.0, 0.0, 2e7, dt=0.1)


def test_default_step_inside_guard():
    for r in np.linspace(0, 8, 33):
        for mu in (0.0, 0.1, 1.0, 10.0):
            assert default_dt(r, mu) <= guard_dt(r, mu)
            assert dissipation_dt(r, mu) <= guard_dt(r, mu)


def test_trajectory_lands_on_end_time():
    traj = rk4_mode(1.0, fractional(), 1.0, 0.0, 1.2345, dt=0.01)
    assert traj.t[-1] == 1.2345
    assert traj.final.u == pytest.approx(kernels(1.2345, 1.0, fractional()).k0, abs=1e-8)


def test_functionals_zero_state():
    ef = energy_functionals(ModeState(0.0, 0.0, 0.0), 1.0, fractional(), 0.5)
    assert (ef.e0, ef.e, ef.f, ef.rr) == (0.0, 0.0, 0.0, 0.0)


def test_functionals_hand_value():
    ef = energy_functionals(ModeState(1.0, 0.0, 0.0), 1.0, fractional(), 0.5)
    assert ef.e0 == 1.0
    assert ef.e == pytest.approx(1.25)
    assert (ef.m1, ef.m2) == (1.0625, 8.0)
    assert ef.rate_constant == pytest.approx(1 / 9.0625)


@settings(max_examples=300, deadline=None)
@given(r=st.floats(0, 50), p=st.floats(1e-3, 100), u=st.floats(-10, 10), v=st.floats(-10, 10),
       beta=st.floats(0.01, 0.99))
def test_functional_equivalence(r, p, u, v, beta):
    ef = energy_functionals(ModeState(u, v, 0.0), r, fractional(p), beta)
    assert ef.e0 >= 0
    tol = 1e-12 * (ef.e0 + 1e-300)
    assert (1 - beta) * ef.e0 <= ef.e + tol
    assert ef.e <= 3 * ef.e0 + tol


def test_beta_range():
    with pytest.raises(ValueError):
        energy_functionals(ModeState(1, 0, 0), 1.0, fractional(), 1.0)


def _traj(r, sym, t_end=20.0):
    mu = float(sym(r)) if r > 0 else 0.0
    a = math.exp(-r * r)
    return rk4_mode(r, sym, a, a, t_end, dt=dissipation_dt(r, mu))


def test_dissipation_unit_mode():
    rep = check_dissipation_inequality(1.0, fractional(), 0.5, _traj(1.0, fractional()))
    assert rep.max_dissipation_residual <= rep.slack
    assert rep.ok
    rep.raise_if_violated()


def test_dissipation_zero_frequency():
    rep = check_dissipation_inequality(0.0, fractional(), 0.5, _traj(0.0, fractional(), 5.0))
    assert rep.max_dissipation_residual <= 1e-12
    assert rep.ok


@pytest.mark.parametrize("r", [0.1, 1.0, 4.0])
@pytest.mark.parametrize("sym", [fractional(), power_law(1.0), logarithmic(1.0)],
                         ids=lambda s: s.label)
def test_energy_identity(r, sym):
    mu = float(sym(r))
    traj = rk4_mode(r, sym, 1.0, 1.0, 20.0, dt=dissipation_dt(r, mu))
    rep = check_dissipation_inequality(r, sym, 0.5, traj)
    e0 = float(traj.v[0] ** 2 + r * r * traj.u[0] ** 2)
    assert rep.max_identity_residual <= 1e-4 * e0


def test_energy_identity_second_order():
    sym, r = power_law(1.0), 4.0
    res = []
    for dt in (2e-3 / 17, 1e-3 / 17):
        traj = rk4_mode(r, sym, 1.0, 1.0, 5.0, dt=dt)
        res.append(check_dissipation_inequality(r, sym, 0.5, traj).max_identity_residual)
    assert res[0] / res[1] == pytest.approx(4.0, rel=0.1)


def test_violation_raises():
    rep = InequalityReport(1.0, 0.5, 1.0, 0.0, 0.0, 0.0, 1e-6)
    with pytest.raises(InequalityViolation):
        rep.raise_if_violated()


@pytest.mark.parametrize("r", [0.2, 0.7, 1.0, 2.5, 6.0])
def test_basic_energy_non_increasing(r):
    traj = _traj(r, power_law(1.0), 10.0)
    e0 = traj.v ** 2 + r * r * traj.u ** 2
    assert np.all(np.diff(e0) <= 1e-12 * e0[0])


@pytest.mark.parametrize("r", [0.3, 1.0, 3.0])
def test_gronwall_rate(r):
    sym = fractional()
    traj = _traj(r, sym, 30.0)
    mu = 1.0
    rho = float(key_rho(mu, r))
    beta = 0.5
    e = (traj.v ** 2 + r * r * traj.u ** 2 + 2 * beta * rho * traj.u * traj.v
         + beta * rho * mu * r * r * traj.u ** 2)
    keep = e > 1e-200
    rate = -np.polyfit(traj.t[keep], np.log(e[keep]), 1)[0]
    assert rate >= rho / 9.0625


@pytest.mark.parametrize("sym", builtin_catalog(), ids=lambda s: s.label)
def test_oracle_small_sample(sym):
    rep = oracle_check(sym, seed=3, samples=8)
    assert rep.ok, rep.max_error


def test_confluent_radius():
    assert confluent_radius(fractional()) == pytest.approx(2.0, abs=1e-12)
    assert confluent_radius(power_law(1.0)) == pytest.approx(math.sqrt(2), abs=1e-12)
    assert confluent_radius(hypc_log(1.0)) is None


def test_oracle_is_seeded():
    a = oracle_check(logarithmic(1.0), seed=7, samples=5)
    b = oracle_check(logarithmic(1.0), seed=7, samples=5)
    assert [(x.r, x.t, x.rk4_k0) for x in a.rows] == [(x.r, x.t, x.rk4_k0) for x in b.rows]
