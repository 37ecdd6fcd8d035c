import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from dampwave.decay import (AlphaQuery, DecayClass, ModeIntegrand, ProblemSetup, Quantity,
                            alpha_sup, classify_decay, fit_decay, geometric_times,
                            low_dimension_alpha, norm_at, norm_series, regularity_loss_probe,
                            scenario_names, get_scenario, theorem_scenarios)
from dampwave.errors import AlphaUndecided, EmptyAlphaSet, FitDomainError
from dampwave.quadrature import RadialProfile, parse_profile
from dampwave.spectral import Zone, kernels
from dampwave.symbols import SymbolSpec, fractional, hypc_log, logarithmic, power_law


# -- alpha -----------------------------------------------------------------

@pytest.mark.parametrize("beta", [-1.0, -0.5, 0.0, 1.0, 2.0])
@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("s", [-0.25, 0.0, 0.5])
def test_alpha_closed_form(beta, n, s):
    expected = (2 * s + n) / (2 + beta)
    assert alpha_sup(AlphaQuery(power_law(beta), n, s)) == pytest.approx(expected, abs=0.01)


def test_alpha_example_value():
    assert alpha_sup(AlphaQuery(power_law(0.0), 3, 0.0)) == pytest.approx(1.5, abs=0.01)


def test_alpha_bounded_symbol_near_zero():
    assert alpha_sup(AlphaQuery(hypc_log(1.0), 2, 0.0)) == pytest.approx(1.0, abs=0.01)


def test_alpha_unbounded():
    assert alpha_sup(AlphaQuery(power_law(-2.0), 3, 0.0)) == math.inf


def test_alpha_empty():
    with pytest.raises(EmptyAlphaSet):
        alpha_sup(AlphaQuery(fractional(), 1, -1.0))
    assert low_dimension_alpha(fractional(), 2) == 0.0


def test_alpha_oscillating_slope_undecided():
    wiggle = SymbolSpec("wiggle", lambda r: np.exp(0.5 * np.cos(math.pi * np.log2(r))))
    with pytest.raises(AlphaUndecided):
        alpha_sup(AlphaQuery(wiggle, 3, 0.0))


@settings(max_examples=60, deadline=None)
@given(beta=st.floats(-1.5, 3), n=st.integers(1, 4), s=st.floats(-0.4, 2))
def test_alpha_monotone_in_s_and_n(beta, n, s):
    a = alpha_sup(AlphaQuery(power_law(beta), n, s))
    assert alpha_sup(AlphaQuery(power_law(beta), n, s + 0.25)) >= a - 0.01
    assert alpha_sup(AlphaQuery(power_law(beta), n + 1, s)) >= a - 0.01


# -- fitting ---------------------------------------------------------------

def test_fit_power_law_exact():
    t = np.geomspace(1, 1e4, 33)
    fit = fit_decay(t, 3.0 * t ** -0.75)
    assert fit.slope == pytest.approx(-0.75, abs=1e-12)
    assert fit.kind is DecayClass.POLYNOMIAL
    assert fit.n_points == 9


def test_fit_exponential():
    t = np.geomspace(10, 600, 12)
    kind, slope = classify_decay(t, np.exp(-t), t_min=10)
    assert kind is DecayClass.EXPONENTIAL and slope < -8


def test_fit_underflow_is_exponential():
    t = np.geomspace(1, 1e4, 33)
    kind, slope = classify_decay(t, np.exp(-t))
    assert kind is DecayClass.EXPONENTIAL and slope == -math.inf


def test_fit_domain_errors():
    t = np.geomspace(1, 1e4, 33)
    with pytest.raises(FitDomainError):
        fit_decay(t, np.where(t > 5e3, 0.0, 1.0))
    with pytest.raises(ValueError):
        fit_decay(t[:5], t[:5])


@settings(max_examples=100, deadline=None)
@given(p=st.floats(-5, 3), c=st.floats(1e-3, 1e3))
def test_fit_recovers_any_power(p, c):
    t = geometric_times(1, 1e4, 33)
    assert fit_decay(t, c * t ** p).slope == pytest.approx(p, abs=1e-9)


# -- norm series -----------------------------------------------------------

@pytest.mark.parametrize("spec", theorem_scenarios(), ids=lambda s: s.name)
def test_time_zero_norm_is_data_norm(spec):
    for case in spec.cases:
        if case.u1 != "zero" or case.u0 == "zero":
            continue
        setup = case.setup()
        data = ProblemSetup(setup.sym, setup.n, setup.u0hat, s=setup.s)
        got = norm_at(data, Quantity.SOLUTION, case.zone, 0.0)
        prof = parse_profile(case.u0)
        f = lambda r: prof(r) ** 2 * r ** (setup.n - 1 + 2 * setup.s)
        lo, hi = {Zone.INTERIOR: (0, 0.5), Zone.EXTERIOR: (2, np.inf)}[case.zone]
        exact = math.sqrt(integrate.quad(f, lo, hi, limit=200)[0])
        assert got == pytest.approx(exact, rel=1e-8)


def test_solution_cross_check_at_unit_time():
    sym = power_law(1.0)
    setup = ProblemSetup(sym, 3, RadialProfile.gaussian(), RadialProfile.gaussian())

    def f(r):
        kv = kernels(1.0, r, sym)
        return (kv.k0 + kv.k1) ** 2 * math.exp(-2 * r * r) * r * r
    exact = math.sqrt(integrate.quad(f, 0, 0.5, epsabs=0, epsrel=1e-12)[0])
    assert norm_at(setup, Quantity.SOLUTION, Zone.INTERIOR, 1.0) == pytest.approx(exact, rel=1e-10)


def test_exterior_log_space_matches_direct():
    # for moderate t both evaluation paths of the integrand must agree
    setup = ProblemSetup(power_law(1.0), 2, RadialProfile.algebraic_tail(2.0),
                         RadialProfile.gaussian())
    for q in Quantity:
        m = ModeIntegrand(setup, q, 3.0)
        u = np.linspace(math.log(2.0), 5.0, 40)
        r = np.exp(u)
        direct = m(r) * r ** 2
        if q is Quantity.PROFILE_RESIDUAL:
            continue  # the exterior residual subtracts a different profile by design
        assert np.allclose(m.weighted_log(u, 2), direct, rtol=1e-9, atol=1e-300)


@pytest.mark.parametrize("sym", [fractional(), power_law(1.0), logarithmic(1.0)],
                         ids=lambda s: s.label)
def test_energy_non_increasing(sym):
    setup = ProblemSetup(sym, 2, RadialProfile.gaussian(), RadialProfile.gaussian())
    ts = np.geomspace(0.1, 1e3, 9)
    e = [norm_at(setup, Quantity.ENERGY_GRAD, Zone.ALL, t) ** 2
         + norm_at(setup, Quantity.ENERGY_TIME, Zone.ALL, t) ** 2 for t in ts]
    assert np.all(np.diff(e) <= 1e-12 * e[0])


@pytest.mark.parametrize("sym", [power_law(1.0), logarithmic(1.0)], ids=lambda s: s.label)
def test_profile_residual_below_solution(sym):
    setup = ProblemSetup(sym, 3, RadialProfile.gaussian(), RadialProfile.gaussian())
    ts = np.geomspace(1e2, 1e4, 5)
    sol = norm_series(setup, Quantity.SOLUTION, Zone.INTERIOR, ts).norm
    res = norm_series(setup, Quantity.PROFILE_RESIDUAL, Zone.INTERIOR, ts).norm
    assert np.all(res <= sol)


def test_series_rows():
    setup = ProblemSetup(fractional(), 3, RadialProfile.gaussian())
    ser = norm_series(setup, Quantity.SOLUTION, times=[1.0, 2.0])
    assert ser.rows()[0][2:] == ("SolutionItself", "Interior", ser.symbol, 3)
    assert ser.norm[1] < ser.norm[0]


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        norm_series(ProblemSetup(fractional(), 3, RadialProfile.gaussian()), Quantity.SOLUTION,
                    times=[-1.0])


# -- regularity loss -------------------------------------------------------

def test_loss_bounded_symbol_is_exponential():
    rep = regularity_loss_probe(fractional(), 1, 0.0, 1.501)
    assert rep.classification is DecayClass.EXPONENTIAL and rep.passed


def test_loss_power_law_polynomial_rate():
    rep = regularity_loss_probe(power_law(1.0), 1, 1.0, 1.501, expected_slope=-1.0)
    assert rep.classification is DecayClass.POLYNOMIAL
    assert rep.slope == pytest.approx(-1.0, abs=0.1)
    assert rep.passed


# -- scenarios -------------------------------------------------------------

def test_scenario_names():
    names = scenario_names()
    for required in ("example-2.1-fractional-interior", "thm-3.2-profile-residual",
                     "hypC-sigma-1-energy"):
        assert required in names
    assert len(set(names)) == len(names)
    with pytest.raises(KeyError):
        get_scenario("nope")


def test_hypc_scenario_expectation():
    case = get_scenario("hypC-sigma-1-energy").cases[0]
    assert case.expected == -1.0 and case.quantity is Quantity.ENERGY_GRAD
