import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dampwave.errors import MetadataMismatchError, SymbolEvaluationError
from dampwave.symbols import (CATALOG, LargeLimitKind, RegularityClass, SymbolSpec,
                              builtin_catalog, check_hypotheses, eval_mu, fractional,
                              hypc_log, k_logarithmic, logarithmic, make_symbol, non_c1,
                              oscillating, parse_symbol, power_law,
                              satisfies_small_frequency_bound)


def test_eval_mu_constant_symbol():
    assert eval_mu(fractional(), 3.7) == 1.0


def test_eval_mu_logarithmic_at_zero():
    assert eval_mu(logarithmic(1.0), 0.0) == 0.0


def test_eval_mu_oscillating_at_zero():
    # p(1 + sin 0) + q(1 + cos 0) = 1 + 2 with p = q = 1
    assert eval_mu(oscillating(1.0, 1.0), 0.0) == 3.0
    assert eval_mu(oscillating(1.0, 1.0), 1.5 * math.pi) == pytest.approx(1.0)


def test_eval_mu_rejects_negative_user_symbol():
    bad = SymbolSpec("bad", lambda r: r - 1.0)
    with pytest.raises(SymbolEvaluationError):
        eval_mu(bad, 0.5)


def test_eval_mu_rejects_nan_user_symbol():
    bad = SymbolSpec("nan", lambda r: np.full_like(r, np.nan))
    with pytest.raises(SymbolEvaluationError):
        eval_mu(bad, 1.0)


@pytest.mark.parametrize("r", [-1.0, math.inf, math.nan])
def test_eval_mu_domain(r):
    with pytest.raises(ValueError):
        eval_mu(fractional(), r)


def test_catalog_names():
    names = {s.name for s in builtin_catalog()}
    assert {"fractional", "oscillating", "logarithmic", "k-log", "non-c1", "power-law",
            "hypC-log"} <= names


def test_non_c1_vanishes_at_one():
    assert eval_mu(non_c1(), 1.0) == 0.0


def test_non_c1_matches_signed_form_beyond_first_zero():
    r = np.linspace(1 + 1 / math.pi + 1e-9, 50, 200)
    assert np.allclose(non_c1()(r), (r - 1) ** 2 * np.sin(1 / (r - 1)))


def test_power_law_identity():
    assert eval_mu(power_law(1.0), 2.0) == 2.0


def test_k_log_iterates():
    r = 5.0
    assert eval_mu(k_logarithmic(2), r) == pytest.approx(math.log1p(math.log1p(r)))


def test_hypc_log_value_and_origin():
    assert eval_mu(hypc_log(1.0), 0.0) == 1.0
    assert eval_mu(hypc_log(1.0), 1e-300) == 1.0
    assert eval_mu(hypc_log(2.0), 0.0) == 0.0
    assert eval_mu(hypc_log(0.75), 0.0) == math.inf
    assert eval_mu(hypc_log(1.0), 2.0) == pytest.approx(math.log(5) / 4)
    assert eval_mu(hypc_log(1.0), 1e100) == pytest.approx(200 * math.log(10) * 1e-200, rel=1e-12)


def test_power_law_beta1_hypotheses():
    rep = check_hypotheses(power_law(1.0))
    assert rep.small_limit_ok
    assert rep.large_limit_kind is LargeLimitKind.HYP_A
    assert rep.regularity_class is RegularityClass.INFINITE


def test_constant_hypotheses():
    rep = check_hypotheses(fractional())
    assert rep.small_limit_ok
    assert rep.large_limit_kind is LargeLimitKind.HYP_A
    assert rep.regularity_class is RegularityClass.FINITE


def test_hypc_is_hypothesis_c():
    assert check_hypotheses(hypc_log(1.0)).large_limit_kind is LargeLimitKind.HYP_C


@pytest.mark.parametrize("sym", builtin_catalog(), ids=lambda s: s.label)
def test_catalog_metadata_reproduced(sym):
    rep = check_hypotheses(sym, strict=True)
    assert rep.mismatches == []
    assert len(rep.evidence) == 80


@pytest.mark.parametrize("beta, cls", [(-1, "Finite"), (-0.5, "Finite"), (0, "Finite"),
                                       (0.5, "Infinite"), (1, "Infinite"), (2, "Infinite")])
def test_power_law_regularity_threshold(beta, cls):
    sym = power_law(beta)
    assert check_hypotheses(sym).regularity_class.value == cls
    assert sym.regularity_class.value == cls


@pytest.mark.parametrize("sym", builtin_catalog(), ids=lambda s: s.label)
def test_catalog_non_negative(sym):
    r = np.linspace(0.0, 100.0, 10_000)
    assert np.min(sym(r)) >= 0


@pytest.mark.parametrize("sym", builtin_catalog(), ids=lambda s: s.label)
def test_catalog_continuity(sym):
    r = np.linspace(0.0, 20.0, 200_001)
    jumps = np.abs(np.diff(sym(r)))
    assert np.max(jumps) < 1e-2


def test_declared_mismatch_is_reported_not_raised():
    liar = SymbolSpec("liar", lambda r: np.ones_like(r), declared_regularity=RegularityClass.INFINITE)
    rep = check_hypotheses(liar)
    assert rep.mismatches
    with pytest.raises(MetadataMismatchError):
        rep.raise_for_mismatch()


def test_k_log_growth_left_to_declaration():
    rep = check_hypotheses(k_logarithmic(2))
    assert not rep.regularity_decided
    assert rep.regularity_class is RegularityClass.INFINITE


def test_oscillating_r_mu_without_trend_fails():
    # r mu(r) = sin(r)^2 + 0.5 on the probe grid: bounded, no monotone trend
    wobbly = SymbolSpec("wobbly", lambda r: (np.sin(r) ** 2 + 0.5) / np.maximum(r, 1e-300))
    assert check_hypotheses(wobbly).large_limit_kind is LargeLimitKind.FAILS


def test_make_symbol_unknown_lists_names():
    with pytest.raises(KeyError, match="power-law"):
        make_symbol("nope")


def test_parse_symbol_label_round_trip():
    for sym in builtin_catalog():
        assert parse_symbol(sym.label).label == sym.label


def test_parse_symbol_params():
    sym = parse_symbol("power-law:beta=0.5")
    assert sym.param("beta") == 0.5


def test_small_frequency_bound():
    assert satisfies_small_frequency_bound(fractional())
    assert not satisfies_small_frequency_bound(power_law(-1.5))


@settings(max_examples=60, deadline=None)
@given(name=st.sampled_from(sorted(CATALOG)), r=st.floats(0, 1e6))
def test_catalog_non_negative_property(name, r):
    assert eval_mu(make_symbol(name), r) >= 0


@settings(max_examples=40, deadline=None)
@given(beta=st.floats(-1.9, 3), u=st.floats(-30, 30))
def test_log_evaluator_matches_direct(beta, u):
    sym = power_law(beta)
    assert float(sym.eval_log(u)) == pytest.approx(float(sym(math.exp(u))), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(gamma=st.floats(-0.9, 3), u=st.floats(-20, 30))
def test_log_evaluator_logarithmic(gamma, u):
    sym = logarithmic(gamma)
    assert float(sym.eval_log(u)) == pytest.approx(float(sym(math.exp(u))), rel=1e-9)
