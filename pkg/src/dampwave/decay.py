"""Decay experiments: interior exponents, norm series, slope fits,
regularity-loss classification and the canned theorem scenarios.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import AlphaUndecided, EmptyAlphaSet, FitDomainError
from .quadrature import (NormRequest, RadialProfile, multiplier_small_norm, parse_profile,
                         profile_label, radial_l2)
from .spectral import Zone, ZonePartition, kernel_arrays, profile_arrays, zone_mask
from .symbols import RegularityClass, SymbolSpec, parse_symbol, satisfies_small_frequency_bound

DEFAULT_LN_R_CAP = 2.0e4
# keeps r^2 finite, which symbols with r mu -> 0 need in the kernels
FINITE_LN_R_CAP = 300.0
EXPONENTIAL_SLOPE = -8.0


# -- alpha exponent --------------------------------------------------------

@dataclass(frozen=True)
class AlphaQuery:
    sym: SymbolSpec
    n: int
    s: float
    eps: float = ZonePartition().eps
    tol: float = 1e-2
    margin: float = 1e-3
    cap: float = 64.0
    probe_exponents: tuple[int, ...] = tuple(range(20, 41))


def symbol_local_slopes(sym: SymbolSpec, exponents: Sequence[int]) -> np.ndarray:
    """d ln mu / d ln r near 0, from halving steps at r = 2^-k."""
    k = np.asarray(exponents, dtype=float)
    r = np.ldexp(1.0, -k.astype(int))
    with np.errstate(divide="ignore", invalid="ignore"):
        return (np.log(sym(r)) - np.log(sym(0.5 * r))) / math.log(2.0)


def alpha_sup(q: AlphaQuery) -> float:
    """sup of alpha with r^(2s+n-1-2 alpha) mu(r)^(-alpha) integrable near 0.

    Convergence of a trial alpha is read off the limiting local log-slope
    p = 2s+n-1-2 alpha - alpha q of the integrand, where q is the local slope
    of mu; p > -1 + margin counts as integrable.  Returns math.inf when the
    doubling search reaches ``cap`` while still integrable.
    """
    base = 2.0 * q.s + q.n
    if base <= 0:
        raise EmptyAlphaSet(f"2s+n = {base} <= 0: no admissible exponent")
    slopes = symbol_local_slopes(q.sym, q.probe_exponents)
    if not np.all(np.isfinite(slopes)):
        raise AlphaUndecided(f"{q.sym.label}: mu vanishes or blows up too fast near 0")
    tail = slopes[-6:]
    steps = np.diff(tail)
    if np.ptp(tail) > 0.05 and np.any(steps[1:] * steps[:-1] < 0):
        raise AlphaUndecided(f"{q.sym.label}: local slope of mu oscillates near 0")
    q_lim = float(slopes[-1])

    def integrable(alpha: float) -> bool:
        return base - 1.0 - 2.0 * alpha - alpha * q_lim > -1.0 + q.margin

    lo, hi = 0.0, 1.0
    while integrable(hi):
        if hi >= q.cap:
            return math.inf
        lo, hi = hi, 2.0 * hi
    while hi - lo > q.tol:
        mid = 0.5 * (lo + hi)
        if integrable(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# -- norm series -----------------------------------------------------------

class Quantity(enum.Enum):
    SOLUTION = "SolutionItself"
    ENERGY_GRAD = "EnergyGrad"
    ENERGY_TIME = "EnergyTime"
    PROFILE_RESIDUAL = "ProfileResidual"


@dataclass(frozen=True)
class ProblemSetup:
    """Symbol, dimension and radial data for the linear problem.

    ``s`` weights every integrand by r^(2s).  The truncation radius defaults
    to ln r = 300 for Finite-class symbols and to ln r = 2e4 for
    Infinite-class ones, whose exterior decay is only polynomial.
    """

    sym: SymbolSpec
    n: int
    u0hat: RadialProfile
    u1hat: RadialProfile = RadialProfile.zero()
    zp: ZonePartition = ZonePartition()
    s: float = 0.0
    ell0: float = 0.0
    ell1: float = 0.0
    r_cap: Optional[float] = None
    ln_r_cap: Optional[float] = None

    def __post_init__(self):
        if self.n < 1 or int(self.n) != self.n:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if self.ell0 < 0 or self.ell1 < 0:
            raise ValueError("ell0 and ell1 must be non-negative")

    @property
    def infinite_class(self) -> bool:
        return self.sym.regularity_class is RegularityClass.INFINITE

    def caps(self) -> tuple[float, Optional[float]]:
        if self.r_cap is not None or self.ln_r_cap is not None:
            return (self.r_cap or 1e6), self.ln_r_cap
        if self.infinite_class:
            return 1e6, DEFAULT_LN_R_CAP
        return 1e6, FINITE_LN_R_CAP


def _signed_exp(k, sign, log_data, shift):
    """k * sign * exp(log_data + shift), combined in log space."""
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        mag = np.exp(np.log(np.abs(k)) + log_data + shift)
    return np.where(mag == 0, 0.0, np.sign(k) * sign * mag)


class ModeIntegrand:
    """Squared modulus of one quantity at time t, as a function of r.

    Calling it evaluates on finite radii; :meth:`weighted_log` evaluates
    integrand * r^n at u = ln r for the exterior zone.
    """

    def __init__(self, setup: ProblemSetup, quantity: Quantity, t: float):
        self.p = setup
        self.quantity = quantity
        self.t = float(t)

    def __call__(self, r):
        p, t = self.p, self.t
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            mu = np.where(r == 0, 0.0, p.sym(r))
        k0, k1, dk0, dk1 = kernel_arrays(t, r, mu)
        d0, d1 = p.u0hat(r), p.u1hat(r)
        q = self.quantity
        if q is Quantity.ENERGY_TIME:
            w = dk0 * d0 + dk1 * d1
        else:
            w = k0 * d0 + k1 * d1
            if q is Quantity.ENERGY_GRAD:
                w = r * w
            elif q is Quantity.PROFILE_RESIDUAL:
                _, _, h0, h1 = profile_arrays(t, r, mu)
                inside = zone_mask(r, Zone.INTERIOR, p.zp)
                w = w - np.where(inside, h0 * d0 + h1 * d1, 0.0)
        with np.errstate(divide="ignore", invalid="ignore"):
            weight = np.power(r, 2.0 * p.s) if p.s else 1.0
        return w * w * weight

    def weighted_log(self, u, n: int):
        p, t = self.p, self.t
        u = np.asarray(u, dtype=float)
        with np.errstate(over="ignore"):
            r = np.exp(u)
        mu = p.sym.eval_log(u)
        k0, _, dk0, dk1 = kernel_arrays(t, r, mu)
        r2k1 = -dk0  # r^2 k1, finite even at r = inf
        l0, l1 = p.u0hat.log_abs(u), p.u1hat.log_abs(u)
        s0, s1 = p.u0hat.sign(u), p.u1hat.sign(u)
        half = (0.5 * n + p.s) * u
        q = self.quantity
        if q is Quantity.ENERGY_TIME:
            w = _signed_exp(dk0, s0, l0, half) + _signed_exp(dk1, s1, l1, half)
        elif q is Quantity.ENERGY_GRAD:
            w = _signed_exp(k0, s0, l0, half + u) + _signed_exp(r2k1, s1, l1, half - u)
        elif q is Quantity.PROFILE_RESIDUAL and p.infinite_class:
            with np.errstate(divide="ignore"):
                g0 = np.exp(-t / mu) if t > 0 else np.ones_like(u)
                w = (_signed_exp(k0 - g0, s0, l0, half)
                     + _signed_exp(r2k1 - g0 / mu, s1, l1, half - 2.0 * u))
        else:
            w = _signed_exp(k0, s0, l0, half) + _signed_exp(r2k1, s1, l1, half - 2.0 * u)
        return w * w


@dataclass
class NormSeries:
    t: np.ndarray
    norm: np.ndarray
    quantity: str
    zone: str
    symbol: str
    n: int

    def rows(self) -> list[tuple]:
        return [(float(t), float(v), self.quantity, self.zone, self.symbol, self.n)
                for t, v in zip(self.t, self.norm)]


def geometric_times(t_min: float = 1.0, t_max: float = 1e4, count: int = 12) -> np.ndarray:
    if not 0 < t_min < t_max or count < 2:
        raise ValueError("need 0 < t_min < t_max and count >= 2")
    return np.geomspace(t_min, t_max, count)


def norm_at(setup: ProblemSetup, quantity: Quantity, zone: Zone, t: float) -> float:
    integrand = ModeIntegrand(setup, quantity, t)
    r_cap, ln_r_cap = setup.caps()
    req = NormRequest(integrand, setup.n, zone, setup.zp, t_hint=t, r_cap=r_cap,
                      ln_r_cap=ln_r_cap, weighted_log=integrand.weighted_log)
    return radial_l2(req)


def norm_series(setup: ProblemSetup, quantity: Quantity, zone: Zone = Zone.INTERIOR,
                times: Optional[Sequence[float]] = None) -> NormSeries:
    """Zone-restricted L2 norm of ``quantity`` at each time."""
    ts = geometric_times() if times is None else np.asarray(times, dtype=float)
    if np.any(ts < 0):
        raise ValueError("times must be non-negative")
    norms = np.array([norm_at(setup, quantity, zone, float(t)) for t in ts])
    return NormSeries(ts, norms, quantity.value, zone.value, setup.sym.label, setup.n)


# -- fitting ---------------------------------------------------------------

class DecayClass(enum.Enum):
    POLYNOMIAL = "Polynomial"
    EXPONENTIAL = "Exponential"


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    max_residual: float
    t_window: tuple[float, float]
    n_points: int

    @property
    def kind(self) -> DecayClass:
        return DecayClass.EXPONENTIAL if self.slope < EXPONENTIAL_SLOPE else DecayClass.POLYNOMIAL


def _window(t: np.ndarray, t_min: Optional[float], t_max: Optional[float]) -> np.ndarray:
    hi = float(t.max()) if t_max is None else t_max
    lo = hi / 10.0 if t_min is None else t_min
    # tolerate rounding in geometric grids at the window edges
    return (t >= lo * (1 - 1e-12)) & (t <= hi * (1 + 1e-12))


def fit_decay(t, norms, t_min: Optional[float] = None, t_max: Optional[float] = None,
              min_points: int = 8) -> DecayFit:
    """Least-squares line through (ln t, ln norm) over [t_min, t_max].

    The default window is the last decade of the series.
    """
    t = np.asarray(t, dtype=float)
    norms = np.asarray(norms, dtype=float)
    sel = _window(t, t_min, t_max)
    tw, nw = t[sel], norms[sel]
    if tw.size < min_points:
        raise ValueError(f"fit window holds {tw.size} points, need at least {min_points}")
    if np.any(tw <= 0):
        raise FitDomainError("fit window must lie in t > 0")
    if np.any(~(nw > 0)):
        raise FitDomainError("norms must be positive to fit in log-log")
    x, y = np.log(tw), np.log(nw)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return DecayFit(float(slope), float(intercept), float(np.max(np.abs(resid))),
                    (float(tw[0]), float(tw[-1])), int(tw.size))


def classify_decay(t, norms, t_min: Optional[float] = None,
                   t_max: Optional[float] = None) -> tuple[DecayClass, float]:
    """Exponential if the norms underflow to 0 in the window or the slope is below -8."""
    t = np.asarray(t, dtype=float)
    norms = np.asarray(norms, dtype=float)
    sel = _window(t, t_min, t_max)
    if np.any(norms[sel] == 0):
        return DecayClass.EXPONENTIAL, -math.inf
    fit = fit_decay(t, norms, t_min, t_max)
    return fit.kind, fit.slope


# -- regularity loss -------------------------------------------------------

@dataclass
class LossReport:
    symbol: str
    regularity_class: RegularityClass
    classification: DecayClass
    slope: float
    expected_slope: Optional[float]
    tolerance: float
    series: NormSeries = field(repr=False)

    @property
    def expected_class(self) -> DecayClass:
        if self.regularity_class is RegularityClass.INFINITE:
            return DecayClass.POLYNOMIAL
        return DecayClass.EXPONENTIAL

    @property
    def passed(self) -> bool:
        if self.classification is not self.expected_class:
            return False
        if self.expected_slope is None:
            return True
        return abs(self.slope - self.expected_slope) <= self.tolerance


def loss_times() -> np.ndarray:
    return np.geomspace(1.0, 1e4, 33)


def regularity_loss_probe(sym: SymbolSpec, n: int, ell: float, a_data: float, s: float = 0.0,
                          times: Optional[Sequence[float]] = None,
                          expected_slope: Optional[float] = None,
                          tolerance: float = 0.1) -> LossReport:
    """Exterior solution norms for AlgebraicTail(a_data) initial position.

    Infinite-class symbols should decay polynomially (slope about -ell when
    a_data makes mu^ell r^s u0hat borderline square-integrable); Finite-class
    symbols should decay exponentially.
    """
    setup = ProblemSetup(sym, n, RadialProfile.algebraic_tail(a_data), s=s, ell0=ell)
    series = norm_series(setup, Quantity.SOLUTION, Zone.EXTERIOR,
                         loss_times() if times is None else times)
    kind, slope = classify_decay(series.t, series.norm)
    return LossReport(sym.label, sym.regularity_class, kind, slope, expected_slope, tolerance,
                      series)


# -- scenarios -------------------------------------------------------------

class Check(enum.Enum):
    MULTIPLIER_SLOPE = "multiplier-slope"
    SLOPE = "slope"
    CLASS = "class"
    ENHANCEMENT = "enhancement"
    LOW_DIMENSION = "low-dimension"


@dataclass(frozen=True)
class ScenarioCase:
    label: str
    check: Check
    symbol: str
    n: int
    s: float = 0.0
    u0: str = "gaussian:scale=1"
    u1: str = "zero"
    quantity: Quantity = Quantity.SOLUTION
    zone: Zone = Zone.INTERIOR
    times: tuple[float, float, int] = (1.0, 1e4, 33)
    fit_t_min: Optional[float] = None
    expected: Optional[float] = None
    expected_class: Optional[DecayClass] = None
    tolerance: float = 0.05

    def time_grid(self) -> np.ndarray:
        return geometric_times(*self.times)

    def setup(self) -> ProblemSetup:
        return ProblemSetup(parse_symbol(self.symbol), self.n, parse_profile(self.u0),
                            parse_profile(self.u1), s=self.s)


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    description: str
    cases: tuple[ScenarioCase, ...]


@dataclass
class CaseOutcome:
    scenario: str
    case: str
    slope: float
    expected: str
    tolerance: float
    passed: bool
    series: list[NormSeries]

    @property
    def summary_row(self) -> tuple:
        return (f"{self.scenario}/{self.case}", self.slope, self.expected, self.tolerance,
                self.passed)


def _interior_rate(beta: float, n: int, s: float) -> float:
    return -(2 * s + n) / (2 * (2 + beta))


def theorem_scenarios() -> list[ScenarioSpec]:
    """The canned acceptance experiments."""
    multiplier = tuple(
        ScenarioCase(f"beta={b!r},n={n},s={s!r}", Check.MULTIPLIER_SLOPE, f"power-law:beta={b!r}",
                     n, s, times=(1e2, 1e4, 12), fit_t_min=1e2,
                     expected=_interior_rate(b, n, s))
        for b, n, s in ((0.0, 3, 0.0), (1.0, 3, 0.0), (-0.5, 2, 0.5)))
    rates = (
        ScenarioCase("u0-only", Check.SLOPE, "fractional:p=1,eps=0", 3, expected=-0.75),
        ScenarioCase("u1-only", Check.SLOPE, "fractional:p=1,eps=0", 3, u0="zero",
                     u1="gaussian:scale=1", expected=-0.25),
    )
    loss = (
        ScenarioCase("constant-mu", Check.CLASS, "fractional:p=1,eps=0", 1, u0="algebraic:a=1.501",
                     zone=Zone.EXTERIOR, expected_class=DecayClass.EXPONENTIAL, tolerance=0.1),
        ScenarioCase("power-law-beta=-0.5", Check.CLASS, "power-law:beta=-0.5", 1,
                     u0="algebraic:a=1.501", zone=Zone.EXTERIOR,
                     expected_class=DecayClass.EXPONENTIAL, tolerance=0.1),
        # a = ell + n/2 + 1e-3 makes mu^ell u0hat borderline square-integrable
        ScenarioCase("power-law-beta=1", Check.CLASS, "power-law:beta=1", 1,
                     u0="algebraic:a=1.501", zone=Zone.EXTERIOR, expected=-1.0,
                     expected_class=DecayClass.POLYNOMIAL, tolerance=0.1),
        ScenarioCase("logarithmic-gamma=1", Check.CLASS, "logarithmic:gamma=1", 1,
                     u0="algebraic:a=0.501", zone=Zone.EXTERIOR,
                     expected_class=DecayClass.POLYNOMIAL, tolerance=0.1),
    )
    low_dim = tuple(
        ScenarioCase(f"n={n}", Check.LOW_DIMENSION, "fractional:p=1,eps=0", n, u0="zero",
                     u1="gaussian:scale=1")
        for n in (1, 2))
    profile = tuple(
        ScenarioCase(label, Check.ENHANCEMENT, sym, 3, u1="gaussian:scale=1",
                     times=(1e2, 1e4, 17), fit_t_min=1e2, expected=-0.8)
        for label, sym in (("constant-mu", "fractional:p=1,eps=0"),
                           ("power-law-beta=1", "power-law:beta=1")))
    hypc = (
        ScenarioCase("interior-energy", Check.SLOPE, "hypC-log:sigma=1", 2,
                     quantity=Quantity.ENERGY_GRAD, expected=-(0 + 2 + 2) / 4, tolerance=0.1),
        ScenarioCase("exterior", Check.CLASS, "hypC-log:sigma=1", 2, zone=Zone.EXTERIOR,
                     expected_class=DecayClass.EXPONENTIAL, tolerance=0.1),
    )
    return [
        ScenarioSpec("example-2.1-fractional-interior",
                     "interior multiplier rate -(2s+n)/(2(2+beta)) for mu = r^beta", multiplier),
        ScenarioSpec("thm-2.1-corollary-rates",
                     "interior solution rates for mu = 1, n = 3, Gaussian data", rates),
        ScenarioSpec("regularity-loss-threshold",
                     "exterior decay: exponential iff mu stays bounded", loss),
        ScenarioSpec("thm-3.1-low-dimension",
                     "u1-only interior solution for n = 1, 2", low_dim),
        ScenarioSpec("thm-3.2-profile-residual",
                     "profile residual decays at least 0.8 faster than the solution", profile),
        ScenarioSpec("hypC-sigma-1-energy",
                     "mu = r^-2 log(1 + r^2): interior energy rate and exterior class", hypc),
    ]


def scenario_names() -> list[str]:
    return [spec.name for spec in theorem_scenarios()]


def get_scenario(name: str) -> ScenarioSpec:
    for spec in theorem_scenarios():
        if spec.name == name:
            return spec
    raise KeyError(f"unknown scenario {name!r}; available: {', '.join(scenario_names())}")


def run_case(scenario: str, case: ScenarioCase) -> CaseOutcome:
    times = case.time_grid()
    check = case.check

    if check is Check.MULTIPLIER_SLOPE:
        sym = parse_symbol(case.symbol)
        norms = np.array([multiplier_small_norm(sym, case.n, case.s, 1.0, float(t))
                          for t in times])
        series = NormSeries(times, norms, "Multiplier", Zone.INTERIOR.value, sym.label, case.n)
        slope = fit_decay(times, norms, t_min=case.fit_t_min).slope
        ok = abs(slope - case.expected) <= case.tolerance
        return CaseOutcome(scenario, case.label, slope, repr(case.expected), case.tolerance,
                           ok, [series])

    setup = case.setup()
    if check is Check.SLOPE:
        series = norm_series(setup, case.quantity, case.zone, times)
        slope = fit_decay(series.t, series.norm, t_min=case.fit_t_min).slope
        ok = abs(slope - case.expected) <= case.tolerance
        return CaseOutcome(scenario, case.label, slope, repr(case.expected), case.tolerance,
                           ok, [series])

    if check is Check.CLASS:
        series = norm_series(setup, case.quantity, case.zone, times)
        kind, slope = classify_decay(series.t, series.norm, t_min=case.fit_t_min)
        ok = kind is case.expected_class
        expected = case.expected_class.value
        if case.expected is not None:
            ok = ok and abs(slope - case.expected) <= case.tolerance
            expected = f"{expected} {case.expected!r}"
        return CaseOutcome(scenario, case.label, slope, expected, case.tolerance, ok, [series])

    if check is Check.ENHANCEMENT:
        if case.n < 3 and not satisfies_small_frequency_bound(setup.sym):
            raise ValueError(f"{setup.sym.label} violates the small-frequency bound for n < 3")
        sol = norm_series(setup, Quantity.SOLUTION, case.zone, times)
        res = norm_series(setup, Quantity.PROFILE_RESIDUAL, case.zone, times)
        gain = (fit_decay(res.t, res.norm, t_min=case.fit_t_min).slope
                - fit_decay(sol.t, sol.norm, t_min=case.fit_t_min).slope)
        ok = gain <= case.expected
        return CaseOutcome(scenario, case.label, gain, repr(case.expected), case.tolerance,
                           ok, [sol, res])

    if check is Check.LOW_DIMENSION:
        series = norm_series(setup, Quantity.SOLUTION, case.zone, np.concatenate([[0.0], times]))
        finite = bool(np.all(np.isfinite(series.norm)))
        alpha = low_dimension_alpha(setup.sym, case.n)
        bound = -alpha / 2.0 + case.tolerance
        slope = fit_decay(series.t[1:], series.norm[1:], t_min=case.fit_t_min).slope
        ok = finite and slope <= bound
        return CaseOutcome(scenario, case.label, slope, f"<= {bound!r}", case.tolerance, ok,
                           [series])

    raise ValueError(f"unknown check {check}")


def low_dimension_alpha(sym: SymbolSpec, n: int) -> float:
    """alpha^m_{n,-1}, taking sup of the empty set over [0, inf) as 0."""
    try:
        return alpha_sup(AlphaQuery(sym, n, -1.0))
    except EmptyAlphaSet:
        return 0.0


def run_scenario(spec: ScenarioSpec) -> list[CaseOutcome]:
    return [run_case(spec.name, case) for case in spec.cases]
