"""Damping symbols mu(r) and probe-based checks of their limit behaviour.

A symbol is a non-negative continuous function of the frequency radius
r = |xi|.  Every catalog entry is vectorised over numpy arrays and carries
declared limit metadata; the probes in :func:`check_hypotheses` only measure
trends along geometric sequences and report them next to the declaration.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import MetadataMismatchError, SymbolEvaluationError


class RegularityClass(enum.Enum):
    FINITE = "Finite"
    INFINITE = "Infinite"


class LargeLimitKind(enum.Enum):
    HYP_A = "HypA"
    HYP_C = "HypC"
    FAILS = "Fails"


@dataclass(frozen=True)
class SymbolSpec:
    """A damping symbol with declared limit metadata.

    ``func`` maps an array of radii to mu values.  ``log_func`` optionally
    evaluates mu as a function of u = ln r, which lets exterior integrals run
    past the largest representable radius.
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray] = field(repr=False, compare=False)
    params: tuple[tuple[str, float], ...] = ()
    log_func: Optional[Callable[[np.ndarray], np.ndarray]] = field(
        default=None, repr=False, compare=False)
    declared_small_limit: Optional[float] = None
    declared_large_limit: Optional[float] = None
    declared_regularity: Optional[RegularityClass] = None
    declared_large_rmu: Optional[float] = None

    def __call__(self, r):
        return self.func(np.asarray(r, dtype=float))

    def eval_log(self, u):
        u = np.asarray(u, dtype=float)
        # mu may legitimately overflow to inf far out; kernels take that limit
        with np.errstate(over="ignore"):
            if self.log_func is not None:
                return self.log_func(u)
            return self.func(np.exp(u))

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        args = ",".join(f"{k}={_fmt_param(v)}" for k, v in self.params)
        return f"{self.name}:{args}"

    def param(self, key: str) -> float:
        return dict(self.params)[key]

    @property
    def regularity_class(self) -> RegularityClass:
        """Declared class if present, otherwise the probed one."""
        if self.declared_regularity is not None:
            return self.declared_regularity
        return check_hypotheses(self).regularity_class


def _fmt_param(v: float) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def eval_mu(sym: SymbolSpec, r: float) -> float:
    """Evaluate mu at a single radius, rejecting NaN or negative output."""
    if not (r >= 0 and math.isfinite(r)):
        raise ValueError(f"radius must be finite and non-negative, got {r!r}")
    value = float(sym(r))
    if math.isnan(value) or value < 0:
        raise SymbolEvaluationError(f"{sym.label}: mu({r}) = {value}")
    return value


# -- catalog ---------------------------------------------------------------

def fractional(p: float = 1.0, eps: float = 0.0) -> SymbolSpec:
    """mu(r) = p r^eps with |eps| < 1; eps = 0 is the classical mu = p."""
    if p <= 0 or not -1 < eps < 1:
        raise ValueError("fractional needs p > 0 and |eps| < 1")

    def f(r):
        with np.errstate(divide="ignore"):
            return p * np.power(r, eps) if eps else np.full_like(r, p)

    if eps > 0:
        large = math.inf
    else:
        large = p if eps == 0 else 0.0
    return SymbolSpec(
        "fractional", f, (("p", p), ("eps", eps)),
        log_func=lambda u: p * np.exp(eps * u),
        declared_small_limit=0.0, declared_large_limit=large,
        declared_regularity=_reg(large), declared_large_rmu=math.inf)


def oscillating(p: float = 1.0, q: float = 1.0) -> SymbolSpec:
    if p <= 0 or q <= 0:
        raise ValueError("oscillating needs p, q > 0")

    def f(r):
        return p * (1 + np.sin(r)) + q * (1 + np.cos(r))

    return SymbolSpec(
        "oscillating", f, (("p", p), ("q", q)),
        declared_small_limit=0.0, declared_large_limit=None,
        declared_regularity=RegularityClass.FINITE, declared_large_rmu=math.inf)


def logarithmic(gamma: float = 1.0) -> SymbolSpec:
    """mu(r) = log(1 + r)^gamma, gamma > -1."""
    if gamma <= -1:
        raise ValueError("logarithmic needs gamma > -1")

    def f(r):
        with np.errstate(divide="ignore"):
            return np.power(np.log1p(r), gamma)

    def flog(u):
        # log(1 + e^u) without overflow
        return np.power(np.logaddexp(0.0, u), gamma)

    if gamma > 0:
        large = math.inf
    else:
        large = 1.0 if gamma == 0 else 0.0
    return SymbolSpec(
        "logarithmic", f, (("gamma", gamma),), log_func=flog,
        declared_small_limit=0.0, declared_large_limit=large,
        declared_regularity=_reg(large), declared_large_rmu=math.inf)


def k_logarithmic(k: int = 2) -> SymbolSpec:
    """k-fold iterated log(1 + .) applied to r."""
    if k < 1 or int(k) != k:
        raise ValueError("k-log needs an integer k >= 1")
    k = int(k)

    def f(r):
        out = r
        for _ in range(k):
            out = np.log1p(out)
        return out

    def flog(u):
        out = np.logaddexp(0.0, u)
        for _ in range(k - 1):
            out = np.log1p(out)
        return out

    return SymbolSpec(
        "k-log", f, (("k", k),), log_func=flog,
        declared_small_limit=0.0, declared_large_limit=math.inf,
        declared_regularity=RegularityClass.INFINITE, declared_large_rmu=math.inf)


def non_c1() -> SymbolSpec:
    """(r - 1)^2 |sin(1/(r - 1))|, extended by 0 at r = 1.

    Continuous but not C^1 at r = 1.  The absolute value keeps the symbol
    non-negative on [0, 1 + 1/pi]; beyond that it coincides with
    (r - 1)^2 sin(1/(r - 1)).
    """

    def f(r):
        h = r - 1.0
        safe = np.where(h == 0, 1.0, h)
        return np.where(h == 0, 0.0, h * h * np.abs(np.sin(1.0 / safe)))

    return SymbolSpec(
        "non-c1", f, (),
        declared_small_limit=0.0, declared_large_limit=math.inf,
        declared_regularity=RegularityClass.INFINITE, declared_large_rmu=math.inf)


def power_law(beta: float = 1.0) -> SymbolSpec:
    """mu(r) = r^beta.  beta = -2 is accepted as the family boundary."""
    if beta < -2:
        raise ValueError("power-law needs beta >= -2")

    def f(r):
        with np.errstate(divide="ignore"):
            return np.power(r, beta) if beta else np.ones_like(r)

    small = 0.0 if beta > -1 else (1.0 if beta == -1 else math.inf)
    if beta > 0:
        large = math.inf
    else:
        large = 1.0 if beta == 0 else 0.0
    rmu = math.inf if beta > -1 else (1.0 if beta == -1 else 0.0)
    return SymbolSpec(
        "power-law", f, (("beta", beta),),
        log_func=lambda u: np.exp(beta * u),
        declared_small_limit=small, declared_large_limit=large,
        declared_regularity=_reg(large), declared_large_rmu=rmu)


def hypc_log(sigma: float = 1.0) -> SymbolSpec:
    """mu(r) = r^-2 log(1 + r^(2 sigma)), sigma > 1/2 (outside Hypothesis A)."""
    if sigma <= 0.5:
        raise ValueError("hypC-log needs sigma > 1/2")

    def flog(u):
        return np.logaddexp(0.0, 2 * sigma * u) * np.exp(-2 * u)

    def f(r):
        # small r: r^(2 sigma - 2) * log1p(x)/x, which avoids 0/0 when r^2 underflows
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            x = np.power(r, 2 * sigma)
            ratio = np.where(x == 0, 1.0, np.log1p(x) / np.where(x == 0, 1.0, x))
            small = ratio * np.power(r, 2 * sigma - 2)
            large = flog(np.log(np.maximum(r, 1.0)))
        return np.where(r < 1, small, large)

    return SymbolSpec(
        "hypC-log", f, (("sigma", sigma),), log_func=flog,
        declared_small_limit=0.0, declared_large_limit=0.0,
        declared_regularity=RegularityClass.FINITE, declared_large_rmu=0.0)


def _reg(large_limit: float) -> RegularityClass:
    return RegularityClass.INFINITE if math.isinf(large_limit) else RegularityClass.FINITE


CATALOG: dict[str, Callable[..., SymbolSpec]] = {
    "fractional": fractional,
    "oscillating": oscillating,
    "logarithmic": logarithmic,
    "k-log": k_logarithmic,
    "non-c1": non_c1,
    "power-law": power_law,
    "hypC-log": hypc_log,
}


def make_symbol(name: str, **params: float) -> SymbolSpec:
    try:
        factory = CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown symbol {name!r}; supported: {', '.join(CATALOG)}") from None
    return factory(**params)


def builtin_catalog() -> list[SymbolSpec]:
    """Default-parameter instance of every catalog symbol."""
    return [factory() for factory in CATALOG.values()]


# -- hypothesis probing ----------------------------------------------------

@dataclass(frozen=True)
class ProbeConfig:
    small_exponents: tuple[int, ...] = tuple(range(1, 41))
    large_exponents: tuple[int, ...] = tuple(range(1, 41))
    window: int = 10
    factor: float = 1.2
    tol: float = 1e-3


@dataclass
class HypothesisReport:
    symbol: str
    small_limit_ok: bool
    large_limit_kind: LargeLimitKind
    regularity_class: RegularityClass
    regularity_decided: bool
    evidence: list[tuple[float, float, float]]
    mismatches: list[str] = field(default_factory=list)

    def raise_for_mismatch(self) -> None:
        if self.mismatches:
            raise MetadataMismatchError(f"{self.symbol}: " + "; ".join(self.mismatches))


def _tail(values: np.ndarray, window: int) -> np.ndarray:
    return values[-(window + 1):]


def check_hypotheses(sym: SymbolSpec, probe: ProbeConfig = ProbeConfig(),
                     strict: bool = False) -> HypothesisReport:
    """Probe r mu(r) near 0 and r mu(r), mu(r) near infinity.

    Trend rule: over the last ``probe.window`` points a quantity that shrinks
    (grows) by at least ``probe.factor`` is taken to tend to 0 (infinity);
    otherwise the last sample decides against ``probe.tol``.
    """
    r_small = np.ldexp(1.0, -np.asarray(probe.small_exponents))
    r_large = np.ldexp(1.0, np.asarray(probe.large_exponents))
    mu_small = np.asarray(sym(r_small), dtype=float)
    mu_large = np.asarray(sym(r_large), dtype=float)
    for r, mu in ((r_small, mu_small), (r_large, mu_large)):
        bad = np.isnan(mu) | (mu < 0)
        if bad.any():
            raise SymbolEvaluationError(f"{sym.label}: mu({r[bad][0]}) = {mu[bad][0]}")

    w = probe.window
    rmu_small = _tail(r_small * mu_small, w)
    with np.errstate(invalid="ignore", divide="ignore"):
        shrink = rmu_small[0] / rmu_small[-1]
    small_ok = bool(shrink >= probe.factor or rmu_small[-1] <= probe.tol)

    rmu_large = _tail(r_large * mu_large, w)
    with np.errstate(invalid="ignore", divide="ignore"):
        grow = rmu_large[-1] / rmu_large[0]
        inv_last = 1.0 / rmu_large[-1]
    steps = np.diff(rmu_large)
    if grow >= probe.factor or inv_last <= probe.tol:
        kind = LargeLimitKind.HYP_A
    elif np.all(steps <= 0) or np.ptp(rmu_large) <= probe.tol * max(1.0, rmu_large[-1]):
        kind = LargeLimitKind.HYP_C
    else:
        # r mu oscillates without a trend: membership is not decided here
        kind = LargeLimitKind.FAILS

    mu_tail = _tail(mu_large, w)
    monotone_up = bool(np.all(np.diff(mu_tail) >= 0))
    with np.errstate(invalid="ignore", divide="ignore"):
        mu_grow = mu_tail[-1] / mu_tail[0]
    if monotone_up and (mu_grow >= probe.factor or math.isinf(mu_tail[-1])):
        regularity, decided = RegularityClass.INFINITE, True
    elif monotone_up and np.ptp(mu_tail) > probe.tol * max(1.0, mu_tail[-1]):
        # slowly increasing: finite probing cannot separate log-type growth
        # from a bounded limit, so the declaration (if any) is used
        regularity = sym.declared_regularity or RegularityClass.FINITE
        decided = False
    else:
        regularity, decided = RegularityClass.FINITE, True

    evidence = [(float(r), float(r * m), float(m))
                for r, m in zip(np.concatenate([r_small, r_large]),
                                np.concatenate([mu_small, mu_large]))]
    report = HypothesisReport(sym.label, small_ok, kind, regularity, decided, evidence)

    if sym.declared_small_limit is not None and (sym.declared_small_limit == 0) != small_ok:
        report.mismatches.append(
            f"declared lim r mu = {sym.declared_small_limit} at 0, probe small_limit_ok={small_ok}")
    if sym.declared_large_rmu is not None and kind is not LargeLimitKind.FAILS:
        expect = LargeLimitKind.HYP_A if math.isinf(sym.declared_large_rmu) else LargeLimitKind.HYP_C
        if expect is not kind:
            report.mismatches.append(f"declared {expect.value}, probe {kind.value}")
    if decided and sym.declared_regularity is not None and sym.declared_regularity is not regularity:
        report.mismatches.append(
            f"declared {sym.declared_regularity.value}, probe {regularity.value}")
    if strict:
        report.raise_for_mismatch()
    return report


def satisfies_small_frequency_bound(sym: SymbolSpec, delta0: float = 0.01,
                                    probe: ProbeConfig = ProbeConfig()) -> bool:
    """Probe mu(r) <~ r^(-1/2 + delta0) as r -> 0 (needed for n = 1, 2 profiles)."""
    r = np.ldexp(1.0, -np.asarray(probe.small_exponents))
    ratio = sym(r) * np.power(r, 0.5 - delta0)
    tail = _tail(ratio, probe.window)
    return bool(np.all(np.isfinite(tail)) and tail[-1] <= tail[0] * probe.factor)


def parse_params(text: str) -> dict[str, float]:
    """Parse 'k=v,k=v' into floats."""
    out: dict[str, float] = {}
    if not text:
        return out
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"expected key=value, got {item!r}")
        out[key.strip()] = float(value)
    return out


def parse_symbol(text: str) -> SymbolSpec:
    """Build a catalog symbol from 'name' or 'name:k=v,k=v'."""
    name, _, args = text.strip().partition(":")
    params = parse_params(args)
    if name == "k-log" and "k" in params:
        params["k"] = int(params["k"])
    return make_symbol(name, **params)
