"""Brute-force checks: RK4 integration of single Fourier modes and the
Lyapunov functionals that bound their energy.

Each mode obeys  u'' + mu r^2 u' + r^2 u = 0  with real initial data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import InequalityViolation, OracleBudgetError
from .spectral import CONFLUENT_TOL, kernel_arrays, key_rho
from .symbols import SymbolSpec, eval_mu

MAX_STEPS = 10 ** 8


@dataclass(frozen=True)
class ModeState:
    u: float
    v: float
    t: float

    def __post_init__(self):
        if not (math.isfinite(self.u) and math.isfinite(self.v) and math.isfinite(self.t)):
            raise ValueError(f"non-finite mode state {self}")


@dataclass(frozen=True)
class Trajectory:
    """States of one mode sampled every ``dt``."""

    r: float
    mu: float
    dt: float
    t: np.ndarray = field(repr=False)
    u: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)

    def state(self, i: int) -> ModeState:
        return ModeState(float(self.u[i]), float(self.v[i]), float(self.t[i]))

    @property
    def final(self) -> ModeState:
        return self.state(-1)


def guard_dt(r: float, mu: float) -> float:
    """Largest step the stiffness and oscillation guard allows."""
    return min(0.1, 0.5 / (1.0 + mu * r * r), 0.5 / (1.0 + r))


def default_dt(r: float, mu: float) -> float:
    # well inside the guard; gives about 1e-8 accuracy on the verification grid
    return min(0.1, 0.1 / (1.0 + mu * r * r), 0.015 / (1.0 + r))


def _step_count(t_end: float, dt: float) -> int:
    steps = int(math.ceil(t_end / dt - 1e-9))
    if steps > MAX_STEPS:
        raise OracleBudgetError(f"{steps} steps exceed the budget of {MAX_STEPS}")
    return max(steps, 1)


def rk4_mode(r: float, sym: SymbolSpec, u0: float, v0: float, t_end: float,
             dt: float | None = None) -> Trajectory:
    """Classical RK4 for one mode.  The last step is shortened to land on t_end."""
    if not t_end > 0:
        raise ValueError("t_end must be positive")
    mu = eval_mu(sym, r) if r > 0 else 0.0  # mu(0) never enters the r = 0 mode
    limit = guard_dt(r, mu)
    if dt is None:
        dt = default_dt(r, mu)
    elif not 0 < dt <= limit:
        raise ValueError(f"dt={dt} violates the step guard {limit:.3e}")
    steps = _step_count(t_end, dt)
    a, b = mu * r * r, r * r

    ts = np.empty(steps + 1)
    us = np.empty(steps + 1)
    vs = np.empty(steps + 1)
    u, v, t = float(u0), float(v0), 0.0
    ts[0], us[0], vs[0] = t, u, v
    for i in range(1, steps + 1):
        h = min(dt, t_end - t) if i == steps else dt
        k1u, k1v = v, -a * v - b * u
        u2, v2 = u + 0.5 * h * k1u, v + 0.5 * h * k1v
        k2u, k2v = v2, -a * v2 - b * u2
        u3, v3 = u + 0.5 * h * k2u, v + 0.5 * h * k2v
        k3u, k3v = v3, -a * v3 - b * u3
        u4, v4 = u + h * k3u, v + h * k3v
        k4u, k4v = v4, -a * v4 - b * u4
        u += h * (k1u + 2 * k2u + 2 * k3u + k4u) / 6.0
        v += h * (k1v + 2 * k2v + 2 * k3v + k4v) / 6.0
        t = t_end if i == steps else t + h
        ts[i], us[i], vs[i] = t, u, v
    return Trajectory(r, mu, dt, ts, us, vs)


def rk4_final(r: np.ndarray, mu: np.ndarray, u0: np.ndarray, v0: np.ndarray,
              t_end: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """RK4 end states for many modes at once, each with its own step."""
    r, mu = np.asarray(r, float), np.asarray(mu, float)
    t_end = np.asarray(t_end, float)
    dt0 = np.minimum(np.minimum(0.1, 0.1 / (1.0 + mu * r * r)), 0.015 / (1.0 + r))
    steps = np.maximum(np.ceil(t_end / dt0 - 1e-9), 1).astype(np.int64)
    if steps.max(initial=0) > MAX_STEPS:
        raise OracleBudgetError(f"{steps.max()} steps exceed the budget of {MAX_STEPS}")
    h = t_end / steps
    a, b = mu * r * r, r * r
    u = np.array(u0, dtype=float, copy=True)
    v = np.array(v0, dtype=float, copy=True)
    for i in range(int(steps.max(initial=0))):
        live = steps > i
        hh = np.where(live, h, 0.0)
        k1u, k1v = v, -a * v - b * u
        u2, v2 = u + 0.5 * hh * k1u, v + 0.5 * hh * k1v
        k2u, k2v = v2, -a * v2 - b * u2
        u3, v3 = u + 0.5 * hh * k2u, v + 0.5 * hh * k2v
        k3u, k3v = v3, -a * v3 - b * u3
        u4, v4 = u + hh * k3u, v + hh * k3v
        k4u, k4v = v4, -a * v4 - b * u4
        u = u + hh * (k1u + 2 * k2u + 2 * k3u + k4u) / 6.0
        v = v + hh * (k1v + 2 * k2v + 2 * k3v + k4v) / 6.0
    return u, v


# -- Lyapunov functionals --------------------------------------------------

@dataclass(frozen=True)
class EnergyFunctionals:
    e0: float
    e: float
    f: float
    rr: float
    beta: float
    m1: float
    m2: float

    @property
    def rate_constant(self) -> float:
        """c = 2(1 - beta)/(M1 + M2) in E(t) <= exp(-c rho t) E(0)."""
        return 2.0 * (1.0 - self.beta) / (self.m1 + self.m2)


def lyapunov_constants(beta: float) -> tuple[float, float]:
    return 1.0 + beta * beta / 4.0, 4.0 + 2.0 / beta


def _check_beta(beta: float) -> None:
    if not 0 < beta < 1:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")


def _functional_arrays(u, v, r: float, mu: float, beta: float):
    rho = float(key_rho(mu, r))
    r2 = r * r
    e0 = v * v + r2 * u * u
    e = e0 + 2.0 * beta * rho * u * v + beta * rho * mu * r2 * u * u
    f = mu * r2 * v * v + beta * rho * r2 * u * u
    rr = beta * rho * v * v
    return e0, e, f, rr


def energy_functionals(state: ModeState, r: float, sym: SymbolSpec,
                       beta: float = 0.5) -> EnergyFunctionals:
    _check_beta(beta)
    mu = eval_mu(sym, r)
    e0, e, f, rr = _functional_arrays(state.u, state.v, r, mu, beta)
    m1, m2 = lyapunov_constants(beta)
    return EnergyFunctionals(e0, e, f, rr, beta, m1, m2)


@dataclass
class InequalityReport:
    r: float
    beta: float
    max_dissipation_residual: float
    max_gronwall_excess: float
    max_equivalence_violation: float
    max_identity_residual: float
    slack: float

    @property
    def ok(self) -> bool:
        # the energy identity is a consistency diagnostic, reported but not gated
        return (self.max_dissipation_residual <= self.slack
                and self.max_gronwall_excess <= self.slack
                and self.max_equivalence_violation <= self.slack)

    def raise_if_violated(self) -> None:
        if not self.ok:
            raise InequalityViolation(
                f"r={self.r}: dissipation {self.max_dissipation_residual:.3e}, "
                f"Gronwall {self.max_gronwall_excess:.3e}, "
                f"equivalence {self.max_equivalence_violation:.3e}, "
                f"identity {self.max_identity_residual:.3e} (slack {self.slack:.3e})")


def dissipation_dt(r: float, mu: float) -> float:
    """Step fine enough that the difference quotient of E resolves 1e-6 E(0)."""
    return min(default_dt(r, mu), 2e-3 / (1.0 + mu * r * r))


def check_dissipation_inequality(r: float, sym: SymbolSpec, beta: float,
                                 traj: Trajectory, rel_slack: float = 1e-6) -> InequalityReport:
    """Check  dE/dt + 2(1-beta) F <= 0  and the Gronwall bound along ``traj``.

    Differences use the trapezoidal mean of F over each step, so the
    check is second-order accurate in dt.  The energy identity
    dE0/dt = -2 mu r^2 v^2 is tested the same way.
    """
    _check_beta(beta)
    mu = traj.mu
    e0, e, f, _ = _functional_arrays(traj.u, traj.v, r, mu, beta)
    dt = np.diff(traj.t)
    slack = rel_slack * float(e[0])

    de = np.diff(e) / dt
    fmid = 0.5 * (f[1:] + f[:-1])
    dissipation = de + 2.0 * (1.0 - beta) * fmid

    dissipated = mu * r * r * traj.v * traj.v
    identity = np.diff(e0) / dt + (dissipated[1:] + dissipated[:-1])

    m1, m2 = lyapunov_constants(beta)
    c = 2.0 * (1.0 - beta) / (m1 + m2)
    rho = float(key_rho(mu, r))
    gronwall = e - np.exp(-c * rho * traj.t) * e[0]
    equivalence = np.maximum((1.0 - beta) * e0 - e, e - 3.0 * e0)

    return InequalityReport(
        r, beta,
        float(np.max(dissipation, initial=-math.inf)),
        float(np.max(gronwall)),
        float(np.max(equivalence)),
        float(np.max(np.abs(identity), initial=0.0)),
        slack)


# -- kernel versus RK4 -----------------------------------------------------

@dataclass
class OracleRow:
    r: float
    t: float
    regime_confluent: bool
    closed_k0: float
    closed_k1: float
    rk4_k0: float
    rk4_k1: float

    @property
    def error(self) -> float:
        e0 = abs(self.rk4_k0 - self.closed_k0) / (1.0 + abs(self.closed_k0))
        e1 = abs(self.rk4_k1 - self.closed_k1) / (1.0 + abs(self.closed_k1))
        return max(e0, e1)


@dataclass
class OracleReport:
    symbol: str
    rows: list[OracleRow]
    tol: float

    @property
    def max_error(self) -> float:
        return max(row.error for row in self.rows)

    @property
    def ok(self) -> bool:
        return self.max_error <= self.tol

    @property
    def has_confluent(self) -> bool:
        return any(row.regime_confluent for row in self.rows)


def confluent_radius(sym: SymbolSpec, r_max: float = 8.0, grid: int = 4001) -> float | None:
    """Smallest r in (0, r_max] with mu(r) r = 2, or None if unreachable."""
    r = np.linspace(0.0, r_max, grid)
    g = np.asarray(sym(r), dtype=float) * r - 2.0
    crossing = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) <= 0)[0]
    if crossing.size == 0:
        return None
    i = int(crossing[0])
    if g[i] == 0:
        return float(r[i])
    return float(brentq(lambda x: float(sym(x)) * x - 2.0, r[i], r[i + 1], xtol=1e-15, rtol=1e-15))


def oracle_check(sym: SymbolSpec, seed: int = 0, samples: int = 50, tol: float = 1e-6,
                 r_max: float = 8.0, t_max: float = 10.0) -> OracleReport:
    """Compare RK4 against the closed-form kernels at seeded random (r, t).

    A confluent point mu(r) r = 2 is appended whenever one exists in (0, r_max].
    """
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.0, r_max, samples)
    t = rng.uniform(0.0, t_max, samples)
    rc = confluent_radius(sym, r_max)
    if rc is not None:
        r = np.append(r, rc)
        t = np.append(t, rng.uniform(0.0, t_max))
    mu = np.array([eval_mu(sym, float(x)) for x in r])
    mu_k = np.where(r == 0, 0.0, mu)
    k0, k1, _, _ = kernel_arrays_per_point(t, r, mu_k)
    ones, zeros = np.ones_like(r), np.zeros_like(r)
    rk0, _ = rk4_final(r, mu_k, ones, zeros, t)
    rk1, _ = rk4_final(r, mu_k, zeros, ones, t)
    conf = np.abs((mu * r) ** 2 - 4.0) <= CONFLUENT_TOL
    rows = [OracleRow(float(r[i]), float(t[i]), bool(conf[i]), float(k0[i]), float(k1[i]),
                      float(rk0[i]), float(rk1[i])) for i in range(r.size)]
    return OracleReport(sym.label, rows, tol)


def kernel_arrays_per_point(t: np.ndarray, r: np.ndarray, mu: np.ndarray):
    """kernel_arrays with a separate time for each radius."""
    out = [np.empty_like(r) for _ in range(4)]
    for i in range(r.size):
        vals = kernel_arrays(float(t[i]), r[i:i + 1], mu[i:i + 1])
        for k in range(4):
            out[k][i] = vals[k][0]
    return tuple(out)
