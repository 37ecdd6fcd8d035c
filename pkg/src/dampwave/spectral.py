"""Per-frequency solution of  u_tt + mu(r) r^2 u_t + r^2 u = 0.

All array routines take the radius ``r`` and the symbol value ``mu`` at that
radius separately, so callers can feed radii past the float range (``r=inf``)
with a finite mu obtained from the symbol's log-frequency evaluator.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ProfileSingularityError
from .symbols import SymbolSpec, eval_mu

CONFLUENT_TOL = 1e-6


class Regime(enum.Enum):
    OSCILLATORY = "Oscillatory"
    CONFLUENT = "Confluent"
    OVERDAMPED = "Overdamped"


class Zone(enum.Enum):
    INTERIOR = "Interior"
    BOUNDED = "Bounded"
    EXTERIOR = "Exterior"
    ALL = "All"


@dataclass(frozen=True)
class ZonePartition:
    eps: float = 0.5
    bigN: float = 2.0

    def __post_init__(self):
        if not 0 < self.eps < self.bigN:
            raise ValueError(f"need 0 < eps < bigN, got eps={self.eps}, bigN={self.bigN}")


def zone_of(r: float, zp: ZonePartition = ZonePartition()) -> Zone:
    if r <= zp.eps:
        return Zone.INTERIOR
    if r < zp.bigN:
        return Zone.BOUNDED
    return Zone.EXTERIOR


def zone_mask(r: np.ndarray, zone: Zone, zp: ZonePartition) -> np.ndarray:
    if zone is Zone.INTERIOR:
        return r <= zp.eps
    if zone is Zone.BOUNDED:
        return (r > zp.eps) & (r < zp.bigN)
    if zone is Zone.EXTERIOR:
        return r >= zp.bigN
    return np.ones_like(r, dtype=bool)


@dataclass(frozen=True)
class CharRoots:
    lambda_plus: complex
    lambda_minus: complex
    regime: Regime
    discriminant: float


def discriminant(mu_val, r):
    """mu^2 r^2 - 4; its sign fixes the root regime."""
    return (mu_val * r) ** 2 - 4.0


def char_roots(mu_val: float, r: float) -> CharRoots:
    """Roots of  lambda^2 + mu r^2 lambda + r^2 = 0."""
    if not r > 0:
        raise ValueError("char_roots needs r > 0")
    d = discriminant(mu_val, r)
    a = 0.5 * mu_val * r * r
    if d < -CONFLUENT_TOL:
        w = 0.5 * r * math.sqrt(-d)
        return CharRoots(complex(-a, w), complex(-a, -w), Regime.OSCILLATORY, d)
    if d > CONFLUENT_TOL:
        # the larger-magnitude root first, the other from the product r^2
        s = math.sqrt(mu_val * mu_val - 4.0 / (r * r))
        lam_minus = -0.5 * r * r * (mu_val + s)
        lam_plus = -2.0 / (mu_val + s)
        return CharRoots(complex(lam_plus), complex(lam_minus), Regime.OVERDAMPED, d)
    return CharRoots(complex(-a), complex(-a), Regime.CONFLUENT, d)


def key_rho(mu_val, r):
    """rho = r^2 mu / (1 + r^2 mu^2), the per-mode energy decay rate."""
    r2mu = np.multiply(np.square(r), mu_val)
    return r2mu / (1.0 + r2mu * mu_val)


def kernel_arrays(t: float, r, mu) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return (k0, k1, dk0/dt, dk1/dt) for arrays of radii and symbol values.

    k0 solves the mode ODE with (u, u_t)(0) = (1, 0), k1 with (0, 1).  Each
    regime uses a real, cancellation-free form; r = inf is allowed.
    """
    r = np.asarray(r, dtype=float)
    mu = np.broadcast_to(np.asarray(mu, dtype=float), r.shape)
    if t == 0:
        # initial data; avoids inf * 0 at r = inf
        return np.ones_like(r), np.zeros_like(r), np.zeros_like(r), np.ones_like(r)
    k0 = np.empty_like(r)
    k1 = np.empty_like(r)
    dk0 = np.empty_like(r)
    dk1 = np.empty_like(r)

    with np.errstate(all="ignore"):
        d = (mu * r) ** 2 - 4.0
        zero = r == 0
        osc = ~zero & (d < -CONFLUENT_TOL)
        over = ~zero & (d > CONFLUENT_TOL)
        conf = ~zero & ~osc & ~over

        k0[zero], k1[zero], dk0[zero], dk1[zero] = 1.0, t, 0.0, 1.0

        if osc.any():
            ro, mo = r[osc], mu[osc]
            a = 0.5 * mo * ro * ro
            w = 0.5 * ro * np.sqrt(-d[osc])
            damp = np.exp(-a * t)
            c = np.cos(w * t)
            sinc_t = t * np.sinc(w * t / np.pi)  # sin(w t)/w, finite as w -> 0
            k0[osc] = damp * (c + a * sinc_t)
            k1[osc] = damp * sinc_t
            dk0[osc] = -ro * ro * k1[osc]
            dk1[osc] = k0[osc] - mo * ro * ro * k1[osc]

        if over.any():
            ro, mo = r[over], mu[over]
            s = np.sqrt(mo * mo - 4.0 / (ro * ro))
            lam_p = -2.0 / (mo + s)
            gap = ro * ro * s  # lambda_+ - lambda_-
            slow = np.exp(lam_p * t)
            frac = -np.expm1(-gap * t)  # 1 - e^{-gap t}
            k1o = slow * frac / gap
            k1[over] = k1o
            k0[over] = slow - lam_p * k1o
            # r^2 k1 and lambda_- k1 rewritten to stay finite at r = inf
            dk0[over] = -slow * frac / s
            mu_over_s = 1.0 / np.sqrt(1.0 - 4.0 / (mo * ro) ** 2)  # finite when mu = inf
            dk1[over] = slow * (1.0 - 0.5 * (1.0 + mu_over_s) * frac)

        if conf.any():
            ro, mo = r[conf], mu[conf]
            lam = -0.5 * mo * ro * ro
            e = np.exp(lam * t)
            k0[conf] = e * (1.0 - lam * t)
            k1[conf] = t * e
            dk0[conf] = -ro * ro * k1[conf]
            dk1[conf] = k0[conf] - mo * ro * ro * k1[conf]

    return k0, k1, dk0, dk1


def profile_arrays(t: float, r, mu) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Return (g0, g1, h0, h1); g1 is NaN where r = 0 or mu = 0."""
    r = np.asarray(r, dtype=float)
    mu = np.broadcast_to(np.asarray(mu, dtype=float), r.shape)
    with np.errstate(all="ignore"):
        g0 = np.exp(-t / mu) if t > 0 else np.ones_like(r)
        g1 = np.where((r == 0) | (mu == 0), np.nan, g0 / (mu * r * r))
        damp = np.exp(-0.5 * mu * r * r * t)
        h0 = np.cos(r * t) * damp
        h1 = t * np.sinc(r * t / np.pi) * damp
    return g0, g1, h0, h1


@dataclass(frozen=True)
class KernelValue:
    t: float
    r: float
    mu: float
    k0: float
    k1: float
    g0: float
    h0: float
    h1: float
    _g1: float

    @property
    def g1(self) -> float:
        if self.r == 0 or self.mu == 0:
            raise ProfileSingularityError(
                f"g1 undefined at r={self.r}, mu={self.mu}; it is an exterior-zone profile")
        return self._g1


def kernels(t: float, r: float, sym: SymbolSpec) -> KernelValue:
    if t < 0 or r < 0:
        raise ValueError("kernels need t >= 0 and r >= 0")
    mu = eval_mu(sym, r)
    k0, k1, _, _ = kernel_arrays(t, np.array([r]), np.array([mu]))
    g0, g1, h0, h1 = profile_arrays(t, np.array([r]), np.array([mu]))
    return KernelValue(t, r, mu, float(k0[0]), float(k1[0]), float(g0[0]),
                       float(h0[0]), float(h1[0]), float(g1[0]))


def fourier_solution(t: float, r: float, sym: SymbolSpec, u0hat, u1hat) -> float:
    kv = kernels(t, r, sym)
    return kv.k0 * float(u0hat(r)) + kv.k1 * float(u1hat(r))
