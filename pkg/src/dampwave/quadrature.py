"""Radial L2 norms of zone-restricted Fourier-space integrands.

Finite zones use composite 15-point Gauss-Legendre panels whose width is tied
to the oscillation hint, with geometric grading towards r = 0.  The exterior
zone is integrated in u = ln r with adaptive panel bisection, which reaches
truncation radii far beyond the float range when the integrand provides a
log-space evaluator.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DivergentSmallFrequency, NonFiniteIntegrand, TailNotConverged
from .spectral import Zone, ZonePartition
from .symbols import RegularityClass, SymbolSpec, parse_params

GL_ORDER = 15
_GL_X, _GL_W = np.polynomial.legendre.leggauss(GL_ORDER)

TAIL_FRACTION = 1e-8
EXTERIOR_RTOL = 1e-10
ABS_FLOOR = 1e-280
MAX_ACTIVE_PANELS = 100_000
GRADING_LEVELS = 60
LARGE_PROBE_EXPONENT = 40


class ProfileFamily(enum.Enum):
    GAUSSIAN = "Gaussian"
    ALGEBRAIC_TAIL = "AlgebraicTail"
    CONSTANT = "Constant"
    CUSTOM = "Custom"


@dataclass(frozen=True)
class RadialProfile:
    """A radial function of r used as data transform or multiplier.

    ``param`` is the scale (Gaussian), the tail exponent a (AlgebraicTail) or
    the value (Constant).  Custom profiles carry ``func``.
    """

    family: ProfileFamily
    param: float = 1.0
    func: Optional[Callable[[np.ndarray], np.ndarray]] = None

    @classmethod
    def gaussian(cls, scale: float = 1.0) -> "RadialProfile":
        if not scale > 0:
            raise ValueError("Gaussian scale must be positive")
        return cls(ProfileFamily.GAUSSIAN, float(scale))

    @classmethod
    def algebraic_tail(cls, a: float) -> "RadialProfile":
        return cls(ProfileFamily.ALGEBRAIC_TAIL, float(a))

    @classmethod
    def constant(cls, value: float) -> "RadialProfile":
        return cls(ProfileFamily.CONSTANT, float(value))

    @classmethod
    def zero(cls) -> "RadialProfile":
        return cls(ProfileFamily.CONSTANT, 0.0)

    @classmethod
    def custom(cls, func: Callable[[np.ndarray], np.ndarray]) -> "RadialProfile":
        return cls(ProfileFamily.CUSTOM, math.nan, func)

    @property
    def is_zero(self) -> bool:
        return self.family is ProfileFamily.CONSTANT and self.param == 0.0

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        fam = self.family
        if fam is ProfileFamily.GAUSSIAN:
            return np.exp(-np.square(r / self.param))
        if fam is ProfileFamily.ALGEBRAIC_TAIL:
            return np.power(1.0 + r * r, -0.5 * self.param)
        if fam is ProfileFamily.CONSTANT:
            return np.full_like(r, self.param)
        return np.asarray(self.func(r), dtype=float)

    def log_abs(self, u):
        """ln|profile(e^u)|, finite wherever the profile is non-zero."""
        u = np.asarray(u, dtype=float)
        fam = self.family
        with np.errstate(over="ignore", divide="ignore"):
            if fam is ProfileFamily.GAUSSIAN:
                return -np.exp(2.0 * (u - math.log(self.param)))
            if fam is ProfileFamily.ALGEBRAIC_TAIL:
                return -0.5 * self.param * np.logaddexp(0.0, 2.0 * u)
            if fam is ProfileFamily.CONSTANT:
                return np.full_like(u, math.log(abs(self.param)) if self.param else -math.inf)
            return np.log(np.abs(self(np.exp(u))))

    def sign(self, u):
        u = np.asarray(u, dtype=float)
        if self.family is ProfileFamily.CUSTOM:
            with np.errstate(over="ignore"):
                return np.sign(self(np.exp(u)))
        if self.family is ProfileFamily.CONSTANT:
            return np.full_like(u, np.sign(self.param))
        return np.ones_like(u)

    @property
    def l1_bound(self) -> Optional[float]:
        """sup |profile|, the bound an L1 function puts on its transform."""
        if self.family in (ProfileFamily.GAUSSIAN, ProfileFamily.ALGEBRAIC_TAIL):
            return 1.0
        if self.family is ProfileFamily.CONSTANT:
            return abs(self.param)
        return None

    def sobolev_tag(self, n: int) -> Optional[tuple[float, float]]:
        """(sigma_crit, a) for AlgebraicTail: u is in H^sigma iff sigma < sigma_crit."""
        if self.family is not ProfileFamily.ALGEBRAIC_TAIL:
            return None
        return (self.param - 0.5 * n, self.param)


@dataclass(frozen=True)
class NormRequest:
    """One radial L2 norm.

    ``integrand`` maps r to the squared modulus before the r^(n-1) weight.
    ``weighted_log``, when given, maps (u, n) to integrand(e^u) * e^(n u) and
    is used on the exterior zone.  ``ln_r_cap`` overrides ``r_cap`` and may
    exceed ln(float max).  ``panel_scale`` < 1 shrinks finite-zone panels,
    for self-convergence checks.
    """

    integrand: Callable[[np.ndarray], np.ndarray]
    n: int
    zone: Zone = Zone.ALL
    zp: ZonePartition = ZonePartition()
    t_hint: float = 0.0
    r_cap: float = 1e6
    ln_r_cap: Optional[float] = None
    weighted_log: Optional[Callable[[np.ndarray, int], np.ndarray]] = None
    panel_scale: float = 1.0

    def __post_init__(self):
        if self.n < 1 or int(self.n) != self.n:
            raise ValueError(f"dimension must be a positive integer, got {self.n}")
        if self.upper_log() <= math.log(self.zp.bigN):
            raise ValueError("r_cap must exceed the exterior boundary bigN")

    def upper_log(self) -> float:
        return self.ln_r_cap if self.ln_r_cap is not None else math.log(self.r_cap)


def _check_finite(values: np.ndarray, where: str) -> None:
    if not np.all(np.isfinite(values)):
        raise NonFiniteIntegrand(f"non-finite integrand values on the {where}")


def _panel_edges(a: float, b: float, t_hint: float, graded: bool,
                 scale: float = 1.0) -> np.ndarray:
    width = b - a
    h = scale * min(width / 16.0, math.pi / (8.0 * max(t_hint, 1.0)))
    count = int(math.ceil(width / h - 1e-9))
    edges = np.linspace(a, b, count + 1)
    if graded:
        # split the first panel geometrically to resolve power singularities at 0
        first = edges[1]
        inner = first * np.ldexp(1.0, -np.arange(GRADING_LEVELS, 0, -1))
        edges = np.concatenate([[0.0], inner, edges[1:]])
    return edges


def _finite_interval(func, n: int, a: float, b: float, t_hint: float, where: str,
                     scale: float = 1.0) -> float:
    edges = _panel_edges(a, b, t_hint, graded=(a == 0.0), scale=scale)
    nodes, weights = _gl_pairs(edges[:-1], edges[1:])
    flat = nodes.ravel()
    vals = np.asarray(func(flat), dtype=float) * np.power(flat, n - 1)
    _check_finite(vals, where)
    return float(np.sum(vals * weights.ravel()))


def _weighted_log(req: NormRequest, u: np.ndarray) -> np.ndarray:
    if req.weighted_log is not None:
        return np.asarray(req.weighted_log(u, req.n), dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        r = np.exp(u)
        return np.asarray(req.integrand(r), dtype=float) * np.exp(req.n * u)


def _gl_pairs(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mid = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    return mid[:, None] + half[:, None] * _GL_X[None, :], half[:, None] * _GL_W[None, :]


def _panel_sums(req: NormRequest, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    nodes, weights = _gl_pairs(lo, hi)
    vals = _weighted_log(req, nodes.ravel()).reshape(nodes.shape)
    _check_finite(vals, "exterior zone")
    return np.sum(vals * weights, axis=1)


def _exterior(req: NormRequest, max_levels: int = 48) -> float:
    """Adaptive Gauss-Legendre in u = ln r over [ln bigN, ln r_cap]."""
    u0, u1 = math.log(req.zp.bigN), req.upper_log()
    # half-unit panels in ln r, coarser for very long ranges
    count = min(max(16, int(math.ceil((u1 - u0) / 0.5))), 5000)
    edges = np.linspace(u0, u1, count + 1)
    lo, hi = edges[:-1], edges[1:]
    coarse = _panel_sums(req, lo, hi)
    total_width = u1 - u0
    acc_lo, acc_hi, acc_val = [], [], []
    for level in range(max_levels + 1):
        mid = 0.5 * (lo + hi)
        left = _panel_sums(req, lo, mid)
        right = _panel_sums(req, mid, hi)
        fine = left + right
        estimate = sum(float(np.sum(v)) for v in acc_val) + float(np.sum(fine))
        # the absolute floor stops refinement once values reach the subnormal range
        allowed = max(EXTERIOR_RTOL * abs(estimate), ABS_FLOOR) * (hi - lo) / total_width
        done = np.abs(fine - coarse) <= allowed
        if level == max_levels or lo.size > MAX_ACTIVE_PANELS:
            done[:] = True
        acc_lo.append(lo[done])
        acc_hi.append(hi[done])
        acc_val.append(fine[done])
        keep = ~done
        if not keep.any():
            break
        lo = np.concatenate([lo[keep], mid[keep]])
        hi = np.concatenate([mid[keep], hi[keep]])
        coarse = np.concatenate([left[keep], right[keep]])

    lo_all = np.concatenate(acc_lo)
    hi_all = np.concatenate(acc_hi)
    val_all = np.concatenate(acc_val)
    total = float(np.sum(val_all))
    # last decade of radii; panels straddling its start count in full
    tail = float(np.sum(val_all[hi_all > u1 - math.log(10.0)]))
    if total > 0 and tail > TAIL_FRACTION * total:
        raise TailNotConverged(
            f"last decade below r_cap holds {tail / total:.3e} of the integral")
    return total


def zone_integral(req: NormRequest) -> float:
    """The squared norm: integral of integrand * r^(n-1) over the zone."""
    zp = req.zp
    total = 0.0
    if req.zone in (Zone.INTERIOR, Zone.ALL):
        total += _finite_interval(req.integrand, req.n, 0.0, zp.eps, req.t_hint,
                                  "interior zone", req.panel_scale)
    if req.zone in (Zone.BOUNDED, Zone.ALL):
        total += _finite_interval(req.integrand, req.n, zp.eps, zp.bigN, req.t_hint,
                                  "bounded zone", req.panel_scale)
    if req.zone in (Zone.EXTERIOR, Zone.ALL):
        total += _exterior(req)
    return total


def radial_l2(req: NormRequest) -> float:
    """sqrt of the integral of integrand(r) r^(n-1) over the requested zone.

    The surface-measure constant of the unit sphere is omitted.
    """
    return math.sqrt(max(zone_integral(req), 0.0))


def integrate_interval(func: Callable[[np.ndarray], np.ndarray], a: float, b: float,
                       n: int = 1, t_hint: float = 0.0) -> float:
    """Panel rule on [a, b] with weight r^(n-1); used for self-checks."""
    return _finite_interval(func, n, a, b, t_hint, "interval")


def multiplier_small_norm(sym: SymbolSpec, n: int, s: float, c: float, t: float,
                          zp: ZonePartition = ZonePartition()) -> float:
    """Interior norm of r^s exp(-c r^2 mu(r) t)."""
    if s <= -0.5 * n:
        raise DivergentSmallFrequency(f"r^(2s+n-1) is not integrable at 0 for s={s}, n={n}")
    if not c > 0:
        raise ValueError("c must be positive")

    def integrand(r):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.power(r, 2.0 * s) * np.exp(-2.0 * c * r * r * sym(r) * t)

    return radial_l2(NormRequest(integrand, n, Zone.INTERIOR, zp))


def multiplier_large_factor(sym: SymbolSpec, ell: float, c: float, t: float,
                            zp: ZonePartition = ZonePartition(), points: int = 8001) -> float:
    """sup over the exterior probe grid of mu^(-ell) exp(-c t / mu).

    Finite-class symbols give the envelope exp(-c t / sup mu) instead.
    """
    if ell < 0 or not c > 0 or t < 0:
        raise ValueError("need ell >= 0, c > 0, t >= 0")
    r = np.geomspace(zp.bigN, 2.0 ** LARGE_PROBE_EXPONENT, points)
    mu = np.asarray(sym(r), dtype=float)
    if sym.regularity_class is RegularityClass.FINITE:
        return math.exp(-c * t / float(np.max(mu)))
    with np.errstate(divide="ignore", over="ignore"):
        vals = np.power(mu, -ell) * np.exp(-c * t / mu)
    return float(np.max(vals))


_PROFILE_BUILDERS = {
    "gaussian": lambda p: RadialProfile.gaussian(p.get("scale", 1.0)),
    "algebraic": lambda p: RadialProfile.algebraic_tail(p["a"]),
    "constant": lambda p: RadialProfile.constant(p.get("value", 1.0)),
    "zero": lambda p: RadialProfile.zero(),
}


def parse_profile(text: str) -> RadialProfile:
    """Build a data profile from 'gaussian:scale=1', 'algebraic:a=2.5',
    'constant:value=1' or 'zero'."""
    name, _, args = text.strip().partition(":")
    try:
        builder = _PROFILE_BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown profile {name!r}; supported: {', '.join(_PROFILE_BUILDERS)}") \
            from None
    return builder(parse_params(args))


def profile_label(p: RadialProfile) -> str:
    if p.family is ProfileFamily.GAUSSIAN:
        return f"gaussian:scale={p.param!r}"
    if p.family is ProfileFamily.ALGEBRAIC_TAIL:
        return f"algebraic:a={p.param!r}"
    if p.family is ProfileFamily.CONSTANT:
        return "zero" if p.param == 0 else f"constant:value={p.param!r}"
    return "custom"
