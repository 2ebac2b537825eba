"""
The glued counterexample u and its potential V on R^2 minus the origin.

Points are (t, theta) with t = log r. Each annulus k in [k0, k_max - 1] is cut
into six bands by the radii log rho_{k,j}; on each band u is one closed form
interpolating between the homogeneous spinors E_k and E_{k+1}:

    Band 0    E_k
    Band 1    r^{phi/2} E_k
    Band 2    r^{1/2} E_k + phi r^{-1/2} E_{k+1}
    Band 3    phi~ r^{1/2} E_k + r^{-1/2} E_{k+1}
    Band 4    r^{phi~~/2} E_{k+1}
    Band 5    E_{k+1}
    Outer     eta E_{k0}, zero for r >= 1

E_k is (0, conj(z)^k) for even k and (z^k, 0) for odd k.

Values are produced in factored form (LocalSpinor): each component is
exp(frame) times an O(1) mantissa function of the offsets (tau, sigma) from the
centre point. Offsets are never added to t in floating point, which keeps
finite differences meaningful when |t| is around 1e29.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional

from src.verifier.errors import ConfigurationError, RangeError
from src.verifier.extrange import (
    CZERO,
    ExtComplex,
    ExtReal,
    normalize_arg,
    xc_conj,
    xc_from_complex,
    xc_from_scaled,
    xc_norm,
    xc_pow_int,
)
from src.verifier.mollifier import CutoffProfile, chi, chi_prime, chi_second, select_delta
from src.verifier.radii import (
    RadiiSchedule,
    band_constants,
    k0_conditions,
    log_rho,
    select_k0,
    select_k0_fallback,
)

UPPER, LOWER = 0, 1
BANDS_PER_ANNULUS = 6
# below this cutoff-argument increment the Taylor form replaces the direct difference
TAYLOR_THRESHOLD = 1e-6


def component_of(k: int) -> int:
    """Index of the non-zero component of E_k."""
    return LOWER if k % 2 == 0 else UPPER


def phase_sign(c: int) -> int:
    """+1 for the upper component (z^m), -1 for the lower one (conj(z)^m)."""
    return 1 if c == UPPER else -1


# ----------------------------------------------------------------- value types

@dataclass(frozen=True)
class PolarPoint:
    t: float
    theta: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.t):
            raise RangeError(f"log radius must be finite, got {self.t!r}")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "theta", normalize_arg(float(self.theta)))

    @property
    def z(self) -> ExtComplex:
        return ExtComplex(self.t, self.theta)

    def inverted(self) -> PolarPoint:
        """x / |x|^2: exact in log radius."""
        return PolarPoint(-self.t, self.theta)


@dataclass(frozen=True, order=True)
class Region:
    """Outer (k = j = -1) or Band(k, j)."""

    k: int = -1
    j: int = -1

    @classmethod
    def outer(cls) -> Region:
        return cls(-1, -1)

    @classmethod
    def band(cls, k: int, j: int) -> Region:
        if not 0 <= j < BANDS_PER_ANNULUS:
            raise RangeError(f"band index must lie in [0, 5], got {j}")
        return cls(k, j)

    @property
    def is_outer(self) -> bool:
        return self.k < 0

    @property
    def label(self) -> str:
        return "Outer" if self.is_outer else f"Band({self.k},{self.j})"

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class SpinorValue:
    upper: ExtComplex = CZERO
    lower: ExtComplex = CZERO

    @property
    def components(self) -> tuple[ExtComplex, ExtComplex]:
        return self.upper, self.lower

    @property
    def is_zero(self) -> bool:
        return self.upper.zero and self.lower.zero

    def norm(self) -> ExtReal:
        return xc_norm(self.components)


U_AT_ORIGIN = SpinorValue()


@dataclass(frozen=True)
class PotentialValue:
    """2x2 matrix whose true entries are entries * exp(scale_logmag)."""

    entries: tuple[tuple[ExtComplex, ExtComplex], tuple[ExtComplex, ExtComplex]]
    scale_logmag: float = 0.0

    @classmethod
    def zero(cls, scale_logmag: float = 0.0) -> PotentialValue:
        return cls(((CZERO, CZERO), (CZERO, CZERO)), scale_logmag)

    def entry(self, i: int, j: int) -> ExtComplex:
        return self.entries[i][j]

    @property
    def is_zero(self) -> bool:
        return all(e.zero for row in self.entries for e in row)

    def times_radius(self, t: float) -> PotentialValue:
        return PotentialValue(self.entries, self.scale_logmag + t)

    def scaled_entry(self, i: int, j: int) -> complex:
        """Entry as a plain complex number relative to exp(scale_logmag)."""
        e = self.entries[i][j]
        return 0j if e.zero else cmath.rect(math.exp(e.logmag), e.arg)


# ------------------------------------------------------------ factored fields

Mantissa = Callable[[float, float], complex]


@dataclass(frozen=True)
class LocalComponent:
    frame: float  # component = exp(frame) * mantissa(tau, sigma)
    mantissa: Mantissa

    def value(self) -> ExtComplex:
        return xc_from_scaled(self.mantissa(0.0, 0.0), self.frame)


@dataclass(frozen=True)
class LocalSpinor:
    center: PolarPoint
    upper: Optional[LocalComponent] = None
    lower: Optional[LocalComponent] = None

    def component(self, c: int) -> Optional[LocalComponent]:
        return self.upper if c == UPPER else self.lower

    def value(self) -> SpinorValue:
        return SpinorValue(
            self.upper.value() if self.upper else CZERO,
            self.lower.value() if self.lower else CZERO,
        )


FieldEvaluator = Callable[[PolarPoint], LocalSpinor]


def _component(p: PolarPoint, m: int, alpha: float, radial: Callable[[float], float]) -> tuple[int, LocalComponent]:
    c = component_of(m)
    s = phase_sign(c)
    t0, theta0 = p.t, p.theta

    def mantissa(tau: float, sigma: float) -> complex:
        return radial(tau) * math.exp(m * tau) * cmath.exp(1j * s * m * (theta0 + sigma))

    return c, LocalComponent((alpha + m) * t0, mantissa)


def _spinor(p: PolarPoint, *parts: tuple[int, LocalComponent]) -> LocalSpinor:
    comps: dict[int, LocalComponent] = {}
    for c, comp in parts:
        if c in comps:
            raise RangeError("two radial factors on one component")
        comps[c] = comp
    return LocalSpinor(p, comps.get(UPPER), comps.get(LOWER))


def bigE(k: int, p: PolarPoint) -> SpinorValue:
    z = p.z
    if component_of(k) == UPPER:
        return SpinorValue(xc_pow_int(z, k), CZERO)
    return SpinorValue(CZERO, xc_pow_int(xc_conj(z), k))


def bigE_field(k: int) -> FieldEvaluator:
    return lambda p: _spinor(p, _component(p, k, 0.0, _unit(0.0)))


def plain_field(fn: Callable[[float, float], tuple[complex, complex]]) -> FieldEvaluator:
    """Wrap an ordinary double-valued field fn(t, theta) -> (upper, lower)."""

    def evaluate(p: PolarPoint) -> LocalSpinor:
        t0, theta0 = p.t, p.theta
        return LocalSpinor(
            p,
            LocalComponent(0.0, lambda tau, sigma: complex(fn(t0 + tau, theta0 + sigma)[UPPER])),
            LocalComponent(0.0, lambda tau, sigma: complex(fn(t0 + tau, theta0 + sigma)[LOWER])),
        )

    return evaluate


# --------------------------------------------------------------- the profiles

@dataclass(frozen=True)
class CutoffMap:
    """
    A band profile chi(s(t)) + shift.

    affine:     s = a (t - b)
    reciprocal: s = a (1 - b / t)
    """

    cutoff: CutoffProfile
    kind: str
    a: float
    b: float
    shift: float = 0.0

    def argument(self, t: float) -> float:
        if self.kind == "affine":
            return self.a * (t - self.b)
        return self.a * (1.0 - self.b / t)

    def argument_increment(self, t0: float, tau: float) -> float:
        if self.kind == "affine":
            return self.a * tau
        return self.a * self.b * tau / (t0 * (t0 + tau))

    def value(self, t0: float) -> float:
        return chi(self.cutoff, self.argument(t0)) + self.shift

    def increment(self, t0: float, tau: float) -> float:
        """value(t0 + tau) - value(t0) without forming t0 + tau for the cutoff argument."""
        if tau == 0.0:
            return 0.0
        s0 = self.argument(t0)
        ds = self.argument_increment(t0, tau)
        if abs(ds) > TAYLOR_THRESHOLD:
            return chi(self.cutoff, s0 + ds) - chi(self.cutoff, s0)
        return chi_prime(self.cutoff, s0) * ds + 0.5 * chi_second(self.cutoff, s0) * ds * ds

    def dvalue_dt(self, t0: float) -> float:
        slope = chi_prime(self.cutoff, self.argument(t0))
        if self.kind == "affine":
            return slope * self.a
        return slope * self.a * self.b / (t0 * t0)

    def t_dvalue_dt(self, t0: float) -> float:
        """t * d/dt of the profile; O(1) even where t is huge."""
        slope = chi_prime(self.cutoff, self.argument(t0))
        if self.kind == "affine":
            return slope * self.a * t0
        return slope * self.a * self.b / t0


def _unit(c: float) -> Callable[[float], float]:
    return lambda tau: math.exp(c * tau)


def _scaled(profile: CutoffMap, t0: float, c: float) -> Callable[[float], float]:
    mu0 = profile.value(t0)
    return lambda tau: (mu0 + profile.increment(t0, tau)) * math.exp(c * tau)


def _power(profile: CutoffMap, t0: float) -> Callable[[float], float]:
    # exp(f(t) t / 2) relative to exp(f0 t0 / 2), with f(t0 + tau) = f0 + df
    f0 = profile.value(t0)
    return lambda tau: math.exp(0.5 * (f0 * tau + profile.increment(t0, tau) * (t0 + tau)))


# ------------------------------------------------------------- configuration

@dataclass(frozen=True)
class CounterexampleConfig:
    epsilon: float
    delta: float
    cutoff: CutoffProfile
    schedule: RadiiSchedule
    k0: int
    k0_admissible: bool = True
    k0_forced: bool = False

    @property
    def preset(self) -> str:
        return self.schedule.preset

    @property
    def bound(self) -> float:
        return 0.5 + self.epsilon

    @property
    def annuli(self) -> range:
        return range(self.k0, self.schedule.k_max)

    def parameters(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "delta": self.delta,
            "k0": self.k0,
            "k0_admissible": self.k0_admissible,
            "preset": self.schedule.preset,
            "k_max": self.schedule.k_max,
        }

    def profile(self, region: Region) -> Optional[CutoffMap]:
        """The cutoff profile carried by a region, if any."""
        s = self.schedule
        if region.is_outer:
            return CutoffMap(self.cutoff, "affine", 1.0 / log_rho(s, self.k0, 0), 0.0)
        k, j = region.k, region.j
        if j == 1:
            return CutoffMap(self.cutoff, "reciprocal", band_constants(s, k).c_k, log_rho(s, k, 1))
        if j == 2:
            l2, l3 = log_rho(s, k, 2), log_rho(s, k, 3)
            return CutoffMap(self.cutoff, "affine", -1.0 / (l2 - l3), l2)
        if j == 3:
            l3, l4 = log_rho(s, k, 3), log_rho(s, k, 4)
            return CutoffMap(self.cutoff, "affine", 1.0 / (l3 - l4), l4)
        if j == 4:
            return CutoffMap(
                self.cutoff, "reciprocal", band_constants(s, k).c_tilde_k, log_rho(s, k, 4), shift=-1.0
            )
        return None


def build_counterexample(
    epsilon: float,
    delta: float | None = None,
    preset: str = "paper",
    k_max: int | None = None,
    k0: int | None = None,
) -> CounterexampleConfig:
    """
    Assemble the construction for a potential budget 1/2 + epsilon.

    Args:
        epsilon: Excess over the critical constant.
        delta: Cutoff parameter; chosen by select_delta when omitted.
        preset: Radii schedule, "paper" or "mild".
        k_max: Largest annulus index of the schedule.
        k0: Force the first annulus (no admissibility scan, parity kept).

    Returns:
        CounterexampleConfig: Immutable configuration shared by every evaluator.
    """
    if delta is None:
        delta = select_delta(epsilon)
    elif not (0.0 < delta < 0.25) or delta * delta + delta > epsilon:
        raise ConfigurationError(
            f"delta={delta!r} must satisfy 0 < delta < 1/4 and delta^2 + delta <= epsilon={epsilon!r}"
        )
    cutoff = CutoffProfile(delta)
    schedule = RadiiSchedule(preset, k_max)

    if k0 is not None:
        if not 1 <= k0 <= schedule.k_max - 1:
            raise ConfigurationError(f"k0 must lie in [1, {schedule.k_max - 1}], got {k0}")
        admissible = all(k0_conditions(schedule, k, delta).all_hold for k in range(k0, schedule.k_max + 1))
        return CounterexampleConfig(epsilon, delta, cutoff, schedule, k0, admissible, k0_forced=True)

    admissible = True
    try:
        chosen = select_k0(schedule, delta)
    except ConfigurationError:
        if preset != "mild":
            raise
        chosen = select_k0_fallback(schedule, delta)
        admissible = False
    if chosen % 2 == 1:
        chosen += 1
    if chosen > schedule.k_max - 1:
        raise ConfigurationError(
            f"k0={chosen} leaves no annulus below k_max={schedule.k_max}; increase k_max"
        )
    return CounterexampleConfig(epsilon, delta, cutoff, schedule, chosen, admissible)


# ------------------------------------------------------------ classification

def classify(s: RadiiSchedule, k0: int, t: float) -> Region:
    """Region containing t; a boundary t = log rho_{k,j} belongs to the band of smaller j."""
    if not math.isfinite(t):
        raise RangeError(f"log radius must be finite, got {t!r}")
    if t >= log_rho(s, k0, 0):
        return Region.outer()
    if t < log_rho(s, s.k_max, 0):
        raise RangeError(f"t={t!r} lies below log rho_{s.k_max}; increase k_max")
    k = k0
    while t < log_rho(s, k + 1, 0):
        k += 1
    j = 0
    while t < log_rho(s, k, j + 1):
        j += 1
    return Region.band(k, j)


# ---------------------------------------------------------------- evaluation

def local_u_in(cfg: CounterexampleConfig, region: Region, p: PolarPoint) -> LocalSpinor:
    """Factored u around p using the formula of `region`, whatever region p lies in."""
    t0 = p.t
    if region.is_outer:
        eta = cfg.profile(region)
        return _spinor(p, _component(p, cfg.k0, 0.0, _scaled(eta, t0, 0.0)))

    k, j = region.k, region.j
    profile = cfg.profile(region)
    if j == 0:
        return _spinor(p, _component(p, k, 0.0, _unit(0.0)))
    if j == 1:
        return _spinor(p, _component(p, k, 0.5 * profile.value(t0), _power(profile, t0)))
    if j == 2:
        return _spinor(
            p,
            _component(p, k, 0.5, _unit(0.5)),
            _component(p, k + 1, -0.5, _scaled(profile, t0, -0.5)),
        )
    if j == 3:
        return _spinor(
            p,
            _component(p, k, 0.5, _scaled(profile, t0, 0.5)),
            _component(p, k + 1, -0.5, _unit(-0.5)),
        )
    if j == 4:
        return _spinor(p, _component(p, k + 1, 0.5 * profile.value(t0), _power(profile, t0)))
    return _spinor(p, _component(p, k + 1, 0.0, _unit(0.0)))


def local_u(cfg: CounterexampleConfig, p: PolarPoint) -> LocalSpinor:
    return local_u_in(cfg, classify(cfg.schedule, cfg.k0, p.t), p)


def counterexample_field(cfg: CounterexampleConfig, region: Region | None = None) -> FieldEvaluator:
    if region is None:
        return lambda p: local_u(cfg, p)
    return lambda p: local_u_in(cfg, region, p)


def eval_u_in(cfg: CounterexampleConfig, region: Region, p: PolarPoint) -> SpinorValue:
    return local_u_in(cfg, region, p).value()


def eval_u(cfg: CounterexampleConfig, p: PolarPoint) -> SpinorValue:
    return local_u(cfg, p).value()


def _phase(theta: float, winding: float) -> complex:
    return cmath.exp(1j * winding * theta)


def eval_V_in(cfg: CounterexampleConfig, region: Region, p: PolarPoint) -> PotentialValue:
    """
    The potential of `region` at p, as r*V with scale exp(-t).

    Entries are derived from D u = V u for the region's closed form, with D in
    log-polar coordinates; a and b index the components of E_k and E_{k+1}.
    """
    t0, theta = p.t, p.theta
    m = [[0j, 0j], [0j, 0j]]

    if region.is_outer:
        a0 = component_of(cfg.k0)
        eta = cfg.profile(region)
        m[1 - a0][a0] = -1j * _phase(theta, phase_sign(a0)) * eta.dvalue_dt(t0)
    else:
        k, j = region.k, region.j
        a = component_of(k)
        b = 1 - a
        sa, sb = phase_sign(a), phase_sign(b)
        profile = cfg.profile(region)
        if j == 1:
            m[b][a] = -1j * _phase(theta, sa) * 0.5 * (profile.value(t0) + profile.t_dvalue_dt(t0))
        elif j == 2:
            m[b][a] = -0.5j * _phase(theta, sa)
            m[a][b] = 0.5j * _phase(theta, sb)
            m[a][a] = -1j * profile.dvalue_dt(t0) * _phase(theta, sb * (2 * k + 2))
        elif j == 3:
            m[b][a] = -0.5j * _phase(theta, sa)
            m[a][b] = 0.5j * _phase(theta, sb)
            m[b][b] = -1j * profile.dvalue_dt(t0) * _phase(theta, sa * (2 * k + 2))
        elif j == 4:
            m[a][b] = -1j * _phase(theta, sb) * 0.5 * (profile.value(t0) + profile.t_dvalue_dt(t0))

    entries = tuple(tuple(xc_from_complex(v) for v in row) for row in m)
    return PotentialValue(entries, -t0)


def eval_V(cfg: CounterexampleConfig, p: PolarPoint) -> PotentialValue:
    return eval_V_in(cfg, classify(cfg.schedule, cfg.k0, p.t), p)


def region_limits(cfg: CounterexampleConfig, region: Region) -> tuple[float, float]:
    """(lower, upper) log radius of a region; the outer region is unbounded above."""
    s = cfg.schedule
    if region.is_outer:
        return log_rho(s, cfg.k0, 0), math.inf
    return log_rho(s, region.k, region.j + 1), log_rho(s, region.k, region.j)
