"""
Smooth cutoff chi_delta used by every band profile.

The base ramp has slope exactly 1 + delta on [a, 1 - a], with a = delta/(2(1+delta)),
so that (1+delta)(s - a) = (1+delta)s - delta/2. It is convolved with the standard
bump exp(-1/(1-y^2)) rescaled to radius a/4. Away from the two corners of the ramp
the convolution is the ramp itself; inside a corner it is a one-dimensional integral
over the bump, evaluated with scipy's adaptive quadrature.

Properties (all checked by the test suite):
- chi = 0 for s <= 0, chi = 1 for s >= 1, 0 <= chi <= 1 in between
- chi' >= 0, supported in [0, 1], with sup chi' = chi'(1/2) = 1 + delta
- chi(1/2) = 1/2, chi(s) <= s on [0, 1/2], chi(s) <= (1+delta)s - delta/2 on [1/2, 1]
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

from scipy.integrate import quad

from src.verifier.errors import ConfigurationError, NumericalError

QUAD_EPSABS = 1e-14
QUAD_EPSREL = 1e-13
DELTA_CAP = 0.24
CORNER_CACHE_SIZE = 4096


def bump(y: float) -> float:
    """Unnormalized bump exp(-1/(1-y^2)) on (-1, 1), zero outside."""
    if abs(y) >= 1.0:
        return 0.0
    return math.exp(-1.0 / (1.0 - y * y))


def _integrate(fn, lo: float, hi: float) -> float:
    result = quad(fn, lo, hi, epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200, full_output=1)
    # quad appends a message only when it could not meet the tolerance
    if len(result) > 3:
        raise NumericalError(f"bump quadrature on [{lo}, {hi}] did not converge: {result[3]}", residual=result[1])
    return result[0]


BUMP_MASS = _integrate(bump, -1.0, 1.0)


@lru_cache(maxsize=CORNER_CACHE_SIZE)
def corner_moments(y_star: float) -> tuple[float, float]:
    """(int_{-1}^{y*} bump/M, int_{-1}^{y*} y bump/M) for y* in (-1, 1), M the bump mass."""
    p0 = _integrate(bump, -1.0, y_star) / BUMP_MASS
    p1 = _integrate(lambda y: y * bump(y), -1.0, y_star) / BUMP_MASS
    return p0, p1


def select_delta(epsilon: float) -> float:
    """
    Pick the cutoff parameter delta for a potential budget 1/2 + epsilon.

    Args:
        epsilon: Excess over the critical constant 1/2; must be positive.

    Returns:
        float: delta = min(0.24, 0.99 * (sqrt(1 + 4 epsilon) - 1) / 2), so that
        delta^2 + delta < epsilon and delta < 1/4.
    """
    if not (isinstance(epsilon, (int, float)) and math.isfinite(epsilon) and epsilon > 0):
        raise ConfigurationError(f"epsilon must be a positive finite number, got {epsilon!r}")
    return min(DELTA_CAP, 0.99 * (math.sqrt(1.0 + 4.0 * epsilon) - 1.0) / 2.0)


@dataclass(frozen=True)
class CutoffProfile:
    """
    The cutoff chi_delta and its first two derivatives.

    Immutable after construction. Corner integrals depend only on the rescaled
    corner coordinate and are shared by every profile through corner_moments.
    """

    delta: float
    plateau: float = field(init=False)
    bump_radius: float = field(init=False)
    mass: float = field(init=False, default=BUMP_MASS)

    def __post_init__(self):
        if not (isinstance(self.delta, (int, float)) and 0.0 < self.delta < 0.25):
            raise ConfigurationError(f"delta must lie in (0, 1/4), got {self.delta!r}")
        a = self.delta / (2.0 * (1.0 + self.delta))
        object.__setattr__(self, "plateau", a)
        object.__setattr__(self, "bump_radius", a / 4.0)

    @property
    def slope(self) -> float:
        return 1.0 + self.delta


def _lower_corner_value(p: CutoffProfile, s: float) -> float:
    a, d = p.plateau, p.bump_radius
    y_star = (s - a) / d
    p0, p1 = corner_moments(y_star)
    return p.slope * ((s - a) * p0 - d * p1)


def chi(p: CutoffProfile, s: float) -> float:
    a, d = p.plateau, p.bump_radius
    if s <= a - d:
        return 0.0
    if s >= 1.0 - a + d:
        return 1.0
    if a + d <= s <= 1.0 - a - d:
        return p.slope * (s - a)
    if s < 0.5:
        return _lower_corner_value(p, s)
    # the ramp is symmetric about (1/2, 1/2) and the bump is even
    return 1.0 - _lower_corner_value(p, 1.0 - s)


def chi_prime(p: CutoffProfile, s: float) -> float:
    a, d = p.plateau, p.bump_radius
    if s > 0.5:
        s = 1.0 - s
    if s <= a - d:
        return 0.0
    if s >= a + d:
        return p.slope
    p0, _ = corner_moments((s - a) / d)
    return p.slope * p0


def chi_second(p: CutoffProfile, s: float) -> float:
    """Closed form (1+delta)[psi(s - a) - psi(s - 1 + a)], psi the rescaled normalized bump."""
    a, d = p.plateau, p.bump_radius

    def psi(x: float) -> float:
        return bump(x / d) / (p.mass * d)

    return p.slope * (psi(s - a) - psi(s - 1.0 + a))
