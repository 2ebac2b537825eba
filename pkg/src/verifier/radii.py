"""
Radii schedule log rho_{k,j}, the band constants c_k and c~_k, and the choice of k0.

Two presets:
    paper: log rho_{k,j} = -exp((k + j/6)^2)
    mild:  log rho_{k,j} = -2^(k + j/6)

Only logs of radii are ever stored; rho_3 = exp(-exp(9)) is not a double.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from src.verifier.errors import ConfigurationError, RangeError

PRESETS = ("paper", "mild")
DEFAULT_K_MAX = 12
# k * |log rho_{k+1}| stays finite as a double up to here
K_MAX_LIMIT = {"paper": 25, "mild": 200}
SUBDIVISIONS = 6


def _log_radius(preset: str, x: float) -> float:
    if preset == "paper":
        return -math.exp(x * x)
    return -math.pow(2.0, x)


@dataclass(frozen=True)
class BandConstants:
    c_k: float
    c_tilde_k: float


@dataclass(frozen=True)
class K0Conditions:
    """The five inequalities that make the bands of annulus k respect the potential budget."""

    k: int
    c_bound: bool  # (a) c_k <= 1 + delta
    band2_slope: bool  # (b) 1/(log rho_{k,2} - log rho_{k,3}) <= delta
    band3_slope: bool  # (c) 1/(log rho_{k,3} - log rho_{k,4}) <= delta
    c_tilde_bound: bool  # (d) c~_k <= 1 + delta
    outer_slope: bool  # (e) 1/|log rho_{k,0}| <= 1/2

    @property
    def all_hold(self) -> bool:
        return self.c_bound and self.band2_slope and self.band3_slope and self.c_tilde_bound and self.outer_slope

    @property
    def fallback_hold(self) -> bool:
        return self.band2_slope and self.band3_slope and self.outer_slope

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "a": self.c_bound,
            "b": self.band2_slope,
            "c": self.band3_slope,
            "d": self.c_tilde_bound,
            "e": self.outer_slope,
            "all_hold": self.all_hold,
        }


@dataclass(frozen=True)
class RadiiSchedule:
    preset: str = "paper"
    k_max: int | None = None
    _table: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.preset not in PRESETS:
            raise ConfigurationError(f"unknown schedule preset {self.preset!r}; expected one of {PRESETS}")
        k_max = DEFAULT_K_MAX if self.k_max is None else self.k_max
        if not isinstance(k_max, int) or k_max < 2 or k_max > K_MAX_LIMIT[self.preset]:
            raise ConfigurationError(
                f"k_max must be an integer in [2, {K_MAX_LIMIT[self.preset]}] for the {self.preset} preset, got {k_max!r}"
            )
        object.__setattr__(self, "k_max", k_max)
        # full rows 0..k_max, then rho_{k_max+1} alone to close the last annulus
        rows = [
            tuple(_log_radius(self.preset, k + j / SUBDIVISIONS) for j in range(SUBDIVISIONS))
            for k in range(k_max + 1)
        ]
        rows.append((_log_radius(self.preset, float(k_max + 1)),))
        object.__setattr__(self, "_table", tuple(rows))


def log_rho(s: RadiiSchedule, k: int, j: int = 0) -> float:
    """log rho_{k,j}; j = 6 is the same number as (k + 1, 0)."""
    if not 0 <= j <= SUBDIVISIONS:
        raise RangeError(f"sub-index j must lie in [0, 6], got {j}")
    if j == SUBDIVISIONS:
        k, j = k + 1, 0
    if not 0 <= k <= s.k_max + 1 or (k == s.k_max + 1 and j != 0):
        raise RangeError(f"annulus index {k} outside the supported range [0, {s.k_max}]")
    return s._table[k][j]


def band_constants(s: RadiiSchedule, k: int) -> BandConstants:
    return BandConstants(
        c_k=1.0 / (1.0 - log_rho(s, k, 1) / log_rho(s, k, 2)),
        c_tilde_k=1.0 / (1.0 - log_rho(s, k, 4) / log_rho(s, k, 5)),
    )


def double_exponential_closed_forms(k: int) -> BandConstants:
    """Closed forms of c_k and c~_k valid for the paper preset."""
    return BandConstants(
        c_k=1.0 + 1.0 / math.expm1(k / 3.0 + 1.0 / 12.0),
        c_tilde_k=1.0 + 1.0 / math.expm1(k / 3.0 + 1.0 / 4.0),
    )


def k0_conditions(s: RadiiSchedule, k: int, delta: float) -> K0Conditions:
    bc = band_constants(s, k)
    return K0Conditions(
        k=k,
        c_bound=bc.c_k <= 1.0 + delta,
        band2_slope=1.0 / (log_rho(s, k, 2) - log_rho(s, k, 3)) <= delta,
        band3_slope=1.0 / (log_rho(s, k, 3) - log_rho(s, k, 4)) <= delta,
        c_tilde_bound=bc.c_tilde_k <= 1.0 + delta,
        outer_slope=1.0 / abs(log_rho(s, k, 0)) <= 0.5,
    )


def _smallest_stable(s: RadiiSchedule, delta: float, passes) -> int | None:
    # scan from the top so that every k' in [k, k_max] is known to pass
    best = None
    for k in range(s.k_max, 0, -1):
        if not passes(k0_conditions(s, k, delta)):
            break
        best = k
    return best


def select_k0(s: RadiiSchedule, delta: float) -> int:
    """Smallest k >= 1 such that all five conditions hold for every k' in [k, k_max]."""
    k0 = _smallest_stable(s, delta, lambda c: c.all_hold)
    if k0 is None:
        raise ConfigurationError(
            f"no admissible k0 in [1, {s.k_max}] for delta={delta!r} on the {s.preset} schedule"
        )
    return k0


def select_k0_fallback(s: RadiiSchedule, delta: float) -> int:
    """
    Smallest k satisfying conditions (b), (c) and (e) on [k, k_max].

    Used for schedules where c_k never approaches 1 (the mild preset has
    c_k constant), so (a) and (d) cannot hold for any k. The resulting
    configuration is reported as non-admissible.
    """
    k0 = _smallest_stable(s, delta, lambda c: c.fallback_hold)
    if k0 is None:
        raise ConfigurationError(
            f"no usable k0 in [1, {s.k_max}] for delta={delta!r} on the {s.preset} schedule"
        )
    return k0


def band_coordinate(s: RadiiSchedule, k: int, j: int, u: float, c: BandConstants | None = None) -> float:
    """
    Log radius t at fraction u of Band(k, j), u = 0 at the outer edge log rho_{k,j}.

    In bands 1, 2 and 4 u is the cutoff argument itself; band 3 runs its cutoff
    from the inner edge, so there the argument is 1 - u. Either way a grid uniform
    in u resolves the profile evenly. Bands 0 and 5 carry no cutoff and u is
    linear in t.
    """
    c = c or band_constants(s, k)
    l_j, l_next = log_rho(s, k, j), log_rho(s, k, j + 1)
    if j == 1:
        return l_j / (1.0 - u / c.c_k)
    if j == 4:
        return l_j / (1.0 - u / c.c_tilde_k)
    return l_j + u * (l_next - l_j)
