"""
Grid-based verification harness.

Every check samples the construction band by band, reduces to a worst case and
returns a CheckReport. A failed inequality is a report with pass = False, never
an exception. Band jobs run concurrently (asyncio over the default executor)
and are reduced in submission order, so reports do not depend on scheduling.
"""

from __future__ import annotations

import asyncio
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import logsumexp

from src.verifier.dirac import FDStencil, dirac_residual, local_residual_terms, opnorm2, relative_residual
from src.verifier.errors import ConfigurationError, StencilError
from src.verifier.extrange import ZERO, ExtReal, render_logmag, xr_add, xr_from_float, xr_to_float
from src.verifier.kelvin import (
    KelvinField,
    check_kelvin_identity,
    check_transport,
    gaussian_spinor,
    infinity_example,
    kelvin_eval,
    kelvin_eval_cartesian,
    kelvin_of,
    kelvin_potential,
    polynomial_spinor,
    radial_power_field,
    shell_masses,
)
from src.verifier.radii import band_constants, band_coordinate, k0_conditions, log_rho
from src.verifier.spinor_fields import (
    BANDS_PER_ANNULUS,
    CounterexampleConfig,
    PolarPoint,
    Region,
    eval_u_in,
    eval_V_in,
    local_u,
)

BOUND_RTOL = 1e-12
CONTINUITY_TOL = 1e-12
DEFAULT_ORIGIN_KS = (1, 5, 10)
LOG_TWO = math.log(2.0)


@dataclass(frozen=True)
class SampleGrid:
    radial: int = 48
    angular: int = 32
    margin: float = 0.1

    def __post_init__(self):
        if self.radial < 2 or self.angular < 2:
            raise ConfigurationError(f"grid counts must be at least 2, got {self.radial}x{self.angular}")
        if not 0.0 <= self.margin < 0.4:
            raise ConfigurationError(f"interior margin must lie in [0, 0.4), got {self.margin!r}")

    def thetas(self) -> list[float]:
        step = 2.0 * math.pi / self.angular
        return [-math.pi + (j + 1) * step for j in range(self.angular)]

    def fractions(self, interior: bool) -> list[float]:
        lo = self.margin if interior else 0.0
        return [float(u) for u in np.linspace(lo, 1.0 - lo, self.radial)]


@dataclass
class CheckReport:
    name: str
    region: str
    points: int
    worst_margin: ExtReal
    passed: bool
    parameters: dict
    worst_value: Optional[float] = None
    worst_location: Optional[str] = None
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        # numpy scalars would leak into the JSON report and the history file
        self.points = int(self.points)
        self.passed = bool(self.passed)
        if self.worst_value is not None:
            self.worst_value = float(self.worst_value)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "region": self.region,
            "points": self.points,
            "worst_margin_logmag": render_logmag(self.worst_margin),
            "pass": self.passed,
        }


@dataclass
class _Outcome:
    region: Region
    points: int = 0
    worst: float = -math.inf
    where: Optional[PolarPoint] = None


# -------------------------------------------------------------- concurrency

async def _gather(jobs: list[Callable[[], object]]) -> list:
    loop = asyncio.get_running_loop()
    return await asyncio.gather(*(loop.run_in_executor(None, job) for job in jobs))


def _run_jobs(jobs: list[Callable[[], object]]) -> list:
    return asyncio.run(_gather(jobs))


# ------------------------------------------------------------------ helpers

def _annuli(cfg: CounterexampleConfig, k_list: Optional[Iterable[int]], span: int) -> list[int]:
    if k_list is None:
        k_list = range(cfg.k0, cfg.k0 + span)
    return [k for k in k_list if cfg.k0 <= k <= cfg.schedule.k_max - 1]


def _regions(ks: list[int]) -> list[Region]:
    return [Region.band(k, j) for k in ks for j in range(BANDS_PER_ANNULUS)]


def region_t(cfg: CounterexampleConfig, region: Region, u: float) -> float:
    """Log radius at profile fraction u of a region (u = 0 at its outer edge)."""
    if region.is_outer:
        return u * log_rho(cfg.schedule, cfg.k0, 0)
    return band_coordinate(cfg.schedule, region.k, region.j, u, band_constants(cfg.schedule, region.k))


def _location(p: PolarPoint, region: Region) -> str:
    return f"{region.label} t={p.t!r} theta={p.theta!r}"


def _margin(x: float) -> ExtReal:
    x = float(x)
    return xr_from_float(x) if math.isfinite(x) else ExtReal(-1, 700.0)


def _report(
    cfg: CounterexampleConfig,
    name: str,
    region: str,
    outcomes: list[_Outcome],
    margin: float,
    passed: bool,
    worst_value: float,
    **details,
) -> CheckReport:
    worst = max(outcomes, key=lambda o: o.worst, default=None)
    return CheckReport(
        name=name,
        region=region,
        points=sum(o.points for o in outcomes),
        worst_margin=_margin(margin),
        passed=passed,
        parameters=cfg.parameters(),
        worst_value=worst_value,
        worst_location=_location(worst.where, worst.region) if worst is not None and worst.where else None,
        details=details,
    )


def _span_label(ks: list[int], outer: bool = False) -> str:
    label = f"Band({ks[0]}..{ks[-1]},0..5)" if ks else "none"
    return f"Outer+{label}" if outer else label


# ------------------------------------------------------------ potential bound

def opnorm_times_r(cfg: CounterexampleConfig, region: Region, p: PolarPoint) -> float:
    return xr_to_float(opnorm2(eval_V_in(cfg, region, p).times_radius(p.t)))


def _scan_bound(cfg: CounterexampleConfig, region: Region, grid: SampleGrid, refine: bool) -> _Outcome:
    out = _Outcome(region)
    fractions = grid.fractions(interior=False)
    for theta in grid.thetas():
        values = []
        for u in fractions:
            p = PolarPoint(region_t(cfg, region, u), theta)
            v = opnorm_times_r(cfg, region, p)
            values.append(v)
            out.points += 1
            if v > out.worst:
                out.worst, out.where = v, p
        if refine:
            _refine(cfg, region, theta, fractions, values, out)
    return out


def _refine(cfg, region, theta, fractions, values, out: _Outcome) -> None:
    """Golden-section search around an interior strict grid maximum."""
    i = int(np.argmax(values))
    if i == 0 or i == len(values) - 1 or not (values[i] > values[i - 1] and values[i] > values[i + 1]):
        return

    def objective(u: float) -> float:
        return -opnorm_times_r(cfg, region, PolarPoint(region_t(cfg, region, u), theta))

    res = minimize_scalar(objective, bracket=(fractions[i - 1], fractions[i], fractions[i + 1]), method="golden")
    u, value = float(res.x), -float(res.fun)
    if 0.0 <= u <= 1.0 and value > out.worst:
        out.worst, out.where = value, PolarPoint(region_t(cfg, region, u), theta)


def check_potential_bound(
    cfg: CounterexampleConfig,
    grid: SampleGrid | None = None,
    k_list: Optional[Iterable[int]] = None,
    refine: bool = True,
) -> CheckReport:
    """|V(z)| |z| <= 1/2 + epsilon on every band of k_list (default k0..k0+3) and the outer region."""
    grid = grid or SampleGrid()
    ks = _annuli(cfg, k_list, 4)
    regions = [Region.outer()] + _regions(ks)
    outcomes = _run_jobs([lambda r=r: _scan_bound(cfg, r, grid, refine) for r in regions])
    worst = max(o.worst for o in outcomes)
    bound = cfg.bound
    passed = worst <= bound * (1.0 + BOUND_RTOL)
    per_region = {o.region.label: float(o.worst) for o in outcomes}
    return _report(
        cfg, "potential_bound", _span_label(ks, outer=True), outcomes, bound - worst, passed, worst,
        bound=bound, violation=max(worst - bound, 0.0), sharp=worst > 0.5 - 1e-9, per_region=per_region,
    )


# ------------------------------------------------------------------ identity

def _scan_identity(cfg, region: Region, grid: SampleGrid, st: FDStencil) -> _Outcome:
    out = _Outcome(region)
    for theta in grid.thetas():
        for u in grid.fractions(interior=True):
            p = PolarPoint(region_t(cfg, region, u), theta)
            try:
                res = dirac_residual(cfg, p, st, region)
            except StencilError:
                res = math.inf
            out.points += 1
            if res > out.worst:
                out.worst, out.where = res, p
    return out


def _scan_beyond_support(cfg, grid: SampleGrid, st: FDStencil) -> _Outcome:
    region = Region.outer()
    out = _Outcome(region)
    for theta in grid.thetas():
        for t in np.linspace(st.reach * 10.0, 10.0, grid.radial):
            p = PolarPoint(float(t), theta)
            res = dirac_residual(cfg, p, st, region)
            out.points += 1
            if res > out.worst:
                out.worst, out.where = res, p
    return out


def check_identity(
    cfg: CounterexampleConfig,
    grid: SampleGrid | None = None,
    k_list: Optional[Iterable[int]] = None,
    st: FDStencil | None = None,
    tol: float = 1e-6,
) -> CheckReport:
    """D u = V u by finite differences on band interiors (default k0..k0+2) and on r > 1."""
    grid = grid or SampleGrid()
    st = st or FDStencil()
    ks = _annuli(cfg, k_list, 3)
    jobs = [lambda r=r: _scan_identity(cfg, r, grid, st) for r in _regions(ks)]
    jobs.append(lambda: _scan_beyond_support(cfg, grid, st))
    outcomes = _run_jobs(jobs)
    worst = max(o.worst for o in outcomes)
    return _report(
        cfg, "identity", _span_label(ks, outer=True), outcomes, tol - worst, worst < tol, worst,
        tolerance=tol, fd_step=st.h, fd_order=st.order,
    )


# --------------------------------------------------------------------- decay

def decay_margin(cfg: CounterexampleConfig, region: Region, p: PolarPoint) -> float:
    """log 2 + h t - log|u|, with h the annulus index of the region."""
    norm = eval_u_in(cfg, region, p).norm()
    if norm.is_zero:
        return math.inf
    # subtract the large terms first; log 2 is absorbed by k t once |t| is large
    return (region.k * p.t - norm.logmag) + LOG_TWO


def _scan_decay(cfg, region: Region, grid: SampleGrid) -> _Outcome:
    out = _Outcome(region)
    for theta in grid.thetas():
        for u in grid.fractions(interior=False):
            p = PolarPoint(region_t(cfg, region, u), theta)
            m = decay_margin(cfg, region, p)
            out.points += 1
            # worst = smallest margin, tracked as its negative
            if -m > out.worst:
                out.worst, out.where = -m, p
    return out


def check_decay(cfg: CounterexampleConfig, grid: SampleGrid | None = None) -> CheckReport:
    """|u(z)| <= 2 |z|^k for t <= log rho_k, every annulus k0..k_max-1."""
    grid = grid or SampleGrid()
    ks = _annuli(cfg, range(cfg.k0, cfg.schedule.k_max), cfg.schedule.k_max)
    outcomes = _run_jobs([lambda r=r: _scan_decay(cfg, r, grid) for r in _regions(ks)])
    margin = -float(max(o.worst for o in outcomes))
    return _report(
        cfg, "decay", _span_label(ks), outcomes, margin, margin >= -1e-12, margin,
        per_region_margin={o.region.label: -float(o.worst) for o in outcomes},
    )


# ----------------------------------------------------------------- vanishing

def _band_mass_bound(cfg: CounterexampleConfig, m: int, weight_shift: int) -> ExtReal:
    """
    Upper bound of sum_{h >= m} int_{annulus h} 4 e^{2ht} e^{2t} e^{-weight_shift * 2t} 2 pi dt,
    i.e. the decay bound |u| <= 2|z|^h integrated over |z| < rho_m, including the tail below k_max.
    """
    s = cfg.schedule
    total = ZERO
    for h in range(m, s.k_max + 1):
        rate = 2 * h + 2 - 2 * weight_shift
        if rate <= 0:
            raise ConfigurationError(f"mass bound diverges for annulus {h}")
        coeff = math.log(8.0 * math.pi / rate)
        top = ExtReal(1, coeff + rate * log_rho(s, h, 0))
        if h < s.k_max:
            total = xr_add(total, xr_add(top, ExtReal(-1, coeff + rate * log_rho(s, h + 1, 0))))
        else:
            total = xr_add(total, top)
    return total


def _vanishing(cfg: CounterexampleConfig, k_list: Iterable[int], weight_shift: int):
    s = cfg.schedule
    sequences, worst_step, decreasing, slopes = {}, math.inf, True, {}
    points = 0
    for k in k_list:
        ms = list(range(max(k, cfg.k0), s.k_max))
        logs = []
        for m in ms:
            bound = _band_mass_bound(cfg, m, weight_shift)
            # origin: R = rho_m, R^-k; infinity: R = 1/rho_m, R^k; both e^{-k log rho_m}
            logs.append(bound.logmag - k * log_rho(s, m, 0))
            points += 1
        sequences[k] = logs
        steps = [a - b for a, b in zip(logs, logs[1:])]
        if steps:
            worst_step = min(worst_step, min(steps))
            decreasing = decreasing and all(x > 0 for x in steps)
        if len(ms) >= 2:
            x = np.array([-log_rho(s, m, 0) for m in ms])
            slope = float(np.polyfit(x / x.max(), np.array(logs), 1)[0])
            slopes[k] = slope
            decreasing = decreasing and slope < 0
    return sequences, worst_step, decreasing, slopes, points


def check_vanishing_origin(cfg: CounterexampleConfig, k_list: Iterable[int] = DEFAULT_ORIGIN_KS) -> CheckReport:
    """log of R^-k int_{|x|<R} |u|^2 strictly decreasing along R = rho_m, with a negative trend."""
    k_list = list(k_list)
    seqs, step, ok, slopes, points = _vanishing(cfg, k_list, 0)
    return CheckReport(
        "vanishing_origin", f"R=rho_m, k in {k_list}", points, _margin(step), ok, cfg.parameters(),
        worst_value=step, details={"log_moments": seqs, "trend_slopes": slopes},
    )


def check_vanishing_infinity(psi: KelvinField, k_list: Iterable[int] = DEFAULT_ORIGIN_KS) -> CheckReport:
    """
    log of R^k int_{|x|>R} |psi|^2 along R = 1/rho_m.

    By inversion the integral is int_{|y|<1/R} |u|^2 |y|^-2, so each annulus h
    contributes with weight r^{2h} / (2h) instead of r^{2h+2} / (2h+2).
    """
    cfg = _cfg_of(psi)
    k_list = list(k_list)
    seqs, step, ok, slopes, points = _vanishing(cfg, k_list, 1)
    return CheckReport(
        "vanishing_infinity", f"R=1/rho_m, k in {k_list}", points, _margin(step), ok, cfg.parameters(),
        worst_value=step, details={"log_moments": seqs, "trend_slopes": slopes},
    )


def log_mass_quadrature(cfg: CounterexampleConfig, t_hi: float, samples: int = 64) -> float:
    """
    log int_{|x| < e^t_hi} |u|^2 dx over the schedule's bands, by a trapezoid rule
    that is exact for integrands exponential in t between samples.
    """
    s = cfg.schedule
    logs = []
    for k in range(cfg.k0, s.k_max):
        for j in range(BANDS_PER_ANNULUS):
            hi = min(log_rho(s, k, j), t_hi)
            lo = log_rho(s, k, j + 1)
            if hi <= lo:
                continue
            region = Region.band(k, j)
            ts = np.linspace(lo, hi, samples)
            g = []
            for t in ts:
                n = eval_u_in(cfg, region, PolarPoint(float(t), 0.0)).norm()
                g.append(-math.inf if n.is_zero else 2.0 * n.logmag + 2.0 * t + math.log(2.0 * math.pi))
            for t0, t1, g0, g1 in zip(ts, ts[1:], g, g[1:]):
                step = float(t1 - t0)
                if step <= 0.0 or (g0 == -math.inf and g1 == -math.inf):
                    continue
                d = g1 - g0
                if abs(d) < 1e-8:
                    logs.append(math.log(step) + float(np.logaddexp(g0, g1)) - LOG_TWO)
                else:
                    big, small = max(g0, g1), min(g0, g1)
                    logs.append(math.log(step) + big + math.log1p(-math.exp(small - big)) - math.log(abs(d)))
    return float(logsumexp(logs)) if logs else -math.inf


# ----------------------------------------------------------------- seams etc.

def _seams(cfg: CounterexampleConfig, ks: list[int]) -> list[tuple[float, Region, Region]]:
    s = cfg.schedule
    seams = [(log_rho(s, cfg.k0, 0), Region.outer(), Region.band(cfg.k0, 0))]
    for k in ks:
        for j in range(1, BANDS_PER_ANNULUS):
            seams.append((log_rho(s, k, j), Region.band(k, j - 1), Region.band(k, j)))
        if k + 1 <= s.k_max - 1:
            seams.append((log_rho(s, k + 1, 0), Region.band(k, 5), Region.band(k + 1, 0)))
    return seams


def seam_gap(cfg: CounterexampleConfig, t: float, theta: float, left: Region, right: Region) -> float:
    """Largest componentwise disagreement of two adjacent formulas (relative logmag, absolute arg)."""
    p = PolarPoint(t, theta)
    a, b = eval_u_in(cfg, left, p), eval_u_in(cfg, right, p)
    gap = 0.0
    for x, y in zip(a.components, b.components):
        if x.zero != y.zero:
            return math.inf
        if x.zero:
            continue
        gap = max(gap, abs(x.logmag - y.logmag) / max(1.0, abs(x.logmag)))
        gap = max(gap, abs(math.remainder(x.arg - y.arg, 2.0 * math.pi)))
    return gap


def check_continuity(
    cfg: CounterexampleConfig, k_list: Optional[Iterable[int]] = None, angles: int = 64
) -> CheckReport:
    ks = _annuli(cfg, k_list, 4)
    thetas = SampleGrid(2, angles).thetas()
    outcome = _Outcome(Region.outer())
    for t, left, right in _seams(cfg, ks):
        for theta in thetas:
            g = seam_gap(cfg, t, theta, left, right)
            outcome.points += 1
            if g > outcome.worst:
                outcome.worst, outcome.where, outcome.region = g, PolarPoint(t, theta), right
    worst = max(outcome.worst, 0.0)
    return _report(
        cfg, "continuity", _span_label(ks, outer=True), [outcome], CONTINUITY_TOL - worst,
        worst <= CONTINUITY_TOL, worst, seams=len(_seams(cfg, ks)), angles=angles,
    )


def check_support(cfg: CounterexampleConfig, grid: SampleGrid | None = None) -> CheckReport:
    """u = 0 exactly for r >= 1."""
    grid = grid or SampleGrid()
    outcome = _Outcome(Region.outer())
    nonzero = 0
    for theta in grid.thetas():
        for t in [0.0] + list(np.geomspace(1e-9, 1e6, grid.radial - 1)):
            p = PolarPoint(float(t), theta)
            outcome.points += 1
            if not local_u(cfg, p).value().is_zero:
                nonzero += 1
                outcome.worst, outcome.where = 1.0, p
    return _report(cfg, "support", "Outer(t>=0)", [outcome], 0.0 if nonzero == 0 else -float(nonzero),
                   nonzero == 0, float(nonzero), nonzero_points=nonzero)


def check_k0(cfg: CounterexampleConfig) -> CheckReport:
    """The five band conditions on every k in [k0, k_max]; the margin is the smallest slack."""
    s, delta = cfg.schedule, cfg.delta
    slack, failing = math.inf, []
    for k in range(cfg.k0, s.k_max + 1):
        bc = band_constants(s, k)
        slacks = [
            1.0 + delta - bc.c_k,
            delta - 1.0 / (log_rho(s, k, 2) - log_rho(s, k, 3)),
            delta - 1.0 / (log_rho(s, k, 3) - log_rho(s, k, 4)),
            1.0 + delta - bc.c_tilde_k,
            0.5 - 1.0 / abs(log_rho(s, k, 0)),
        ]
        slack = min(slack, min(slacks))
        cond = k0_conditions(s, k, delta)
        if not cond.all_hold:
            failing.append(cond.as_dict())
    passed = not failing
    return CheckReport(
        "k0_conditions", f"k in [{cfg.k0}, {s.k_max}]", s.k_max - cfg.k0 + 1, _margin(slack), passed,
        cfg.parameters(), worst_value=slack, details={"failing": failing, "k0_forced": cfg.k0_forced},
    )


# ------------------------------------------------------------------ infinity

def _cfg_of(psi: KelvinField) -> CounterexampleConfig:
    if psi.cfg is None:
        raise ConfigurationError("the Kelvin field does not come from a counterexample configuration")
    return psi.cfg


def check_infinity_support(psi: KelvinField, grid: SampleGrid | None = None) -> CheckReport:
    """psi = 0 exactly for |x| < 1, and psi is not identically zero outside."""
    grid = grid or SampleGrid()
    cfg = _cfg_of(psi)
    outcome = _Outcome(Region.outer())
    bad = 0
    for theta in grid.thetas():
        for t in -np.geomspace(1e-9, 1e6, grid.radial):
            p = PolarPoint(float(t), theta)
            outcome.points += 1
            if not kelvin_eval(psi, p).is_zero:
                bad += 1
                outcome.worst, outcome.where = 1.0, p
    # |x| = 1/rho_{k0,1}: inside the image of Band(k0, 0), where u = E_{k0} != 0
    inside_image = PolarPoint(-0.5 * (log_rho(cfg.schedule, cfg.k0, 0) + log_rho(cfg.schedule, cfg.k0, 1)), 0.0)
    nontrivial = not kelvin_eval(psi, inside_image).is_zero
    passed = bad == 0 and nontrivial
    return _report(cfg, "infinity_support", "|x|<1", [outcome], 0.0 if passed else -float(bad + 1),
                   passed, float(bad), nontrivial=nontrivial)


def _scan_infinity_bound(psi: KelvinField, cfg, region: Region, grid: SampleGrid) -> _Outcome:
    out = _Outcome(region)
    for theta in grid.thetas():
        for u in grid.fractions(interior=False):
            y = PolarPoint(region_t(cfg, region, u), theta)
            x = y.inverted()
            v = xr_to_float(opnorm2(kelvin_potential(psi, x).times_radius(x.t)))
            out.points += 1
            if v > out.worst:
                out.worst, out.where = v, x
    return out


def check_infinity_potential_bound(
    psi: KelvinField, grid: SampleGrid | None = None, k_list: Optional[Iterable[int]] = None
) -> CheckReport:
    """|V_psi(x)| |x| <= 1/2 + epsilon at the images of the band samples."""
    grid = grid or SampleGrid()
    cfg = _cfg_of(psi)
    ks = _annuli(cfg, k_list, 4)
    regions = [Region.outer()] + _regions(ks)
    outcomes = _run_jobs([lambda r=r: _scan_infinity_bound(psi, cfg, r, grid) for r in regions])
    worst = max(o.worst for o in outcomes)
    return _report(
        cfg, "infinity_potential_bound", "image of " + _span_label(ks, outer=True), outcomes,
        cfg.bound - worst, worst <= cfg.bound * (1.0 + BOUND_RTOL), worst, bound=cfg.bound,
    )


def _scan_infinity_identity(psi: KelvinField, cfg, region: Region, grid: SampleGrid, st: FDStencil) -> _Outcome:
    out = _Outcome(region)
    for theta in grid.thetas():
        for u in grid.fractions(interior=True):
            x = PolarPoint(region_t(cfg, region, u), theta).inverted()
            res = relative_residual(*local_residual_terms(psi.local(x), kelvin_potential(psi, x), st))
            out.points += 1
            if res > out.worst:
                out.worst, out.where = res, x
    return out


def check_infinity_identity(
    psi: KelvinField,
    grid: SampleGrid | None = None,
    k_list: Optional[Iterable[int]] = None,
    st: FDStencil | None = None,
    tol: float = 1e-6,
) -> CheckReport:
    """D psi = V_psi psi at the images of band interiors."""
    grid = grid or SampleGrid(8, 4)
    st = st or FDStencil()
    cfg = _cfg_of(psi)
    ks = _annuli(cfg, k_list, 1)
    outcomes = _run_jobs([lambda r=r: _scan_infinity_identity(psi, cfg, r, grid, st) for r in _regions(ks)])
    worst = max(o.worst for o in outcomes)
    return _report(cfg, "infinity_identity", "image of " + _span_label(ks), outcomes, tol - worst,
                   worst < tol, worst, tolerance=tol)


# ------------------------------------------------------------------- drivers

def _timed(name: str, fn: Callable[[], CheckReport], metrics) -> CheckReport:
    start = time.perf_counter()
    report = fn()
    if metrics is not None:
        metrics.record_check(name, time.perf_counter() - start, report.points, report.passed)
    return report


def run_infinity(
    cfg: CounterexampleConfig,
    grid: SampleGrid | None = None,
    st: FDStencil | None = None,
    tol: float = 1e-6,
    metrics=None,
) -> list[CheckReport]:
    psi = infinity_example(cfg)
    return [
        _timed("infinity_support", lambda: check_infinity_support(psi, grid), metrics),
        _timed("infinity_potential_bound", lambda: check_infinity_potential_bound(psi, grid), metrics),
        _timed("infinity_identity", lambda: check_infinity_identity(psi, st=st, tol=tol), metrics),
        _timed("vanishing_infinity", lambda: check_vanishing_infinity(psi), metrics),
    ]


def run_all(
    cfg: CounterexampleConfig,
    grid: SampleGrid | None = None,
    st: FDStencil | None = None,
    tol: float = 1e-6,
    metrics=None,
) -> list[CheckReport]:
    """Every check, in a fixed order."""
    grid = grid or SampleGrid()
    st = st or FDStencil()
    reports = [
        _timed("k0_conditions", lambda: check_k0(cfg), metrics),
        _timed("continuity", lambda: check_continuity(cfg), metrics),
        _timed("support", lambda: check_support(cfg, grid), metrics),
        _timed("potential_bound", lambda: check_potential_bound(cfg, grid), metrics),
        _timed("identity", lambda: check_identity(cfg, grid, st=st, tol=tol), metrics),
        _timed("decay", lambda: check_decay(cfg, grid), metrics),
        _timed("vanishing_origin", lambda: check_vanishing_origin(cfg), metrics),
    ]
    return reports + run_infinity(cfg, grid, st, tol, metrics)


def all_pass(reports: list[CheckReport]) -> bool:
    return all(r.passed for r in reports)


# -------------------------------------------------------- kelvin (cartesian)

def kelvin_points(n: int, count: int = 100, r_lo: float = 0.5, r_hi: float = 2.0, seed: int = 0) -> list[np.ndarray]:
    """Seeded sample points with |x| in [r_lo, r_hi]."""
    rng = np.random.default_rng(seed)
    points = []
    for _ in range(count):
        d = rng.normal(size=n)
        points.append(d / np.linalg.norm(d) * rng.uniform(r_lo, r_hi))
    return points


def _kelvin_report(name: str, n: int, points: int, worst: float, tol: float, **details) -> CheckReport:
    return CheckReport(
        name, f"R^{n}", points, _margin(tol - worst), worst <= tol, {"dimension": n},
        worst_value=worst, details={"tolerance": tol, **details},
    )


def run_kelvin(n: int = 2, st: FDStencil | None = None, tol: float = 1e-5, count: int = 100) -> list[CheckReport]:
    """Involution, the intertwining identity, shell masses (n = 2) and bound transport on synthetic fields."""
    st = st or FDStencil(1e-3, 4)
    points = kelvin_points(n, count)
    fields = {"gaussian": gaussian_spinor(n), "polynomial": polynomial_spinor(n)}
    reports = []

    worst = 0.0
    for f in fields.values():
        twice = kelvin_of(f, n)
        for x in points:
            ref = np.asarray(f(x), dtype=complex)
            err = np.linalg.norm(kelvin_eval_cartesian(twice, x, n) - ref) / max(1.0, float(np.linalg.norm(ref)))
            worst = max(worst, float(err))
    reports.append(_kelvin_report("kelvin_involution", n, len(points) * len(fields), worst, 1e-12))

    per_field = {name: max(check_kelvin_identity(f, x, n, st) for x in points) for name, f in fields.items()}
    reports.append(_kelvin_report(
        "kelvin_identity", n, len(points) * len(fields), max(per_field.values()), tol,
        per_field=per_field, fd_step=st.h, fd_order=st.order,
    ))

    if n == 2:
        outer, inner = shell_masses(fields["gaussian"], 1.0, 2.0)
        gap = abs(outer - inner) / max(abs(outer), abs(inner))
        reports.append(_kelvin_report("kelvin_shell_mass", n, 2, gap, 1e-8, outer=outer, inner=inner))

    gamma, constant = 1.5, 0.5
    result = check_transport(radial_power_field(gamma, constant, n), gamma, constant, points, n, st)
    reports.append(CheckReport(
        "kelvin_transport", f"R^{n}", result.points, _margin(1.0 + result.slack - result.worst_image_ratio),
        result.passed, {"dimension": n, "gamma": gamma, "constant": constant},
        worst_value=result.worst_image_ratio, details={"worst_source_ratio": result.worst_source_ratio},
    ))
    return reports
