"""
Clifford matrices, the Dirac operator by finite differences, and the 2x2 operator norm.

In two dimensions D = -i(sigma_1 d_x + sigma_2 d_y), so that

    (D u)_upper = -2i d_z u_lower    = -i e^{-i theta} e^{-t} (d_t - i d_theta) u_lower
    (D u)_lower = -2i d_zbar u_upper = -i e^{+i theta} e^{-t} (d_t + i d_theta) u_upper

The polar form is applied to factored fields (spinor_fields.LocalSpinor), with the
stencil acting on O(1) mantissas only. The Cartesian form (any n in {2, 3}, optional
mass) works on ordinary numpy-valued fields and backs the Kelvin checks.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from src.verifier.errors import ConfigurationError, StencilError
from src.verifier.extrange import CZERO, ZERO, ExtReal, xc_from_scaled, xc_to_scaled
from src.verifier.spinor_fields import (
    CounterexampleConfig,
    FieldEvaluator,
    LocalSpinor,
    PolarPoint,
    PotentialValue,
    Region,
    SpinorValue,
    classify,
    eval_V_in,
    local_u_in,
    phase_sign,
    region_limits,
)

MIN_STEP = 1e-12
# exp() of a larger frame gap is not a double
MAX_FRAME_GAP = 700.0

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_1, SIGMA_2, SIGMA_3)


@dataclass(frozen=True)
class CliffordSet:
    n: int
    matrices: tuple  # alpha_1 ... alpha_{n+1}

    @property
    def size(self) -> int:
        return self.matrices[0].shape[0]

    @property
    def spatial(self) -> tuple:
        return self.matrices[: self.n]

    @property
    def mass_matrix(self) -> np.ndarray:
        return self.matrices[self.n]


def clifford(n: int) -> CliffordSet:
    """Pauli matrices for n = 2; the standard 4x4 Dirac representation for n = 3."""
    if n == 2:
        return CliffordSet(2, PAULI)
    if n == 3:
        zero = np.zeros((2, 2), dtype=complex)
        eye = np.eye(2, dtype=complex)
        alphas = tuple(np.block([[zero, s], [s, zero]]) for s in PAULI)
        beta = np.block([[eye, zero], [zero, -eye]])
        return CliffordSet(3, alphas + (beta,))
    raise ConfigurationError(f"Clifford matrices are provided for n in {{2, 3}}, got n={n!r}")


@dataclass(frozen=True)
class FDStencil:
    h: float = 1e-5
    order: int = 2

    def __post_init__(self):
        if not (self.h > 0.0) or self.h < MIN_STEP:
            raise StencilError(f"finite-difference step {self.h!r} is not a usable positive step (minimum {MIN_STEP})")
        if self.order not in (2, 4):
            raise StencilError(f"central stencils of order 2 or 4 are supported, got {self.order!r}")

    @property
    def first(self) -> tuple[tuple[int, float], ...]:
        """(offset, weight) pairs for the antisymmetric first-derivative stencil, positive offsets only."""
        if self.order == 2:
            return ((1, 0.5),)
        return ((1, 2.0 / 3.0), (2, -1.0 / 12.0))

    @property
    def second(self) -> tuple[tuple[int, float], ...]:
        """(offset, weight) pairs of the symmetric second-derivative stencil, non-negative offsets."""
        if self.order == 2:
            return ((0, -2.0), (1, 1.0))
        return ((0, -2.5), (1, 4.0 / 3.0), (2, -1.0 / 12.0))

    @property
    def reach(self) -> float:
        return self.h * max(o for o, _ in self.first)

    def derivative(self, fn: Callable[[float], complex]) -> complex:
        """Central first derivative of fn at 0; exact zero for constants."""
        acc = 0j
        for o, w in self.first:
            acc += w * (fn(o * self.h) - fn(-o * self.h))
        return acc / self.h


# ------------------------------------------------------------ factored polar

# A factored number: exp(frame) * value
Factored = tuple[float, complex]


def _combine(terms: list[Factored]) -> Optional[Factored]:
    """Sum of factored numbers, expressed in the largest frame."""
    live = [(f, v) for f, v in terms if v != 0]
    if not live:
        return None
    top = max(f for f, _ in live)
    total = 0j
    for f, v in live:
        gap = f - top
        if gap > -745.0:
            total += v * math.exp(gap)
    return top, total


def _norm(parts: list[Optional[Factored]]) -> Optional[tuple[float, float]]:
    live = [x for x in parts if x is not None and x[1] != 0]
    if not live:
        return None
    top = max(f for f, _ in live)
    return top, math.sqrt(sum(abs(v * math.exp(max(f - top, -745.0))) ** 2 for f, v in live))


def dirac_local(local: LocalSpinor, st: FDStencil) -> list[Optional[Factored]]:
    """D applied to a factored field, per output component, as (frame, mantissa)."""
    t0, theta0 = local.center.t, local.center.theta
    out: list[Optional[Factored]] = [None, None]
    for o in (0, 1):
        c = 1 - o
        comp = local.component(c)
        if comp is None:
            continue
        s = phase_sign(c)
        d_tau = st.derivative(lambda h: comp.mantissa(h, 0.0))
        d_sigma = st.derivative(lambda h: comp.mantissa(0.0, h))
        out[o] = (comp.frame - t0, -1j * cmath.exp(1j * s * theta0) * (d_tau + 1j * s * d_sigma))
    return out


def apply_dirac_fd(
    field: FieldEvaluator,
    p: PolarPoint,
    st: FDStencil | None = None,
    limits: tuple[float, float] | None = None,
) -> SpinorValue:
    """
    D u at p by central differences in (t, theta).

    Args:
        field: Factored evaluator, e.g. spinor_fields.bigE_field(k).
        p: Centre point.
        st: Stencil; h = 1e-5, second order by default.
        limits: Log-radius interval on which the field is smooth; a stencil
            reaching past it raises StencilError.
    """
    st = st or FDStencil()
    if limits is not None:
        _check_clearance(p, st, limits)
    outputs = dirac_local(field(p), st)
    comps = [CZERO if o is None else xc_from_scaled(o[1], o[0]) for o in outputs]
    return SpinorValue(comps[0], comps[1])


def _check_clearance(p: PolarPoint, st: FDStencil, limits: tuple[float, float]) -> None:
    lo, hi = limits
    if p.t - lo < st.reach or hi - p.t < st.reach:
        raise StencilError(f"stencil of reach {st.reach} at t={p.t!r} crosses a seam of [{lo!r}, {hi!r}]")


def local_residual_terms(
    local: LocalSpinor, v: PotentialValue, st: FDStencil
) -> tuple[list[Optional[Factored]], list[Optional[Factored]], list[Optional[Factored]]]:
    """(D u, V u, u / r) per component, in factored form sharing the frames of u."""
    t0 = local.center.t
    du = dirac_local(local, st)
    vu: list[Optional[Factored]] = []
    for o in (0, 1):
        terms = []
        for c in (0, 1):
            comp = local.component(c)
            entry = v.entry(o, c)
            if comp is None or entry.zero:
                continue
            terms.append((comp.frame + v.scale_logmag, xc_to_scaled(entry, 0.0) * comp.mantissa(0.0, 0.0)))
        vu.append(_combine(terms))
    u_over_r = [
        None if local.component(c) is None else (local.component(c).frame - t0, local.component(c).mantissa(0.0, 0.0))
        for c in (0, 1)
    ]
    return du, vu, u_over_r


def relative_residual(
    du: list[Optional[Factored]], vu: list[Optional[Factored]], u_over_r: list[Optional[Factored]]
) -> float:
    """||Du - Vu|| / (||Vu|| + ||Du|| + ||u||/r); 0/0 is 0."""
    diff = [_combine([x for x in (d, None if w is None else (w[0], -w[1])) if x is not None]) for d, w in zip(du, vu)]
    num = _norm(diff)
    dens = [n for n in (_norm(vu), _norm(du), _norm(u_over_r)) if n is not None]
    if num is None:
        return 0.0
    if not dens:
        return math.inf
    top = max(f for f, _ in dens)
    den = sum(val * math.exp(max(f - top, -745.0)) for f, val in dens)
    gap = num[0] - top
    if gap > MAX_FRAME_GAP or den == 0.0:
        return math.inf
    return num[1] * math.exp(gap) / den


def dirac_residual(
    cfg: CounterexampleConfig,
    p: PolarPoint,
    st: FDStencil | None = None,
    region: Region | None = None,
) -> float:
    """Relative residual of D u = V u at p, using the formula of `region` (classified when omitted)."""
    st = st or FDStencil()
    region = region or classify(cfg.schedule, cfg.k0, p.t)
    _check_clearance(p, st, region_limits(cfg, region))
    local = local_u_in(cfg, region, p)
    return relative_residual(*local_residual_terms(local, eval_V_in(cfg, region, p), st))


# ------------------------------------------------------------- operator norm

def opnorm2(m: PotentialValue) -> ExtReal:
    """
    Largest singular value of a 2x2 matrix from its Gram matrix [[P, R], [conj(R), S]]:
    sigma^2 = (P + S + hypot(P - S, 2|R|)) / 2, evaluated at the entries' common scale.
    The gap term is a sum of squares, so nearly equal singular values lose no digits.
    """
    live = [e for row in m.entries for e in row if not e.zero]
    if not live:
        return ZERO
    ref = max(e.logmag for e in live)
    c = [[xc_to_scaled(m.entry(i, j), ref) for j in (0, 1)] for i in (0, 1)]
    p = abs(c[0][0]) ** 2 + abs(c[1][0]) ** 2
    s = abs(c[0][1]) ** 2 + abs(c[1][1]) ** 2
    r = c[0][0].conjugate() * c[0][1] + c[1][0].conjugate() * c[1][1]
    sigma_sq = 0.5 * (p + s + math.hypot(p - s, 2.0 * abs(r)))
    return ExtReal(1, m.scale_logmag + ref + 0.5 * math.log(sigma_sq))


# ------------------------------------------------------------------ cartesian

CartesianField = Callable[[np.ndarray], np.ndarray]


def _partial(field: CartesianField, x: np.ndarray, j: int, st: FDStencil) -> np.ndarray:
    e = np.zeros_like(x, dtype=float)
    e[j] = 1.0
    acc = 0.0
    for o, w in st.first:
        acc = acc + w * (field(x + o * st.h * e) - field(x - o * st.h * e))
    return acc / st.h


def apply_dirac_cartesian(
    field: CartesianField, x, n: int = 2, st: FDStencil | None = None, mass: float = 0.0
) -> np.ndarray:
    """-i sum_j alpha_j d_j u + m alpha_{n+1} u at x by central differences."""
    st = st or FDStencil()
    cl = clifford(n)
    x = np.asarray(x, dtype=float)
    out = sum(-1j * (alpha @ _partial(field, x, j, st)) for j, alpha in enumerate(cl.spatial))
    if mass:
        out = out + mass * (cl.mass_matrix @ np.asarray(field(x), dtype=complex))
    return out


def laplacian_cartesian(field: CartesianField, x, st: FDStencil | None = None) -> np.ndarray:
    st = st or FDStencil()
    x = np.asarray(x, dtype=float)
    total = 0.0
    for j in range(x.shape[0]):
        e = np.zeros_like(x)
        e[j] = 1.0
        for o, w in st.second:
            if o == 0:
                total = total + w * field(x)
            else:
                total = total + w * (field(x + o * st.h * e) + field(x - o * st.h * e))
    return total / (st.h * st.h)


def dirac_squared_residual(
    field: CartesianField, x, n: int = 2, st: FDStencil | None = None, mass: float = 0.0
) -> float:
    """Relative gap between D_{n,m}^2 u and (-Laplace + m^2) u."""
    st = st or FDStencil()
    x = np.asarray(x, dtype=float)
    once = lambda y: apply_dirac_cartesian(field, y, n, st, mass)  # noqa: E731
    twice = apply_dirac_cartesian(once, x, n, st, mass)
    target = -laplacian_cartesian(field, x, st) + mass * mass * np.asarray(field(x), dtype=complex)
    scale = np.linalg.norm(target) + np.linalg.norm(twice)
    return 0.0 if scale == 0.0 else float(np.linalg.norm(twice - target) / scale)
