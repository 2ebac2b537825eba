"""
Dirac-adapted Kelvin transform.

    u_K(x) = |x|^{-(n-1)} [i alpha.(x/|x|) alpha_{n+1}] u(x/|x|^2)

The bracket is unitary and squares to the identity, so (u_K)_K = u, and
D u_K(x) = |x|^{-2} [D u]_K(x). Inversion is exact in log radius (t -> -t),
which lets the transform act on the factored counterexample at any scale.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np
from scipy.integrate import dblquad

from src.verifier.dirac import CartesianField, FDStencil, apply_dirac_cartesian, clifford
from src.verifier.errors import ConfigurationError, NumericalError
from src.verifier.extrange import ExtComplex, xc_mul
from src.verifier.spinor_fields import (
    LOWER,
    UPPER,
    CounterexampleConfig,
    FieldEvaluator,
    LocalComponent,
    LocalSpinor,
    PolarPoint,
    PotentialValue,
    counterexample_field,
    eval_V,
)

SHELL_EPSABS = 1e-13
SHELL_EPSREL = 1e-11


def kelvin_multiplier(n: int, xhat) -> np.ndarray:
    """i (alpha . xhat) alpha_{n+1}; unitary and an involution."""
    cl = clifford(n)
    xhat = np.asarray(xhat, dtype=float)
    if xhat.shape != (n,):
        raise ConfigurationError(f"direction must have {n} coordinates, got shape {xhat.shape}")
    dot = sum(x * alpha for x, alpha in zip(xhat, cl.spatial))
    return 1j * dot @ cl.mass_matrix


def _polar_multiplier(theta: float) -> tuple[complex, complex]:
    # n = 2: [[0, -i e^{-i theta}], [i e^{i theta}, 0]]
    return -1j * cmath.exp(-1j * theta), 1j * cmath.exp(1j * theta)


# ------------------------------------------------------------------- polar

@dataclass(frozen=True)
class KelvinField:
    """u_K for a factored two-dimensional field u, with u's potential when known."""

    base: FieldEvaluator
    n: int = 2
    base_potential: Optional[Callable[[PolarPoint], PotentialValue]] = None
    cfg: Optional[CounterexampleConfig] = None

    def __post_init__(self):
        if self.n != 2:
            raise ConfigurationError("the factored Kelvin transform is two-dimensional; use kelvin_eval_cartesian for n = 3")

    def local(self, p: PolarPoint) -> LocalSpinor:
        return kelvin_local(self.base, p)

    def __call__(self, p: PolarPoint) -> LocalSpinor:
        return self.local(p)


def kelvin_local(base: FieldEvaluator, p: PolarPoint) -> LocalSpinor:
    """Factored u_K around p; offsets (tau, sigma) at x are (-tau, sigma) at x/|x|^2."""
    t0, theta0 = p.t, p.theta
    ub = base(p.inverted())

    def moved(src: Optional[LocalComponent], sign: int) -> Optional[LocalComponent]:
        if src is None:
            return None
        mant = src.mantissa
        coeff = sign * 1j

        def mantissa(tau: float, sigma: float) -> complex:
            return coeff * cmath.exp(sign * 1j * (theta0 + sigma)) * math.exp(-tau) * mant(-tau, sigma)

        return LocalComponent(src.frame - t0, mantissa)

    # upper of u_K comes from the lower of u and vice versa
    return LocalSpinor(p, moved(ub.component(LOWER), -1), moved(ub.component(UPPER), 1))


def kelvin_eval(f: KelvinField, p: PolarPoint):
    return f.local(p).value()


def kelvin_potential(f: KelvinField, p: PolarPoint) -> PotentialValue:
    """|x|^{-2} K V(x/|x|^2) K, the potential satisfying D u_K = V_K u_K."""
    if f.base_potential is None:
        raise ConfigurationError("this Kelvin field carries no potential")
    v = f.base_potential(p.inverted())
    k01, k10 = _polar_multiplier(p.theta)
    kappa = {(0, 1): ExtComplex(0.0, cmath.phase(k01)), (1, 0): ExtComplex(0.0, cmath.phase(k10))}
    # K is anti-diagonal, so each entry of K V K is a single product
    entries = tuple(
        tuple(xc_mul(xc_mul(kappa[(i, 1 - i)], v.entry(1 - i, 1 - j)), kappa[(1 - j, j)]) for j in (0, 1))
        for i in (0, 1)
    )
    return PotentialValue(entries, v.scale_logmag - 2.0 * p.t)


def infinity_example(cfg: CounterexampleConfig) -> KelvinField:
    """psi = u_K: supported in |x| >= 1, vanishing to infinite order at infinity."""
    return KelvinField(counterexample_field(cfg), 2, lambda q: eval_V(cfg, q), cfg)


# --------------------------------------------------------------- cartesian

def kelvin_eval_cartesian(field: CartesianField, x, n: int = 2) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise ConfigurationError("the Kelvin transform is not defined at the origin")
    return r ** (-(n - 1)) * (kelvin_multiplier(n, x / r) @ np.asarray(field(x / (r * r)), dtype=complex))


def kelvin_of(field: CartesianField, n: int = 2) -> CartesianField:
    return lambda x: kelvin_eval_cartesian(field, x, n)


def check_kelvin_identity(field: CartesianField, x, n: int = 2, st: FDStencil | None = None) -> float:
    """
    Residual of D u_K(x) = |x|^{-2} [D u]_K(x), both sides by finite differences.

    Normalized by |D u_K| + |x|^{-2}|[D u]_K| + |u_K|/|x|, so that fields with
    D u = 0 give an absolute residual on the field's own scale.
    """
    st = st or FDStencil()
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    lhs = apply_dirac_cartesian(kelvin_of(field, n), x, n, st)
    du = lambda y: apply_dirac_cartesian(field, y, n, st)  # noqa: E731
    rhs = kelvin_eval_cartesian(du, x, n) / (r * r)
    scale = np.linalg.norm(lhs) + np.linalg.norm(rhs) + np.linalg.norm(kelvin_eval_cartesian(field, x, n)) / r
    return 0.0 if scale == 0.0 else float(np.linalg.norm(lhs - rhs) / scale)


def transport_bound(gamma: float) -> float:
    """Exponent of |x| in the transported bound: |D u| <= C|x|^-gamma |u| becomes C|x|^(gamma-2)."""
    return 2.0 - gamma


@dataclass
class TransportResult:
    gamma: float
    constant: float
    points: int
    worst_source_ratio: float
    worst_image_ratio: float
    slack: float

    @property
    def passed(self) -> bool:
        return self.worst_image_ratio <= 1.0 + self.slack


def check_transport(
    field: CartesianField,
    gamma: float,
    constant: float,
    points: Iterable,
    n: int = 2,
    st: FDStencil | None = None,
    slack: float = 1e-8,
) -> TransportResult:
    """
    Ratio check on both sides of the inversion.

    At each sample y the source ratio |D u(y)| / (C |y|^-gamma |u(y)|) is recorded;
    at x = y/|y|^2 the image ratio |D u_K(x)| / (C |x|^(gamma-2) |u_K(x)|) must not
    exceed 1 + slack.
    """
    st = st or FDStencil(1e-3, 4)
    psi = kelvin_of(field, n)
    exponent = transport_bound(gamma)
    worst_src, worst_img, count = 0.0, 0.0, 0
    for y in points:
        y = np.asarray(y, dtype=float)
        ry = float(np.linalg.norm(y))
        x = y / (ry * ry)
        rx = 1.0 / ry
        src = np.linalg.norm(apply_dirac_cartesian(field, y, n, st)) / (
            constant * ry ** (-gamma) * np.linalg.norm(field(y))
        )
        img = np.linalg.norm(apply_dirac_cartesian(psi, x, n, st)) / (
            constant * rx ** (-exponent) * np.linalg.norm(psi(x))
        )
        worst_src, worst_img, count = max(worst_src, float(src)), max(worst_img, float(img)), count + 1
    return TransportResult(gamma, constant, count, worst_src, worst_img, slack)


def shell_masses(field: CartesianField, a: float, b: float) -> tuple[float, float]:
    """
    (int_{a<|x|<b} |u_K|^2, int_{1/b<|y|<1/a} |u|^2 |y|^-2) for n = 2, by two
    independent quadratures in polar coordinates.
    """

    def density(fn: CartesianField, weight: Callable[[float], float]):
        def integrand(theta: float, r: float) -> float:
            v = np.asarray(fn(np.array([r * math.cos(theta), r * math.sin(theta)])), dtype=complex)
            return float(np.vdot(v, v).real) * weight(r) * r

        return integrand

    outer, err_outer = dblquad(
        density(kelvin_of(field, 2), lambda r: 1.0), a, b, -math.pi, math.pi,
        epsabs=SHELL_EPSABS, epsrel=SHELL_EPSREL,
    )
    inner, err_inner = dblquad(
        density(field, lambda r: r ** -2), 1.0 / b, 1.0 / a, -math.pi, math.pi,
        epsabs=SHELL_EPSABS, epsrel=SHELL_EPSREL,
    )
    tolerance = 1e-7 * max(1.0, abs(outer), abs(inner))
    if max(err_outer, err_inner) > tolerance:
        raise NumericalError("shell quadrature did not reach its tolerance", residual=max(err_outer, err_inner))
    return outer, inner


# ---------------------------------------------------------- synthetic fields

def _spinor_size(n: int) -> int:
    return clifford(n).size


def gaussian_spinor(n: int = 2) -> CartesianField:
    size = _spinor_size(n)
    w = np.array([1.0, 0.5 - 0.25j, -0.3 + 0.7j, 0.2j][:size])
    v = np.array([0.4j, -1.0, 0.6, 0.1 - 0.5j][:size])

    def field(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return math.exp(-float(x @ x)) * (w + x[0] * v)

    return field


def polynomial_spinor(n: int = 2) -> CartesianField:
    def field(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        x1, x2 = x[0], x[1]
        if n == 2:
            return np.array([x1 * x1 - x2 + 1.0, x1 * x2 + 2.0j * x2 - 0.5], dtype=complex)
        x3 = x[2]
        return np.array(
            [x1 * x2 - x3 + 1.0, x3 * x3 + 1j * x1, 0.5 * x2 - 1j * x1 * x3, x1 + x2 + x3 + 2.0],
            dtype=complex,
        )

    return field


def radial_power_field(gamma: float, constant: float, n: int = 2) -> CartesianField:
    """g(|x|) times a constant spinor, with g'/g = C r^-gamma so |D u| = C|x|^-gamma |u| exactly."""
    w = np.zeros(_spinor_size(n), dtype=complex)
    w[0] = 1.0

    def g(r: float) -> float:
        if gamma == 1.0:
            return r ** constant
        return math.exp(constant * r ** (1.0 - gamma) / (1.0 - gamma))

    def field(x: np.ndarray) -> np.ndarray:
        return g(float(np.linalg.norm(x))) * w

    return field
