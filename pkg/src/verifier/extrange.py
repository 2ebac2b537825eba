"""
Extended-range real and complex numbers in log-polar form.

ExtReal is (sign, logmag) and ExtComplex is (logmag, arg) with a zero flag.
The radii of the construction (rho_3 = exp(-exp(9)) and far below) and
powers r^k of them underflow hardware doubles; here they are ordinary
values, because only the natural log of the magnitude is stored.

Exact zero is a distinguished state and is never encoded as -inf.
Overflow of the logmag itself raises RangeError instead of saturating.
"""

from __future__ import annotations

import cmath
import math
import sys
from dataclasses import dataclass
from typing import Iterable

from src.verifier.errors import RangeError

# Logmag gap beyond which the smaller addend is dropped (relative error < e^-40)
COLLAPSE_GAP = 40.0
TWO_PI = 2.0 * math.pi
# Largest logmag whose exponential is still a finite double
DOUBLE_LOGMAG_MAX = math.log(sys.float_info.max)
_CANCEL_EPS = 4.0 * sys.float_info.epsilon


def normalize_arg(x: float) -> float:
    """Map an angle into (-pi, pi]."""
    if not math.isfinite(x):
        raise RangeError(f"non-finite argument {x!r}")
    a = math.remainder(x, TWO_PI)
    if a <= -math.pi:
        a += TWO_PI
    return a


def _checked(logmag: float) -> float:
    if not math.isfinite(logmag):
        raise RangeError(f"logmag overflow: {logmag!r}")
    return logmag


@dataclass(frozen=True, eq=False)
class ExtReal:
    sign: int
    logmag: float = 0.0

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or +1, got {self.sign!r}")
        if self.sign != 0:
            _checked(self.logmag)

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def __eq__(self, other):
        if not isinstance(other, ExtReal):
            return NotImplemented
        return xr_compare(self, other) == 0

    def __hash__(self):
        return hash((0, 0.0)) if self.sign == 0 else hash((self.sign, self.logmag))

    def __add__(self, other: ExtReal) -> ExtReal:
        return xr_add(self, other)

    def __mul__(self, other: ExtReal) -> ExtReal:
        return xr_mul(self, other)

    def __neg__(self) -> ExtReal:
        return xr_neg(self)

    def __lt__(self, other: ExtReal) -> bool:
        return xr_compare(self, other) < 0

    def __le__(self, other: ExtReal) -> bool:
        return xr_compare(self, other) <= 0

    def __gt__(self, other: ExtReal) -> bool:
        return xr_compare(self, other) > 0

    def __ge__(self, other: ExtReal) -> bool:
        return xr_compare(self, other) >= 0

    def __float__(self) -> float:
        return xr_to_float(self)

    def __repr__(self) -> str:
        return "ExtReal(0)" if self.sign == 0 else f"ExtReal({self.sign:+d}, {self.logmag!r})"


@dataclass(frozen=True, eq=False)
class ExtComplex:
    logmag: float = 0.0
    arg: float = 0.0
    zero: bool = False

    def __post_init__(self):
        if self.zero:
            object.__setattr__(self, "logmag", 0.0)
            object.__setattr__(self, "arg", 0.0)
            return
        _checked(self.logmag)
        object.__setattr__(self, "arg", normalize_arg(self.arg))

    def __eq__(self, other):
        if not isinstance(other, ExtComplex):
            return NotImplemented
        if self.zero or other.zero:
            return self.zero and other.zero
        return self.logmag == other.logmag and self.arg == other.arg

    def __hash__(self):
        return hash((self.zero, self.logmag, self.arg))

    def __add__(self, other: ExtComplex) -> ExtComplex:
        return xc_add(self, other)

    def __mul__(self, other: ExtComplex) -> ExtComplex:
        return xc_mul(self, other)

    def __neg__(self) -> ExtComplex:
        return xc_neg(self)

    def __repr__(self) -> str:
        return "ExtComplex(0)" if self.zero else f"ExtComplex({self.logmag!r}, arg={self.arg!r})"


ZERO = ExtReal(0)
ONE = ExtReal(1, 0.0)
CZERO = ExtComplex(zero=True)
CONE = ExtComplex(0.0, 0.0)


# ---------------------------------------------------------------- ExtReal ops

def xr_from_float(d: float) -> ExtReal:
    if d == 0.0:
        return ZERO
    if not math.isfinite(d):
        raise RangeError(f"cannot represent {d!r}")
    return ExtReal(1 if d > 0 else -1, math.log(abs(d)))


def xr_from_log(logmag: float, sign: int = 1) -> ExtReal:
    return ExtReal(sign, logmag)


def xr_to_float(a: ExtReal) -> float:
    """Convert to a double; magnitudes below the double range flush to 0.0."""
    if a.sign == 0:
        return 0.0
    if a.logmag > DOUBLE_LOGMAG_MAX:
        raise RangeError(f"{a!r} exceeds the double range")
    return a.sign * math.exp(a.logmag)


def xr_neg(a: ExtReal) -> ExtReal:
    return a if a.sign == 0 else ExtReal(-a.sign, a.logmag)


def xr_mul(a: ExtReal, b: ExtReal) -> ExtReal:
    if a.sign == 0 or b.sign == 0:
        return ZERO
    return ExtReal(a.sign * b.sign, _checked(a.logmag + b.logmag))


def xr_add(a: ExtReal, b: ExtReal) -> ExtReal:
    if a.sign == 0:
        return b
    if b.sign == 0:
        return a
    hi, lo = (a, b) if a.logmag >= b.logmag else (b, a)
    gap = lo.logmag - hi.logmag
    if gap < -COLLAPSE_GAP:
        return hi
    if hi.sign == lo.sign:
        return ExtReal(hi.sign, _checked(hi.logmag + math.log1p(math.exp(gap))))
    if gap == 0.0:
        return ZERO
    # 1 - e^gap through expm1; exp(gap) rounds to 1 once |gap| < 1e-16
    return ExtReal(hi.sign, _checked(hi.logmag + math.log(-math.expm1(gap))))


def xr_sqrt(a: ExtReal) -> ExtReal:
    if a.sign < 0:
        raise RangeError(f"square root of negative value {a!r}")
    return a if a.sign == 0 else ExtReal(1, 0.5 * a.logmag)


def xr_compare(a: ExtReal, b: ExtReal) -> int:
    """Three-way comparison: -1, 0 or +1."""
    if a.sign != b.sign:
        return -1 if a.sign < b.sign else 1
    if a.sign == 0 or a.logmag == b.logmag:
        return 0
    return a.sign if a.logmag > b.logmag else -a.sign


def render_logmag(a: ExtReal) -> str:
    """Serialize as 'logmag:0', 'logmag:+(L)' or 'logmag:-(L)'."""
    if a.sign == 0:
        return "logmag:0"
    return f"logmag:{'+' if a.sign > 0 else '-'}({a.logmag!r})"


# ------------------------------------------------------------- ExtComplex ops

def xc_from_complex(c: complex) -> ExtComplex:
    if c == 0:
        return CZERO
    if not cmath.isfinite(c):
        raise RangeError(f"cannot represent {c!r}")
    return ExtComplex(math.log(abs(c)), cmath.phase(c))


def xc_from_polar(logmag: float, arg: float) -> ExtComplex:
    return ExtComplex(logmag, arg)


def xc_to_complex(z: ExtComplex) -> complex:
    if z.zero:
        return 0j
    if z.logmag > DOUBLE_LOGMAG_MAX:
        raise RangeError(f"{z!r} exceeds the double range")
    return cmath.rect(math.exp(z.logmag), z.arg)


def xc_neg(z: ExtComplex) -> ExtComplex:
    return z if z.zero else ExtComplex(z.logmag, z.arg + math.pi)


def xc_conj(z: ExtComplex) -> ExtComplex:
    return z if z.zero else ExtComplex(z.logmag, -z.arg)


def xc_abs(z: ExtComplex) -> ExtReal:
    return ZERO if z.zero else ExtReal(1, z.logmag)


def xc_mul(a: ExtComplex, b: ExtComplex) -> ExtComplex:
    if a.zero or b.zero:
        return CZERO
    return ExtComplex(_checked(a.logmag + b.logmag), a.arg + b.arg)


def xc_scale(z: ExtComplex, x: ExtReal) -> ExtComplex:
    if z.zero or x.sign == 0:
        return CZERO
    return ExtComplex(_checked(z.logmag + x.logmag), z.arg + (math.pi if x.sign < 0 else 0.0))


def xc_add(a: ExtComplex, b: ExtComplex) -> ExtComplex:
    if a.zero:
        return b
    if b.zero:
        return a
    hi, lo = (a, b) if a.logmag >= b.logmag else (b, a)
    gap = lo.logmag - hi.logmag
    if gap < -COLLAPSE_GAP:
        return hi
    w = 1.0 + cmath.rect(math.exp(gap), lo.arg - hi.arg)
    # cancellation below double resolution is exact cancellation
    if abs(w) <= _CANCEL_EPS:
        return CZERO
    return ExtComplex(_checked(hi.logmag + math.log(abs(w))), hi.arg + cmath.phase(w))


def xc_pow_int(z: ExtComplex, k: int) -> ExtComplex:
    if k == 0:
        return CONE
    if z.zero:
        if k < 0:
            raise RangeError("zero raised to a negative power")
        return CZERO
    return ExtComplex(_checked(k * z.logmag), k * z.arg)


def xc_norm(values: Iterable[ExtComplex]) -> ExtReal:
    """Euclidean norm of a vector of ExtComplex entries."""
    total = ZERO
    for v in values:
        if not v.zero:
            total = xr_add(total, ExtReal(1, _checked(2.0 * v.logmag)))
    return xr_sqrt(total)


def xc_to_scaled(z: ExtComplex, ref_logmag: float) -> complex:
    """Mantissa of z relative to exp(ref_logmag), as an ordinary complex."""
    if z.zero:
        return 0j
    gap = z.logmag - ref_logmag
    if gap > DOUBLE_LOGMAG_MAX:
        raise RangeError(f"{z!r} is too large for reference {ref_logmag!r}")
    if gap < -745.0:
        return 0j
    return cmath.rect(math.exp(gap), z.arg)


def xc_from_scaled(c: complex, ref_logmag: float) -> ExtComplex:
    if c == 0:
        return CZERO
    return ExtComplex(_checked(ref_logmag + math.log(abs(c))), cmath.phase(c))
