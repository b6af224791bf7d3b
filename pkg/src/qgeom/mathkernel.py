"""Shared numerical primitives.

Every closed form in this package is a ratio of Gamma products that
under- or overflows a double long before the dimensions of interest, so
values are carried as :class:`LogReal` (sign, log|x|) and only turned into
floats at the output boundary.
"""
from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from typing import Mapping, Union

Number = Union[int, float]

_TWO_PI = 2.0 * math.pi


@functools.total_ordering
@dataclass(frozen=True)
class LogReal:
    """A real number stored as ``sign * exp(logmag)``.

    ``sign`` is -1, 0 or +1.  For zero, ``logmag`` is ``-inf``.

    Rounding log|x| to a double costs about ``|log x| * 1e-16`` relative
    accuracy, so values built by :meth:`from_float` remember the original
    float and hand it back unchanged.
    """

    sign: int
    logmag: float
    _exact: float | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign!r}")
        if self.sign == 0 and self.logmag != -math.inf:
            object.__setattr__(self, "logmag", -math.inf)

    # construction -------------------------------------------------------
    @classmethod
    def from_float(cls, x: Number) -> "LogReal":
        x = float(x)
        if math.isnan(x):
            raise ValueError("cannot represent NaN")
        if x == 0.0:
            return cls.zero()
        return cls(1 if x > 0 else -1, math.log(abs(x)), x)

    @classmethod
    def from_log(cls, logmag: float, sign: int = 1) -> "LogReal":
        return cls(sign, logmag) if sign else cls.zero()

    @classmethod
    def zero(cls) -> "LogReal":
        return cls(0, -math.inf)

    @classmethod
    def one(cls) -> "LogReal":
        return cls(1, 0.0)

    # conversion ---------------------------------------------------------
    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        if self._exact is not None:
            return self._exact
        if self.logmag > 709.78:
            return self.sign * math.inf
        return self.sign * math.exp(self.logmag)

    __float__ = to_float

    def log10(self) -> float:
        """log10 of the magnitude (``-inf`` for zero)."""
        return self.logmag / math.log(10.0)

    def __repr__(self) -> str:
        if self.sign == 0:
            return "LogReal(0)"
        return f"LogReal({'-' if self.sign < 0 else ''}exp({self.logmag!r}))"

    # arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(other) -> "LogReal":
        if isinstance(other, LogReal):
            return other
        if isinstance(other, (int, float)):
            return LogReal.from_float(other)
        return NotImplemented

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.sign == 0 or other.sign == 0:
            return LogReal.zero()
        return LogReal(self.sign * other.sign, self.logmag + other.logmag)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.sign == 0:
            raise ZeroDivisionError("LogReal division by zero")
        if self.sign == 0:
            return LogReal.zero()
        return LogReal(self.sign * other.sign, self.logmag - other.logmag)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, exponent: Number) -> "LogReal":
        if self.sign == 0:
            if exponent > 0:
                return LogReal.zero()
            raise ZeroDivisionError("0 raised to a non-positive power")
        if self.sign < 0:
            if float(exponent).is_integer():
                sign = -1 if int(exponent) % 2 else 1
                return LogReal(sign, self.logmag * exponent)
            raise ValueError("fractional power of a negative LogReal")
        return LogReal(1, self.logmag * exponent)

    def __neg__(self) -> "LogReal":
        return LogReal(-self.sign, self.logmag, None if self._exact is None else -self._exact)

    def __abs__(self) -> "LogReal":
        return LogReal(abs(self.sign), self.logmag, None if self._exact is None else abs(self._exact))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        big, small = (self, other) if self.logmag >= other.logmag else (other, self)
        ratio = math.exp(small.logmag - big.logmag)
        if big.sign == small.sign:
            return LogReal(big.sign, big.logmag + math.log1p(ratio))
        if ratio == 1.0:
            return LogReal.zero()
        return LogReal(big.sign, big.logmag + math.log1p(-ratio))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    # ordering -----------------------------------------------------------
    def _key(self):
        if self.sign == 0:
            return (0, 0.0)
        return (self.sign, self.sign * self.logmag)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self._exact is not None and other._exact is not None:
            return self._exact == other._exact
        return self._key() == other._key()

    def __lt__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self._exact is not None and other._exact is not None:
            return self._exact < other._exact
        return self._key() < other._key()

    def __hash__(self):
        return hash(self._key())

    def rel_diff(self, other: "LogReal") -> float:
        """|self/other - 1| computed in log space; both must share a sign."""
        other = self._coerce(other)
        if self.sign == 0 and other.sign == 0:
            return 0.0
        if self.sign != other.sign:
            return math.inf
        return abs(math.expm1(self.logmag - other.logmag))


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for ``x > 0``."""
    if not x > 0:
        raise ValueError(f"log_gamma is defined here only for x > 0, got {x!r}")
    return math.lgamma(x)


def log_gamma_product(lo: int, hi: int) -> float:
    """``log(Gamma(lo) * Gamma(lo+1) * ... * Gamma(hi))`` as a running sum."""
    return math.fsum(log_gamma(j) for j in range(lo, hi + 1))


def log_factorial(n: int) -> float:
    if n < 0:
        raise ValueError("factorial of a negative number")
    return log_gamma(n + 1)


def ball_volume(k: int) -> LogReal:
    """Volume of the unit ball in R^k, ``pi^(k/2) / Gamma(k/2 + 1)``."""
    if k < 0:
        raise ValueError(f"ball dimension must be >= 0, got {k}")
    if k == 0:
        return LogReal.one()
    return LogReal(1, 0.5 * k * math.log(math.pi) - log_gamma(0.5 * k + 1.0))


def spherical_triangle_area(a: float, b: float, c: float, tol: float = 1e-14) -> float:
    """Area of a spherical triangle on the unit sphere from its side lengths.

    L'Huilier's theorem::

        tan(A/4) = sqrt(tan(s/2) tan((s-a)/2) tan((s-b)/2) tan((s-c)/2))

    with ``s`` the half perimeter.  Tangent arguments that are negative by
    less than ``tol`` are clamped to zero so flat triangles return 0.
    """
    for side in (a, b, c):
        if not 0.0 < side < math.pi:
            raise ValueError(f"side lengths must lie in (0, pi), got {(a, b, c)}")
    s = 0.5 * (a + b + c)
    halves = (0.5 * s, 0.5 * (s - a), 0.5 * (s - b), 0.5 * (s - c))
    product = 1.0
    for h in halves:
        t = math.tan(h)
        if t < 0.0:
            if t < -tol:
                raise ValueError(f"triangle inequality violated for sides {(a, b, c)}")
            t = 0.0
        product *= t
    return 4.0 * math.atan(math.sqrt(product))


class Body(enum.Enum):
    STATE_SPACE = "statespace"
    COMPLEMENTARITY_POLYTOPE = "polytope"
    SPHERICAL_CONE = "cone"


@dataclass(frozen=True)
class BodyDims:
    d: int
    D: int = field(init=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise ValueError(f"Hilbert-space dimension must be an integer >= 2, got {self.d!r}")
        object.__setattr__(self, "D", self.d * self.d - 1)


@dataclass(frozen=True)
class IntrinsicVolumeTable:
    """Normalized and unnormalized intrinsic volumes keyed by N.

    ``entries[N] = (V_N, Vtilde_N)`` with ``Vtilde_N = ball_volume(D - N) * V_N``.
    For spherical cones ``ambient`` is the cone's own dimension; otherwise it
    is ``dims.D``.
    """

    body: Body
    dims: BodyDims
    entries: Mapping[int, tuple]
    ambient: int

    def V(self, N: int) -> LogReal:
        return self.entries[N][0]

    def Vtilde(self, N: int) -> LogReal:
        return self.entries[N][1]

    def orders(self) -> list:
        return sorted(self.entries, reverse=True)


def normalize_table(raw: Mapping[int, LogReal], dims: BodyDims,
                    body: Body = Body.STATE_SPACE, ambient: int | None = None) -> IntrinsicVolumeTable:
    """Build an :class:`IntrinsicVolumeTable` from unnormalized values ``raw[N]``."""
    ambient = dims.D if ambient is None else ambient
    entries = {}
    for N, vt in raw.items():
        vt = LogReal._coerce(vt)
        if vt.sign < 0:
            raise ValueError(f"intrinsic volume for N={N} is negative")
        if not 0 <= N <= ambient:
            raise ValueError(f"order N={N} outside 0..{ambient}")
        entries[N] = (vt / ball_volume(ambient - N), vt)
    return IntrinsicVolumeTable(body=body, dims=dims, entries=entries, ambient=ambient)
