"""Truncated formal power series in one variable (hbar) with complex coefficients.

Every deformed quantity in the package is a polynomial in hbar modulo
hbar**(N+1).  Values of different truncation order never mix: arithmetic
between them raises :class:`OrderMismatch` instead of re-truncating.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Number
from typing import Iterable, Union

import numpy as np

DEFAULT_ORDER = 6
DEFAULT_TOL = 1e-12

Scalar = Union[int, float, complex, np.number]


class OrderMismatch(ValueError):
    """Raised when series of different truncation order are combined."""


class NotInvertible(ValueError):
    """Raised for exp/invert preconditions on the constant term."""


def truncated_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Cauchy product along the last axis, truncated to the length of that axis.

    ``a`` may carry leading axes; ``b`` is one-dimensional.
    """
    n = a.shape[-1]
    out = np.zeros(np.broadcast_shapes(a.shape[:-1], b.shape[:-1]) + (n,), dtype=complex)
    for i in range(n):
        bi = b[..., i : i + 1]
        if not np.any(bi):
            continue
        out[..., i:] += bi * a[..., : n - i]
    return out


class TruncatedSeries:
    """An element of C[[hbar]] / hbar**(order+1).

    Immutable; ``coeffs[j]`` multiplies ``hbar**j``.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[Scalar], order: int | None = None):
        c = np.asarray(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs, dtype=complex)
        if c.ndim != 1:
            raise ValueError("coefficients must be one-dimensional")
        if order is not None:
            if order < 0:
                raise ValueError("order must be non-negative")
            if len(c) > order + 1:
                c = c[: order + 1]
            elif len(c) < order + 1:
                c = np.concatenate([c, np.zeros(order + 1 - len(c), dtype=complex)])
        if len(c) == 0:
            raise ValueError("a series needs at least the constant coefficient")
        c = c.copy()
        c.flags.writeable = False
        self._c = c

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        return cls(np.zeros(order + 1))

    @classmethod
    def one(cls, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        return cls.const(1.0, order)

    @classmethod
    def const(cls, value: Scalar, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        c = np.zeros(order + 1, dtype=complex)
        c[0] = value
        return cls(c)

    @classmethod
    def hbar(cls, order: int = DEFAULT_ORDER, power: int = 1) -> "TruncatedSeries":
        c = np.zeros(order + 1, dtype=complex)
        if power <= order:
            c[power] = 1.0
        return cls(c)

    # -- basic accessors ----------------------------------------------------
    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def order(self) -> int:
        return len(self._c) - 1

    def __getitem__(self, j: int) -> complex:
        return complex(self._c[j])

    def valuation(self) -> int:
        """Index of the first nonzero coefficient; ``order + 1`` for the zero series."""
        nz = np.flatnonzero(self._c)
        return int(nz[0]) if len(nz) else self.order + 1

    def is_zero(self) -> bool:
        return not np.any(self._c)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self._c)))

    def allclose(self, other: "TruncatedSeries | Scalar", tol: float = DEFAULT_TOL) -> bool:
        other = self._coerce(other)
        return bool(np.all(np.abs(self._c - other._c) <= tol))

    # -- arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other.order != self.order:
                raise OrderMismatch(f"order {self.order} vs {other.order}")
            return other
        if isinstance(other, (Number, np.number, Fraction)):
            return TruncatedSeries.const(complex(other), self.order)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return TruncatedSeries(self._c + o._c)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self._c)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return TruncatedSeries(self._c - o._c)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return TruncatedSeries(o._c - self._c)

    def __mul__(self, other):
        if isinstance(other, (Number, np.number, Fraction)) and not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self._c * complex(other))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return TruncatedSeries(truncated_convolve(self._c, o._c))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (Number, np.number, Fraction)) and not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self._c / complex(other))
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.invert()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.invert()

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)):
            return NotImplemented
        if k < 0:
            return self.invert() ** (-k)
        result = TruncatedSeries.one(self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def exp(self) -> "TruncatedSeries":
        """exp of a series without constant term; the sum stops at hbar**order."""
        if self._c[0] != 0:
            raise NotInvertible("exp needs a series with zero constant term")
        out = np.zeros_like(self._c)
        out[0] = 1.0
        term = out.copy()
        for j in range(1, self.order + 1):
            term = truncated_convolve(term, self._c) / j
            if not np.any(term):
                break
            out = out + term
        return TruncatedSeries(out)

    def invert(self) -> "TruncatedSeries":
        c = self._c
        if c[0] == 0:
            raise NotInvertible("series with zero constant term has no inverse")
        out = np.zeros_like(c)
        out[0] = 1.0 / c[0]
        for j in range(1, len(c)):
            out[j] = -np.dot(c[1 : j + 1], out[j - 1 :: -1][:j]) / c[0]
        return TruncatedSeries(out)

    # -- misc ---------------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.order == other.order and bool(np.array_equal(self._c, other._c))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self):
        terms = []
        for j, v in enumerate(self._c):
            if v == 0:
                continue
            s = f"{v.real:.6g}" if v.imag == 0 else f"({v:.6g})"
            terms.append(s if j == 0 else f"{s}*h^{j}")
        return f"{type(self).__name__}({' + '.join(terms) or '0'}; N={self.order})"


class DeformationParameter(TruncatedSeries):
    """A series in the ideal hbar*C[[hbar]] (constant term exactly zero)."""

    __slots__ = ()

    def __init__(self, coeffs: Iterable[Scalar], order: int | None = None):
        super().__init__(coeffs, order)
        if self._c[0] != 0:
            raise ValueError("deformation parameter must have zero constant term")

    @classmethod
    def of(cls, s: TruncatedSeries) -> "DeformationParameter":
        return s if isinstance(s, DeformationParameter) else cls(s.coeffs)

    @classmethod
    def from_hbar_coeffs(cls, coeffs: Iterable[Scalar], order: int) -> "DeformationParameter":
        """Build theta = sum_j coeffs[j-1] hbar**j from the list of hbar**j (j>=1) coefficients."""
        return cls([0.0, *coeffs], order)


def as_parameter(theta: TruncatedSeries) -> DeformationParameter:
    if theta.coeffs[0] != 0:
        raise ValueError("deformation parameter must have zero constant term")
    return DeformationParameter.of(theta)


# Functional spellings of the ring operations.
def add(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a + b


def mul(a: TruncatedSeries, b: TruncatedSeries) -> TruncatedSeries:
    return a * b


def exp(a: TruncatedSeries) -> TruncatedSeries:
    return a.exp()


def invert(a: TruncatedSeries) -> TruncatedSeries:
    return a.invert()


def alpha(r: Union[int, Fraction, float], theta: TruncatedSeries) -> DeformationParameter:
    """The fractional-linear action theta -> theta / (1 + r theta) of the rationals on the ideal."""
    theta = as_parameter(theta)
    if r == 0:
        return theta
    # exact rational arithmetic on the (binary-exact) float coefficients, rounded once at the end;
    # keeps the group law at the last-bit level even when |r| makes the coefficients large
    r = Fraction(r)
    c = [(Fraction(v.real), Fraction(v.imag)) for v in theta.coeffs]
    N = len(c) - 1
    out = [(Fraction(0), Fraction(0))] * (N + 1)
    power = c  # theta**(j+1)
    for j in range(N):
        w = (-r) ** j
        out = [(o[0] + w * p[0], o[1] + w * p[1]) for o, p in zip(out, power)]
        nxt = [(Fraction(0), Fraction(0))] * (N + 1)
        for a in range(1, N + 1):
            pa = power[a]
            if not (pa[0] or pa[1]):
                continue
            for b in range(1, N + 1 - a):
                x = c[b]
                re, im = nxt[a + b]
                nxt[a + b] = (re + pa[0] * x[0] - pa[1] * x[1], im + pa[0] * x[1] + pa[1] * x[0])
        power = nxt
    return DeformationParameter([complex(float(re), float(im)) for re, im in out])


def random_parameter(rng: np.random.Generator, order: int, complex_coeffs: bool = True,
                     scale: float = 1.0) -> DeformationParameter:
    """A deformation parameter with independent uniform hbar**j coefficients, j >= 1."""
    c = rng.uniform(-scale, scale, order)
    if complex_coeffs:
        c = c + 1j * rng.uniform(-scale, scale, order)
    return DeformationParameter.from_hbar_coeffs(c, order)
