"""Deformed two-tori as finite Fourier series with a diagonal-phase star product.

A monomial key ``(m, k)`` always denotes the function ``exp(2 pi i (m x + k y))``.
In the flat realization this is ``V**m U**k`` with ``V = e^{2 pi i x}``,
``U = e^{2 pi i y}``; the elliptic realization exchanges the names, so there
``U = e^{2 pi i x}`` and ``V = e^{2 pi i y}``.  :func:`generator_key` hides the swap.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Tuple

import numpy as np

from .series import TruncatedSeries, as_parameter, truncated_convolve

FLAT = "flat"
ELLIPTIC = "elliptic"
SQRT2PI = math.sqrt(2 * math.pi)

Key = Tuple[int, int]


def generator_key(name: str, realization: str = FLAT) -> Key:
    if name not in ("U", "V"):
        raise ValueError(name)
    if realization == FLAT:
        return (0, 1) if name == "U" else (1, 0)
    if realization == ELLIPTIC:
        return (1, 0) if name == "U" else (0, 1)
    raise ValueError(f"unknown realization {realization!r}")


def eigenvalues(key: Key, realization: str = FLAT, tau: complex | None = None) -> Tuple[complex, complex]:
    """Eigenvalues of the vector fields p and q on the Fourier monomial ``key``."""
    m, k = key
    if realization == FLAT:
        return 1j * SQRT2PI * m, SQRT2PI * k
    s = math.sqrt(math.pi / tau.imag)
    return s * (k - m * tau.conjugate()), s * (m * tau - k)


@dataclass(frozen=True)
class TorusElement:
    """Finite Fourier series ``sum a_{mk} e^{2 pi i (m x + k y)}`` with hbar-series coefficients."""

    order: int
    coeffs: Dict[Key, np.ndarray] = field(default_factory=dict)
    realization: str = FLAT
    tau: complex | None = None

    def __post_init__(self):
        if self.realization not in (FLAT, ELLIPTIC):
            raise ValueError(f"unknown realization {self.realization!r}")
        if self.realization == ELLIPTIC:
            if self.tau is None or complex(self.tau).imag <= 0:
                raise ValueError("elliptic realization needs Im(tau) > 0")
            object.__setattr__(self, "tau", complex(self.tau))
        clean = {}
        for key, c in self.coeffs.items():
            c = np.asarray(c.coeffs if isinstance(c, TruncatedSeries) else c, dtype=complex)
            if c.shape != (self.order + 1,):
                raise ValueError("coefficient arrays must have length order+1")
            if np.any(c):
                clean[(int(key[0]), int(key[1]))] = c
        object.__setattr__(self, "coeffs", clean)

    # -- constructors -------------------------------------------------------
    @classmethod
    def monomial(cls, key: Key, order: int, coeff: TruncatedSeries | complex = 1.0,
                 realization: str = FLAT, tau: complex | None = None) -> "TorusElement":
        if isinstance(coeff, TruncatedSeries):
            c = coeff.coeffs
        else:
            c = np.zeros(order + 1, dtype=complex)
            c[0] = coeff
        return cls(order, {tuple(key): c}, realization, tau)

    @classmethod
    def generator(cls, name: str, order: int, realization: str = FLAT,
                  tau: complex | None = None) -> "TorusElement":
        return cls.monomial(generator_key(name, realization), order, 1.0, realization, tau)

    @classmethod
    def unit(cls, order: int, realization: str = FLAT, tau: complex | None = None) -> "TorusElement":
        return cls.monomial((0, 0), order, 1.0, realization, tau)

    # -- linear structure ---------------------------------------------------
    def _compatible(self, other: "TorusElement"):
        if (self.realization, self.tau) != (other.realization, other.tau):
            raise ValueError("realization mismatch")
        if self.order != other.order:
            raise ValueError("order mismatch")

    def _like(self, coeffs) -> "TorusElement":
        return TorusElement(self.order, coeffs, self.realization, self.tau)

    def __add__(self, other: "TorusElement") -> "TorusElement":
        self._compatible(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return self._like(out)

    def __neg__(self):
        return self._like({k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s: TruncatedSeries | complex) -> "TorusElement":
        if isinstance(s, TruncatedSeries):
            return self._like({k: truncated_convolve(c, s.coeffs) for k, c in self.coeffs.items()})
        return self._like({k: c * s for k, c in self.coeffs.items()})

    def coefficient(self, key: Key) -> TruncatedSeries:
        c = self.coeffs.get(tuple(key))
        return TruncatedSeries(c if c is not None else np.zeros(self.order + 1))

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(c))) for c in self.coeffs.values()), default=0.0)

    def evaluate(self, x, y) -> np.ndarray:
        """Pointwise value(s); returns an array of shape ``shape(x) + (order+1,)``."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        out = np.zeros(np.broadcast_shapes(x.shape, y.shape) + (self.order + 1,), dtype=complex)
        for (m, k), c in self.coeffs.items():
            out += np.exp(2j * np.pi * (m * x + k * y))[..., None] * c
        return out

    def apply_vector_field(self, which: str, power: int = 1) -> "TorusElement":
        """p**power or q**power acting diagonally on Fourier monomials."""
        idx = {"p": 0, "q": 1}[which]
        return self._like({
            key: c * eigenvalues(key, self.realization, self.tau)[idx] ** power
            for key, c in self.coeffs.items()
        })


def star_mul(a: TorusElement, b: TorusElement, theta: TruncatedSeries) -> TorusElement:
    """m o F_theta^{-1}: each monomial pair picks up exp(-theta lambda_p(a) lambda_q(b))."""
    a._compatible(b)
    theta = as_parameter(theta)
    if theta.order != a.order:
        raise ValueError("order mismatch")
    out: Dict[Key, np.ndarray] = {}
    lam_p = {k: eigenvalues(k, a.realization, a.tau)[0] for k in a.coeffs}
    lam_q = {k: eigenvalues(k, b.realization, b.tau)[1] for k in b.coeffs}
    for k1, c1 in a.coeffs.items():
        for k2, c2 in b.coeffs.items():
            phase = (theta * (-lam_p[k1] * lam_q[k2])).exp()
            c = truncated_convolve(truncated_convolve(c1, c2), phase.coeffs)
            key = (k1[0] + k2[0], k1[1] + k2[1])
            out[key] = out[key] + c if key in out else c
    return a._like(out)


def star_inverse_monomial(key: Key, theta: TruncatedSeries, order: int, realization: str = FLAT,
                          tau: complex | None = None) -> TorusElement:
    """The two-sided star inverse of the monomial ``key``."""
    neg = (-key[0], -key[1])
    lp = eigenvalues(key, realization, tau)[0]
    lq = eigenvalues(neg, realization, tau)[1]
    phase = (as_parameter(theta) * (lp * lq)).exp()
    return TorusElement.monomial(neg, order, phase, realization, tau)


def commutation_defect(theta: TruncatedSeries, realization: str = FLAT, tau: complex | None = None,
                       phase: TruncatedSeries | None = None) -> TruncatedSeries:
    """Coefficient of UV in ``U * V - phase V * U``; ``phase`` defaults to exp(2 pi i theta)."""
    theta = as_parameter(theta)
    N = theta.order
    U = TorusElement.generator("U", N, realization, tau)
    V = TorusElement.generator("V", N, realization, tau)
    if phase is None:
        phase = (theta * (2j * math.pi)).exp()
    diff = star_mul(U, V, theta) - star_mul(V, U, theta).scale(phase)
    return diff.coefficient((1, 1))


def associativity_defect(a: TorusElement, b: TorusElement, c: TorusElement,
                         theta: TruncatedSeries) -> float:
    left = star_mul(star_mul(a, b, theta), c, theta)
    right = star_mul(a, star_mul(b, c, theta), theta)
    return (left - right).max_abs()


def random_element(rng: np.random.Generator, order: int, n_terms: int = 3, max_freq: int = 2,
                   realization: str = FLAT, tau: complex | None = None) -> TorusElement:
    coeffs: Dict[Key, np.ndarray] = {}
    for _ in range(n_terms):
        key = tuple(int(v) for v in rng.integers(-max_freq, max_freq + 1, 2))
        c = rng.normal(size=order + 1) + 1j * rng.normal(size=order + 1)
        coeffs[key] = coeffs.get(key, 0) + c
    return TorusElement(order, coeffs, realization, tau)
