"""Holomorphic sector of the elliptic realization: classical theta functions.

A :class:`ThetaVector` of degree ``n > 0`` is the coefficient vector ``c`` of

    f(z, t) = exp(pi i n (t / Im tau + x y + tau y^2)) sum_k c(k mod n) q^{k^2/n} exp(2 pi i k z)

with ``q = exp(pi i tau)`` and real coordinates given by ``z = x + tau y``.
Elliptic sections are also handled in the Zak picture, where

    f(z, t) = exp(pi i n (t / Im tau + x y)) sum_k exp(2 pi i k x) f~(y + k/n; k)

and the Heisenberg generators become ``p = kappa (d/dY - 2 pi i n conj(tau) Y)``,
``q = kappa (2 pi i n tau Y - d/dY)`` with ``kappa = 1 / (2 i sqrt(pi Im tau))``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Dict, Sequence, Tuple

import numpy as np

from . import gauss as G
from .gauss import GaussSum
from .series import TruncatedSeries, as_parameter, truncated_convolve
from .zak import ZakSection

TAIL_TOL = 1e-16
EVAL_TOL = 1e-14


@dataclass(frozen=True)
class ThetaVector:
    """Coefficients ``c(k)``, ``k in Z/nZ``, of a degree-n theta function for modulus ``tau``."""

    n: int
    tau: complex
    c: Tuple[complex, ...]

    def __post_init__(self):
        if self.n <= 0:
            raise ValueError("holomorphic sections exist only in positive degree")
        tau = complex(self.tau)
        if tau.imag <= 0:
            raise ValueError("tau must lie in the upper half plane")
        c = tuple(complex(v) for v in self.c)
        if len(c) != self.n:
            raise ValueError(f"degree {self.n} needs {self.n} coefficients, got {len(c)}")
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "c", c)

    @property
    def q(self) -> complex:
        return cmath.exp(1j * math.pi * self.tau)

    def coefficient(self, k: int) -> complex:
        return self.c[k % self.n]

    def is_zero(self) -> bool:
        return not any(self.c)


def theta_product(u: ThetaVector, v: ThetaVector, tail_tol: float = TAIL_TOL) -> ThetaVector:
    """c(k) = sum_{k1 + k2 = k} c1(k1) c2(k2) q^{(k1 n2 - k2 n1)^2 / (n1 n2 (n1 + n2))}."""
    if u.tau != v.tau:
        raise ValueError("theta vectors have different moduli")
    if tail_tol <= 0:
        raise ValueError("tail_tol must be positive")
    n1, n2 = u.n, v.n
    n = n1 + n2
    denom = n1 * n2 * n
    decay = math.pi * u.tau.imag  # |q|^w = exp(-decay * w)
    # stop once the weight exponent guarantees |q|^w < tail_tol
    wmax = math.log(1 / tail_tol) / decay
    out = []
    for k in range(n):
        acc = 0j
        lo = math.floor((k * n1 - math.sqrt(wmax * denom)) / n) - 1
        hi = math.ceil((k * n1 + math.sqrt(wmax * denom)) / n) + 1
        for k1 in range(lo, hi + 1):
            E = k1 * n - k * n1
            w = E * E / denom
            if w > wmax:
                continue
            acc += u.coefficient(k1) * v.coefficient(k - k1) * cmath.exp(1j * math.pi * u.tau * w)
        out.append(acc)
    return ThetaVector(n, u.tau, tuple(out))


def real_coordinates(z, tau: complex):
    """(x, y) with z = x + tau y."""
    z = np.asarray(z, dtype=complex)
    y = z.imag / tau.imag
    return z.real - tau.real * y, y


def _k_cut(n: int, tau: complex, zs: np.ndarray, tol: float = EVAL_TOL) -> int:
    # need pi Im(tau) k^2 / n - 2 pi |k| |Im z| > log(1/tol)
    a = math.pi * tau.imag / n
    b = 2 * math.pi * float(np.max(np.abs(np.asarray(zs).imag), initial=0.0))
    c = math.log(1 / tol)
    return int(math.ceil((b + math.sqrt(b * b + 4 * a * c)) / (2 * a))) + 1


def _theta_parts(u: ThetaVector, zs, K_cut: int | None, weight_scale: Dict[int, float] | None):
    """Prefactor-free series S(z) and its z-derivative S'(z)."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    K = _k_cut(u.n, u.tau, zs) if K_cut is None else K_cut
    S = np.zeros(zs.shape, dtype=complex)
    dS = np.zeros(zs.shape, dtype=complex)
    for k in range(-K, K + 1):
        w = u.coefficient(k) * cmath.exp(1j * math.pi * u.tau * k * k / u.n)
        if weight_scale and k in weight_scale:
            w *= weight_scale[k]
        e = w * np.exp(2j * math.pi * k * zs)
        S += e
        dS += 2j * math.pi * k * e
    return S, dS


def _prefactor(n: int, tau: complex, x, y, t):
    return np.exp(1j * math.pi * n * (np.asarray(t) / tau.imag + x * y + tau * y * y))


def theta_eval_many(u: ThetaVector, zs, ts, K_cut: int | None = None,
                    weight_scale: Dict[int, float] | None = None) -> np.ndarray:
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    x, y = real_coordinates(zs, u.tau)
    S, _ = _theta_parts(u, zs, K_cut, weight_scale)
    return _prefactor(u.n, u.tau, x, y, ts) * S


def theta_eval(u: ThetaVector, z: complex, t: float = 0.0, K_cut: int | None = None) -> complex:
    return complex(theta_eval_many(u, [z], [t], K_cut)[0])


def nabla_many(u: ThetaVector, zs, ts, weight_scale: Dict[int, float] | None = None) -> np.ndarray:
    """(tau d/dx - d/dy + Im(tau) z d/dt) f by differentiating the evaluator term by term."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    tau, n = u.tau, u.n
    x, y = real_coordinates(zs, tau)
    S, dS = _theta_parts(u, zs, None, weight_scale)
    E = _prefactor(n, tau, x, y, ts)
    dx = E * (1j * math.pi * n * y * S + dS)
    dy = E * (1j * math.pi * n * (x + 2 * tau * y) * S + tau * dS)
    dt = E * (1j * math.pi * n / tau.imag) * S
    return tau * dx - dy + tau.imag * zs * dt


def elliptic_points(points: np.ndarray, tau: complex) -> Tuple[np.ndarray, np.ndarray]:
    """Map unit-cube samples (x, y, t) to (z, t) with z = x + tau y and t over one period."""
    points = np.atleast_2d(points)
    return points[:, 0] + tau * points[:, 1], points[:, 2] * 2 * tau.imag


def holomorphy_defect(u: ThetaVector, points: np.ndarray, weight_scale: Dict[int, float] | None = None) -> float:
    zs, ts = elliptic_points(points, u.tau)
    return float(np.max(np.abs(nabla_many(u, zs, ts, weight_scale)), initial=0.0))


def quasi_periodicity_defect(u: ThetaVector, points: np.ndarray,
                             weight_scale: Dict[int, float] | None = None) -> float:
    """Invariance under the lattice generators (1, 0) and (tau, 0) of the Heisenberg group."""
    tau = u.tau
    zs, ts = elliptic_points(points, tau)
    x, y = real_coordinates(zs, tau)
    f0 = theta_eval_many(u, zs, ts, weight_scale=weight_scale)
    f1 = theta_eval_many(u, zs + 1, ts - y * tau.imag, weight_scale=weight_scale)
    f2 = theta_eval_many(u, zs + tau, ts + x * tau.imag, weight_scale=weight_scale)
    return float(max(np.max(np.abs(f1 - f0)), np.max(np.abs(f2 - f0))))


# -- Zak picture -------------------------------------------------------------------

def zak_bridge(u: ThetaVector, order: int = 0) -> ZakSection:
    """f~(y; k) = c(k) exp(pi i n tau y^2), a centered Gaussian of width -pi i n tau."""
    if u.n <= 0:
        raise ValueError("only positive degrees carry holomorphic sections")
    width = -1j * math.pi * u.n * u.tau
    return ZakSection(u.n, [GaussSum.gaussian(order, c, 0.0, width) for c in u.c])


def elliptic_eval_many(f: ZakSection, tau: complex, zs, ts) -> np.ndarray:
    """Evaluate a Zak section through the elliptic bijection; shape (P, N+1)."""
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    x, y = real_coordinates(zs, tau)
    n = f.n
    out = np.zeros((len(zs), f.order + 1), dtype=complex)
    lo, hi = np.inf, -np.inf
    for g in f.data:
        if g.is_zero():
            continue
        peak, radius, _ = g.peak_and_scale()
        lo, hi = min(lo, float(np.min(peak - radius))), max(hi, float(np.max(peak + radius)))
    if lo > hi:
        return out
    ends = [n * (lo - float(np.max(y))), n * (hi - float(np.min(y)))]
    for k in range(math.floor(min(ends)) - 1, math.ceil(max(ends)) + 2):
        phase = np.exp(2j * math.pi * k * x)
        out += phase[:, None] * f.slot(k).evaluate_many(y + k / n)
    pref = np.exp(1j * math.pi * n * (ts / tau.imag + x * y))
    return pref[:, None] * out


def _kappa(tau: complex) -> complex:
    return 1 / (2j * math.sqrt(math.pi * tau.imag))


def elliptic_p(f: ZakSection, tau: complex) -> ZakSection:
    k = _kappa(tau)
    a = 2j * math.pi * f.n * tau.conjugate()
    return f.map(lambda g: (G.derivative(g) - G.mul_x(g).scale(a)).scale(k))


def elliptic_q(f: ZakSection, tau: complex) -> ZakSection:
    k = _kappa(tau)
    b = 2j * math.pi * f.n * tau
    return f.map(lambda g: (G.mul_x(g).scale(b) - G.derivative(g)).scale(k))


def elliptic_twisted_product_many(f1: ZakSection, f2: ZakSection, tau: complex, theta: TruncatedSeries,
                                  zs, ts) -> np.ndarray:
    """sum_j (-theta)^j / j! (p^j f1)(q^j f2) in the elliptic realization, at each (z, t)."""
    theta = as_parameter(theta)
    N = theta.order
    if f1.order != N or f2.order != N:
        raise ValueError("order mismatch")
    out = np.zeros((len(np.atleast_1d(zs)), N + 1), dtype=complex)
    w = TruncatedSeries.one(N)
    a, b = f1, f2
    for j in range(N + 1):
        va = elliptic_eval_many(a, tau, zs, ts)
        vb = elliptic_eval_many(b, tau, zs, ts)
        prod = np.array([truncated_convolve(r, s) for r, s in zip(va, vb)])
        out += truncated_convolve(prod, w.coeffs)
        a, b = elliptic_p(a, tau), elliptic_q(b, tau)
        w = w * (-theta) / (j + 1)
    return out


def undeformed_defect(u: ThetaVector, v: ThetaVector, theta: TruncatedSeries, points: np.ndarray) -> float:
    """sup |u *_theta v - u v| over the sample points for the bridged sections."""
    N = theta.order
    tau = u.tau
    zs, ts = elliptic_points(points, tau)
    f1, f2 = zak_bridge(u, N), zak_bridge(v, N)
    deformed = elliptic_twisted_product_many(f1, f2, tau, theta, zs, ts)
    plain = elliptic_twisted_product_many(f1, f2, tau, theta * 0, zs, ts)
    return float(np.max(np.abs(deformed - plain)))


def random_theta_vector(rng: np.random.Generator, n: int, tau: complex) -> ThetaVector:
    return ThetaVector(n, tau, tuple(rng.normal(size=n) + 1j * rng.normal(size=n)))
