"""Finite sums of polynomial-times-Gaussian functions on the real line.

A :class:`GaussSum` denotes

    sum_b  P_b(x - c_b) * exp(-a_b (x - c_b)**2)

where each block ``b`` has a complex center ``c_b``, a complex width ``a_b`` with
positive real part, and a polynomial ``P_b`` whose coefficients are truncated
hbar-series.  Storage is packed: ``coeffs[b, d, j]`` multiplies
``hbar**j (x - c_b)**d``.  The class is closed under products, derivatives,
translations (real and formal), multiplication by plane waves and by
polynomials, and integrates in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence

import numpy as np
from scipy.special import binom

from .series import NotInvertible, TruncatedSeries, truncated_convolve

MERGE_TOL = 1e-12
DEFAULT_TERM_CAP = 10_000


class TermCapExceeded(RuntimeError):
    """A GaussSum grew beyond its configured number of terms."""


@dataclass(frozen=True)
class GaussTerm:
    """``coeff * (x - center)**degree * exp(-width (x - center)**2)``."""

    coeff: TruncatedSeries
    degree: int
    center: complex
    width: complex

    def __post_init__(self):
        if complex(self.width).real <= 0:
            raise ValueError("Gaussian width must have positive real part")
        if self.degree < 0:
            raise ValueError("degree must be non-negative")


def _binomial_shift(P: np.ndarray, delta: np.ndarray) -> np.ndarray:
    """Re-expand ``P(u)`` as a polynomial in ``v = u - delta``, blockwise.

    ``P`` has shape (B, D+1, N+1) and ``delta`` shape (B,).
    """
    D = P.shape[1] - 1
    if D == 0 or not np.any(delta):
        return P.copy()
    d = np.arange(D + 1)
    C = binom(d[:, None], d[None, :])  # C[d, k]
    expo = d[:, None] - d[None, :]
    mask = expo >= 0
    powers = np.where(mask[None], delta[:, None, None] ** np.where(mask, expo, 0)[None], 0)
    M = C[None] * powers  # M[b, d, k] = C(d,k) delta^(d-k)
    return np.einsum("bdj,bdk->bkj", P, M)


def _poly_mul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Blockwise product of polynomials with truncated-series coefficients.

    Shapes (..., DA, N+1) and (..., DB, N+1) broadcast over leading axes.
    """
    DA, DB, n = A.shape[-2], B.shape[-2], A.shape[-1]
    lead = np.broadcast_shapes(A.shape[:-2], B.shape[:-2])
    out = np.zeros(lead + (DA + DB - 1, n), dtype=complex)
    for d1 in range(DA):
        Ad = A[..., d1, :]
        for j1 in range(n):
            a = Ad[..., j1]
            if not np.any(a):
                continue
            out[..., d1 : d1 + DB, j1:] += a[..., None, None] * B[..., :, : n - j1]
    return out


class GaussSum:
    """Immutable packed sum of polynomial-Gaussian blocks with hbar-series coefficients."""

    __slots__ = ("order", "centers", "widths", "coeffs", "term_cap")

    def __init__(self, order: int, centers=(), widths=(), coeffs=None, *,
                 term_cap: int = DEFAULT_TERM_CAP, simplify: bool = True):
        centers = np.asarray(centers, dtype=complex).reshape(-1)
        widths = np.asarray(widths, dtype=complex).reshape(-1)
        if coeffs is None:
            coeffs = np.zeros((len(centers), 1, order + 1), dtype=complex)
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 3 or coeffs.shape[0] != len(centers) or coeffs.shape[2] != order + 1:
            raise ValueError(f"bad coefficient shape {coeffs.shape}")
        if len(widths) != len(centers):
            raise ValueError("centers and widths must have equal length")
        if len(widths) and np.any(widths.real <= 0):
            raise ValueError("Gaussian width must have positive real part")
        self.order = order
        self.term_cap = term_cap
        if simplify:
            centers, widths, coeffs = _simplify(centers, widths, coeffs)
        self.centers, self.widths, self.coeffs = centers, widths, coeffs
        if self.n_terms() > term_cap:
            raise TermCapExceeded(f"{self.n_terms()} terms exceeds cap {term_cap}")
        for arr in (self.centers, self.widths, self.coeffs):
            arr.flags.writeable = False

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, order: int) -> "GaussSum":
        return cls(order)

    @classmethod
    def gaussian(cls, order: int, coeff: TruncatedSeries | complex = 1.0, center: complex = 0.0,
                 width: complex = 1.0, degree: int = 0) -> "GaussSum":
        P = np.zeros((1, degree + 1, order + 1), dtype=complex)
        if isinstance(coeff, TruncatedSeries):
            if coeff.order != order:
                raise ValueError("order mismatch")
            P[0, degree] = coeff.coeffs
        else:
            P[0, degree, 0] = coeff
        return cls(order, [center], [width], P)

    @classmethod
    def from_terms(cls, terms: Iterable[GaussTerm], order: int) -> "GaussSum":
        out = cls.zero(order)
        for t in terms:
            out = out + cls.gaussian(order, t.coeff, t.center, t.width, t.degree)
        return out

    def _like(self, centers, widths, coeffs, simplify=True) -> "GaussSum":
        return GaussSum(self.order, centers, widths, coeffs, term_cap=self.term_cap, simplify=simplify)

    # -- inspection ---------------------------------------------------------
    @property
    def n_blocks(self) -> int:
        return len(self.centers)

    def n_terms(self) -> int:
        return int(np.count_nonzero(np.any(self.coeffs != 0, axis=2)))

    @property
    def terms(self) -> List[GaussTerm]:
        out = []
        for b in range(self.n_blocks):
            for d in range(self.coeffs.shape[1]):
                c = self.coeffs[b, d]
                if np.any(c):
                    out.append(GaussTerm(TruncatedSeries(c), d, complex(self.centers[b]),
                                         complex(self.widths[b])))
        return out

    def is_zero(self) -> bool:
        return self.n_blocks == 0

    def peak_and_scale(self, tol: float = 1e-18):
        """Per-block location of the modulus peak on the real axis and decay radius below ``tol``."""
        if self.n_blocks == 0:
            return np.zeros(0), np.zeros(0), np.zeros(0)
        a, c = self.widths, self.centers
        ar, ai, ci = a.real, a.imag, c.imag
        peak = c.real - ai * ci / ar
        D = self.coeffs.shape[1] - 1
        # sup_w |w|^d exp(-ar w^2) = (d / (2 e ar))^(d/2)
        d = np.arange(D + 1)
        poly = (d[None, :] / (2 * np.e * ar[:, None])) ** (d[None, :] / 2)
        mag = np.sum(np.max(np.abs(self.coeffs), axis=2) * poly, axis=1) * np.exp(ci**2 * np.abs(a) ** 2 / ar)
        with np.errstate(divide="ignore"):
            logratio = np.maximum(np.log(np.maximum(mag, 1e-300) / tol), 0.0)
        radius = np.sqrt(logratio / ar) + 2.0 * np.sqrt((D + 1) / ar) + 1.0
        return peak, radius, mag

    def magnitude(self) -> float:
        """Upper bound for the largest block modulus on the real line."""
        if self.n_blocks == 0:
            return 0.0
        return float(np.max(self.peak_and_scale()[2]))

    def prune(self, threshold: float) -> "GaussSum":
        """Drop blocks whose modulus bound on the real line is below ``threshold``."""
        if self.n_blocks == 0:
            return self
        keep = self.peak_and_scale()[2] >= threshold
        if np.all(keep):
            return self
        return self._like(self.centers[keep], self.widths[keep], self.coeffs[keep], simplify=False)

    # -- linear structure ---------------------------------------------------
    def __add__(self, other: "GaussSum") -> "GaussSum":
        if not isinstance(other, GaussSum):
            return NotImplemented
        if other.order != self.order:
            raise ValueError("order mismatch")
        D = max(self.coeffs.shape[1], other.coeffs.shape[1])
        return GaussSum(self.order, np.concatenate([self.centers, other.centers]),
                        np.concatenate([self.widths, other.widths]),
                        np.concatenate([_pad(self.coeffs, D), _pad(other.coeffs, D)]),
                        term_cap=_cap(self, other))

    def __neg__(self) -> "GaussSum":
        return self._like(self.centers, self.widths, -self.coeffs, simplify=False)

    def __sub__(self, other: "GaussSum") -> "GaussSum":
        return self + (-other)

    def scale(self, s: TruncatedSeries | complex) -> "GaussSum":
        if isinstance(s, TruncatedSeries):
            if s.order != self.order:
                raise ValueError("order mismatch")
            return self._like(self.centers, self.widths, truncated_convolve(self.coeffs, s.coeffs))
        if s == 0:
            return GaussSum.zero(self.order)
        return self._like(self.centers, self.widths, self.coeffs * s, simplify=False)

    # -- evaluation ---------------------------------------------------------
    def evaluate_many(self, xs) -> np.ndarray:
        """Values at real points ``xs``; shape ``(len(xs), order+1)``."""
        xs = np.atleast_1d(np.asarray(xs, dtype=complex))
        if self.n_blocks == 0:
            return np.zeros((len(xs), self.order + 1), dtype=complex)
        u = xs[:, None] - self.centers[None, :]
        D = self.coeffs.shape[1]
        upow = u[..., None] ** np.arange(D)
        g = np.exp(-self.widths[None, :] * u**2)
        return np.einsum("pbd,bdj,pb->pj", upow, self.coeffs, g)

    def __call__(self, x: float) -> TruncatedSeries:
        return TruncatedSeries(self.evaluate_many([x])[0])

    def integral(self) -> TruncatedSeries:
        return integrate(self)


def _cap(*fs: GaussSum) -> int:
    """Term cap of a combination: the tightest cap among nonempty operands."""
    caps = [f.term_cap for f in fs if f.n_blocks]
    return min(caps) if caps else DEFAULT_TERM_CAP


def _pad(P: np.ndarray, D: int) -> np.ndarray:
    if P.shape[1] == D:
        return P
    out = np.zeros((P.shape[0], D, P.shape[2]), dtype=complex)
    out[:, : P.shape[1]] = P
    return out


def _simplify(centers: np.ndarray, widths: np.ndarray, coeffs: np.ndarray, tol: float = MERGE_TOL):
    """Merge blocks with equal (center, width) up to ``tol``; drop zero blocks; trim degrees."""
    if len(centers) == 0:
        return centers.copy(), widths.copy(), np.zeros((0, 1, coeffs.shape[2]), dtype=complex)
    keep = np.any(coeffs != 0, axis=(1, 2))
    centers, widths, coeffs = centers[keep], widths[keep], coeffs[keep]
    if len(centers) > 1:
        keys = np.stack([centers.real, centers.imag, widths.real, widths.imag], axis=1)
        q = np.round(keys / tol).astype(np.int64) if np.all(np.abs(keys) < 1e6) else np.round(keys / tol)
        _, first, inverse = np.unique(q, axis=0, return_index=True, return_inverse=True)
        inverse = inverse.reshape(-1)
        if len(first) < len(centers):
            rep_c, rep_w = centers[first], widths[first]
            delta = rep_c[inverse] - centers
            # recenter polynomials onto the representative block
            shifted = _binomial_shift(coeffs, delta) if np.any(delta) else coeffs
            merged = np.zeros((len(first),) + coeffs.shape[1:], dtype=complex)
            np.add.at(merged, inverse, shifted)
            centers, widths, coeffs = rep_c, rep_w, merged
            keep = np.any(coeffs != 0, axis=(1, 2))
            centers, widths, coeffs = centers[keep], widths[keep], coeffs[keep]
    if len(centers) == 0:
        return centers, widths, np.zeros((0, 1, coeffs.shape[2]), dtype=complex)
    nz = np.flatnonzero(np.any(coeffs != 0, axis=(0, 2)))
    D = int(nz[-1]) + 1 if len(nz) else 1
    return centers.copy(), widths.copy(), coeffs[:, :D].copy()


# -- operations ----------------------------------------------------------------

def simplify(f: GaussSum) -> GaussSum:
    return f._like(f.centers, f.widths, f.coeffs)


def pointwise_mul(f: GaussSum, g: GaussSum) -> GaussSum:
    """Product of two sums; Gaussian factors merge into one with width a1 + a2."""
    if f.order != g.order:
        raise ValueError("order mismatch")
    if f.n_blocks == 0 or g.n_blocks == 0:
        return GaussSum.zero(f.order)
    a1, a2 = f.widths[:, None], g.widths[None, :]
    c1, c2 = f.centers[:, None], g.centers[None, :]
    a = a1 + a2
    c = (a1 * c1 + a2 * c2) / a
    K = np.exp(-a1 * a2 * (c1 - c2) ** 2 / a)
    B1, B2 = f.n_blocks, g.n_blocks
    # P(u) with u = x - c1 = v + (c - c1); re-expand in v = x - c
    P1 = _binomial_shift(np.repeat(f.coeffs, B2, axis=0), (c - c1).reshape(-1))
    P2 = _binomial_shift(np.tile(g.coeffs, (B1, 1, 1)), (c - c2).reshape(-1))
    prod = _poly_mul(P1, P2) * K.reshape(-1)[:, None, None]
    return GaussSum(f.order, c.reshape(-1), a.reshape(-1), prod, term_cap=_cap(f, g))


def derivative(f: GaussSum) -> GaussSum:
    """d/dx [P(u) e^{-a u^2}] = (P'(u) - 2 a u P(u)) e^{-a u^2}."""
    if f.n_blocks == 0:
        return f
    P = f.coeffs
    B, D, n = P.shape
    out = np.zeros((B, D + 1, n), dtype=complex)
    if D > 1:
        out[:, : D - 1] += P[:, 1:] * np.arange(1, D)[None, :, None]
    out[:, 1:] += -2 * f.widths[:, None, None] * P
    return f._like(f.centers, f.widths, out)


def real_shift(f: GaussSum, s: float) -> GaussSum:
    """x -> f(x - s): every center moves by +s."""
    if s == 0:
        return f
    return f._like(f.centers + s, f.widths, f.coeffs, simplify=False)


def mul_x(f: GaussSum) -> GaussSum:
    """Multiply by the coordinate x = u + c."""
    if f.n_blocks == 0:
        return f
    P = f.coeffs
    out = np.zeros((P.shape[0], P.shape[1] + 1, P.shape[2]), dtype=complex)
    out[:, 1:] += P
    out[:, :-1] += f.centers[:, None, None] * P
    return f._like(f.centers, f.widths, out)


def mul_x_polynomial(f: GaussSum, poly: Sequence[TruncatedSeries | complex]) -> GaussSum:
    """Multiply by ``sum_i poly[i] x**i`` (series or scalar coefficients)."""
    n = f.order + 1
    S = np.zeros((len(poly), n), dtype=complex)
    for i, s in enumerate(poly):
        if isinstance(s, TruncatedSeries):
            S[i] = s.coeffs
        else:
            S[i, 0] = s
    if f.n_blocks == 0:
        return f
    # sum_i s_i (u + c)^i as a polynomial in u, per block
    Sb = _binomial_shift(np.broadcast_to(S, (f.n_blocks,) + S.shape).copy(), f.centers)
    return f._like(f.centers, f.widths, _poly_mul(f.coeffs, Sb))


def formal_shift(f: GaussSum, rho: TruncatedSeries, eps: TruncatedSeries | None = None) -> GaussSum:
    """f(x + rho + eps x) as the terminating Taylor sum over powers of hbar.

    ``rho`` and ``eps`` must be divisible by hbar.
    """
    N = f.order
    if eps is None:
        eps = TruncatedSeries.zero(N)
    if rho.order != N or eps.order != N:
        raise ValueError("order mismatch")
    if rho.coeffs[0] != 0 or eps.coeffs[0] != 0:
        raise NotInvertible("formal shift needs arguments divisible by hbar")
    if f.n_blocks == 0 or (rho.is_zero() and eps.is_zero()):
        return f
    B = f.n_blocks
    # shift polynomial per block: (rho + eps*c) + eps*u
    L = np.zeros((B, 2, N + 1), dtype=complex)
    L[:, 0] = rho.coeffs[None, :] + f.centers[:, None] * eps.coeffs[None, :]
    L[:, 1] = eps.coeffs[None, :]
    total = f.coeffs.copy()
    Lj = np.zeros((B, 1, N + 1), dtype=complex)
    Lj[:, 0, 0] = 1.0
    fj = f
    fact = 1.0
    for j in range(1, N + 1):
        Lj = _poly_mul(Lj, L)
        if not np.any(Lj):
            break
        fj = derivative(fj)
        if fj.n_blocks != B:
            fj = _align(fj, f)
        fact *= j
        term = _poly_mul(fj.coeffs, Lj) / fact
        D = max(total.shape[1], term.shape[1])
        total = _pad(total, D) + _pad(term, D)
    return f._like(f.centers, f.widths, total)


def _align(g: GaussSum, ref: GaussSum) -> GaussSum:
    """Rebuild ``g`` on exactly the blocks of ``ref`` (same centers and widths)."""
    out = np.zeros((ref.n_blocks, g.coeffs.shape[1], g.order + 1), dtype=complex)
    for b in range(ref.n_blocks):
        hit = np.flatnonzero((g.centers == ref.centers[b]) & (g.widths == ref.widths[b]))
        if len(hit):
            out[b] = g.coeffs[hit[0]]
    return GaussSum(g.order, ref.centers, ref.widths, out, term_cap=g.term_cap, simplify=False)


def phase_mul(f: GaussSum, beta: float) -> GaussSum:
    """Multiply by exp(i beta x), absorbed by completing the square."""
    if beta == 0 or f.n_blocks == 0:
        return f
    a, c = f.widths, f.centers
    shift = 1j * beta / (2 * a)
    factor = np.exp(1j * beta * c - beta**2 / (4 * a))
    P = _binomial_shift(f.coeffs, shift) * factor[:, None, None]
    return f._like(c + shift, a, P)


def formal_exp_mul(f: GaussSum, sigma: TruncatedSeries) -> GaussSum:
    """Multiply by exp(sigma x) expanded in powers of hbar (``sigma`` divisible by hbar)."""
    if sigma.coeffs[0] != 0:
        raise NotInvertible("formal exponential needs sigma divisible by hbar")
    if sigma.is_zero():
        return f
    poly = [TruncatedSeries.one(f.order)]
    for j in range(1, f.order + 1):
        poly.append(poly[-1] * sigma / j)
    return mul_x_polynomial(f, poly)


def _double_factorial(n: int) -> int:
    return math.prod(range(n, 0, -2)) if n > 0 else 1


def integrate(f: GaussSum) -> TruncatedSeries:
    """Integral over the real line from closed-form Gaussian moments."""
    out = np.zeros(f.order + 1, dtype=complex)
    if f.n_blocks == 0:
        return TruncatedSeries(out)
    a = f.widths
    base = np.sqrt(np.pi / a)
    for d in range(0, f.coeffs.shape[1], 2):
        moment = _double_factorial(d - 1) * (2 * a) ** (-(d // 2)) * base
        out += np.einsum("b,bj->j", moment, f.coeffs[:, d])
    return TruncatedSeries(out)


def evaluate(f: GaussSum, x: float) -> TruncatedSeries:
    return f(x)


def random_gauss_sum(rng: np.random.Generator, order: int, n_blocks: int = 2,
                     center_range: float = 0.6, width_range=(0.6, 1.6), max_degree: int = 1,
                     hbar_dependent: bool = True, complex_width: bool = False,
                     term_cap: int = DEFAULT_TERM_CAP) -> GaussSum:
    """Random test data: a few real-centered Gaussians with polynomial prefactors."""
    out = GaussSum(order, term_cap=term_cap)
    for _ in range(n_blocks):
        deg = int(rng.integers(0, max_degree + 1))
        P = np.zeros((1, deg + 1, order + 1), dtype=complex)
        ncoef = order + 1 if hbar_dependent else 1
        P[0, :, :ncoef] = (rng.normal(size=(deg + 1, ncoef)) + 1j * rng.normal(size=(deg + 1, ncoef))) / 2
        w = rng.uniform(*width_range)
        if complex_width:
            w = w + 1j * rng.uniform(-0.3, 0.3)
        out = out + GaussSum(order, [rng.uniform(-center_range, center_range)], [w], P, term_cap=term_cap)
    return out


def conjugate(f: GaussSum) -> GaussSum:
    """Complex conjugate on the real line, applied to every hbar coefficient."""
    return f._like(np.conj(f.centers), np.conj(f.widths), np.conj(f.coeffs), simplify=False)
