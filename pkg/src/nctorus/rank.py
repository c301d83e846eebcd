"""Higher-rank modules M_{c,d} over the torus and their rational-torus endomorphisms.

Sections of M_{c,d} satisfy f(x + d, y) = exp(-2 pi i c y) f(x, y).  In the
Zak picture they are stored as |c| Gaussian sums with

    f(x, y) = sum_{k in Z} f~(x + k d / c; k) exp(2 pi i k y).

The Heisenberg generators act by p = (1/sqrt(2 pi)) d/dx, q = sqrt(2 pi) (c/d) X
(Zak variable X) and t = c/d.  The endomorphisms U'f = e^{2 pi i a y} f(x + b, y) and
V'f = e^{2 pi i x / d} f generate B_{b/d}.  The basis element with key ``(m, k)`` is
e^{2 pi i theta' m k / d^2} V'^m U'^k, so that keys add under the product.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

import numpy as np

from . import gauss as G
from .gauss import GaussSum
from .series import TruncatedSeries, alpha, as_parameter, truncated_convolve
from .torus import FLAT, TorusElement

SQRT2PI = math.sqrt(2 * math.pi)
Key = Tuple[int, int]


# -- arithmetic --------------------------------------------------------------------

@dataclass(frozen=True)
class SL2ZMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(f"determinant of {self} is not 1")

    def act(self, theta: TruncatedSeries) -> TruncatedSeries:
        """Moebius action (a theta + b) / (c theta + d) on series."""
        return (theta * self.a + self.b) * (theta * self.c + self.d).invert()


def normalize(c: int, d: int) -> Tuple[int, int]:
    """M_{c,d} and M_{-c,-d} coincide; pick d >= 1."""
    if d == 0:
        raise ValueError("d must be nonzero")
    return (-c, -d) if d < 0 else (c, d)


def bezout_completion(c: int, d: int) -> SL2ZMatrix:
    """The SL(2, Z) matrix with bottom row (c, d) and 0 <= a < |c| (a = 1 when c = 0)."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if math.gcd(c, d) != 1:
        raise ValueError(f"c={c} and d={d} are not coprime")
    if c == 0:
        return SL2ZMatrix(1, 0, 0, d)
    a = pow(d, -1, abs(c)) if abs(c) > 1 else 0
    return SL2ZMatrix(a, (a * d - 1) // c, c, d)


def decompose(n: int, c: int, d: int) -> Tuple[int, int]:
    """The unique (k, m) with n = k c + m d and 1 <= k <= d."""
    g = bezout_completion(c, d)
    k0, m0 = -n * g.b, n * g.a
    k = (k0 - 1) % d + 1
    j = (k - k0) // d
    return k, m0 - j * c


def fourier_split(phi: Dict[int, complex], c: int, d: int) -> List[Dict[int, complex]]:
    """Split period-d Fourier data phi = sum_n phi_n e^{2 pi i n x / d}.

    Returns components phi_1..phi_d (period 1, as {m: coefficient}) with
    phi(x) = sum_k e^{2 pi i (c/d) k x} phi_k(x).  ``c = 0`` means the plain
    splitting into e^{2 pi i k x / d} phi_k(x).
    """
    c_eff = 1 if c == 0 else c
    parts: List[Dict[int, complex]] = [dict() for _ in range(d)]
    for n, v in phi.items():
        k, m = decompose(n, c_eff, d)
        parts[k - 1][m] = parts[k - 1].get(m, 0) + v
    return parts


def fourier_join(parts: Sequence[Dict[int, complex]], c: int, d: int) -> Dict[int, complex]:
    c_eff = 1 if c == 0 else c
    out: Dict[int, complex] = {}
    for k, part in enumerate(parts, start=1):
        for m, v in part.items():
            n = k * c_eff + m * d
            out[n] = out.get(n, 0) + v
    return out


# -- the endomorphism algebra ------------------------------------------------------

@dataclass(frozen=True)
class BElement:
    """Finite sum of basis elements ``(m, k)`` (see module docstring) with series coefficients."""

    g: SL2ZMatrix
    order: int
    coeffs: Dict[Key, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for key, c in self.coeffs.items():
            c = np.asarray(c.coeffs if isinstance(c, TruncatedSeries) else c, dtype=complex)
            if c.shape != (self.order + 1,):
                raise ValueError("coefficient arrays must have length order+1")
            if np.any(c):
                clean[(int(key[0]), int(key[1]))] = c
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def monomial(cls, g: SL2ZMatrix, key: Key, order: int, coeff: complex = 1.0) -> "BElement":
        c = np.zeros(order + 1, dtype=complex)
        c[0] = coeff
        return cls(g, order, {tuple(key): c})

    @classmethod
    def generator(cls, g: SL2ZMatrix, name: str, order: int) -> "BElement":
        return cls.monomial(g, {"U'": (0, 1), "V'": (1, 0)}[name], order)

    def _check(self, other: "BElement"):
        if other.g != self.g:
            raise ValueError("elements belong to different SL(2,Z) data")
        if other.order != self.order:
            raise ValueError("order mismatch")

    def __add__(self, other: "BElement") -> "BElement":
        self._check(other)
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out[k] + c if k in out else c
        return BElement(self.g, self.order, out)

    def __neg__(self):
        return BElement(self.g, self.order, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s: TruncatedSeries | complex) -> "BElement":
        if isinstance(s, TruncatedSeries):
            return BElement(self.g, self.order, {k: truncated_convolve(c, s.coeffs) for k, c in self.coeffs.items()})
        return BElement(self.g, self.order, {k: c * s for k, c in self.coeffs.items()})

    def coefficient(self, key: Key) -> TruncatedSeries:
        c = self.coeffs.get(tuple(key))
        return TruncatedSeries(c if c is not None else np.zeros(self.order + 1))

    def max_abs(self) -> float:
        return max((float(np.max(np.abs(c))) for c in self.coeffs.values()), default=0.0)


def b_star_mul(u: BElement, v: BElement, theta_left: TruncatedSeries) -> BElement:
    """(V'^{m1} U'^{k1}) * (V'^{m2} U'^{k2}) = e^{2 pi i (b/d) k1 m2} e^{-2 pi i theta' m1 k2 / d^2} V'^{m1+m2} U'^{k1+k2}."""
    u._check(v)
    theta_left = as_parameter(theta_left)
    g = u.g
    out: Dict[Key, np.ndarray] = {}
    for (m1, k1), c1 in u.coeffs.items():
        for (m2, k2), c2 in v.coeffs.items():
            phase = (theta_left * (-2j * math.pi * m1 * k2 / g.d**2)).exp()
            c = truncated_convolve(truncated_convolve(c1, c2), phase.coeffs)
            c = c * np.exp(2j * math.pi * g.b * k1 * m2 / g.d)
            key = (m1 + m2, k1 + k2)
            out[key] = out[key] + c if key in out else c
    return BElement(g, u.order, out)


def b_commutation_defect(g: SL2ZMatrix, theta_left: TruncatedSeries) -> TruncatedSeries:
    """V'U' coefficient of U' * V' - e^{2 pi i (theta'/d^2 + b/d)} V' * U'."""
    theta_left = as_parameter(theta_left)
    N = theta_left.order
    U = BElement.generator(g, "U'", N)
    V = BElement.generator(g, "V'", N)
    phase = (theta_left * (2j * math.pi / g.d**2)).exp() * np.exp(2j * math.pi * g.b / g.d)
    diff = b_star_mul(U, V, theta_left) - b_star_mul(V, U, theta_left).scale(phase)
    return diff.coefficient((1, 1))


def matched_parameter_defect(g: SL2ZMatrix, theta: TruncatedSeries) -> float:
    """theta'/d^2 + b/d against (a theta + b)/(c theta + d) for theta' = alpha(c/d, theta)."""
    theta = as_parameter(theta)
    tl = alpha(Fraction(g.c, g.d), theta)
    lhs = tl * (1 / g.d**2) + g.b / g.d
    return (lhs - g.act(theta)).max_abs()


def random_b_element(rng: np.random.Generator, g: SL2ZMatrix, order: int, n_terms: int = 2,
                     max_power: int = 1) -> BElement:
    coeffs: Dict[Key, np.ndarray] = {}
    for _ in range(n_terms):
        key = tuple(int(v) for v in rng.integers(-max_power, max_power + 1, 2))
        c = np.zeros(order + 1, dtype=complex)
        c[0] = rng.normal() + 1j * rng.normal()
        coeffs[key] = coeffs.get(key, 0) + c
    return BElement(g, order, coeffs)


# -- module sections ---------------------------------------------------------------

class RankSection:
    """Element of E_{c,d} in the Zak picture: one GaussSum per residue k mod |c|."""

    __slots__ = ("g", "order", "data")

    def __init__(self, g: SL2ZMatrix, data: Sequence[GaussSum]):
        if g.c == 0:
            raise ValueError("free modules (c = 0) have no Zak picture here")
        if g.d < 1:
            raise ValueError("normalize to d >= 1 first")
        data = tuple(data)
        if len(data) != abs(g.c):
            raise ValueError(f"need {abs(g.c)} residue slots, got {len(data)}")
        orders = {s.order for s in data}
        if len(orders) != 1:
            raise ValueError("all slots must share one truncation order")
        self.g = g
        self.order = orders.pop()
        self.data = data

    @classmethod
    def zero(cls, g: SL2ZMatrix, order: int) -> "RankSection":
        return cls(g, [GaussSum.zero(order)] * abs(g.c))

    @property
    def slope(self) -> float:
        return self.g.c / self.g.d

    def slot(self, k: int) -> GaussSum:
        return self.data[k % abs(self.g.c)]

    def map(self, fn) -> "RankSection":
        return RankSection(self.g, [fn(s) for s in self.data])

    def __add__(self, other: "RankSection") -> "RankSection":
        if other.g != self.g:
            raise ValueError("sections of different modules")
        return RankSection(self.g, [a + b for a, b in zip(self.data, other.data)])

    def __neg__(self):
        return self.map(lambda s: -s)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "RankSection":
        return self.map(lambda x: x.scale(s))

    def is_zero(self) -> bool:
        return all(s.is_zero() for s in self.data)


def random_rank_section(rng: np.random.Generator, g: SL2ZMatrix, order: int, n_blocks: int = 1,
                        **kw) -> RankSection:
    return RankSection(g, [G.random_gauss_sum(rng, order, n_blocks, **kw) for _ in range(abs(g.c))])


def act_p(f: RankSection) -> RankSection:
    return f.map(lambda s: G.derivative(s).scale(1 / SQRT2PI))


def act_q(f: RankSection) -> RankSection:
    return f.map(lambda s: G.mul_x(s).scale(SQRT2PI * f.slope))


def act_t(f: RankSection) -> RankSection:
    return f.scale(f.slope)


def left_monomial(key: Key, f: RankSection, theta_left: TruncatedSeries) -> RankSection:
    """Basis element (m, k) acting on f: g(X; j) = e^{2 pi i m (X - j d/c)/d} e^{-2 pi i m theta' (c X - k)/d^2} f(X - k/c; j - a k)."""
    m, k = key
    g = f.g
    a, c, d = g.a, g.c, g.d
    theta_left = as_parameter(theta_left)
    sigma = theta_left * (-2j * math.pi * m * c / d**2)
    out = []
    for j in range(abs(c)):
        s = f.slot(j - a * k)
        if m:
            s = G.formal_exp_mul(s, sigma)
        s = G.real_shift(s, k / c)
        if m:
            s = G.phase_mul(s, 2 * math.pi * m / d).scale(np.exp(-2j * math.pi * m * j / c))
        out.append(s)
    return RankSection(g, out)


def right_monomial(f: RankSection, key: Key, theta: TruncatedSeries) -> RankSection:
    """f * e^{2 pi i (m x + k y)}: g(X; j) = e^{2 pi i m (X - j d/c)} f(X - k d/c - k theta; j - k)."""
    m, k = key
    c, d = f.g.c, f.g.d
    theta = as_parameter(theta)
    out = []
    for j in range(abs(c)):
        s = f.slot(j - k)
        if k:
            s = G.formal_shift(s, theta * (-k))
        s = G.real_shift(s, k * d / c)
        if m:
            s = G.phase_mul(s, 2 * math.pi * m).scale(np.exp(-2j * math.pi * m * j * d / c))
        out.append(s)
    return RankSection(f.g, out)


def left_action(xi: BElement, f: RankSection, theta_left: TruncatedSeries) -> RankSection:
    if xi.g != f.g:
        raise ValueError("endomorphism and section belong to different modules")
    out = RankSection.zero(f.g, f.order)
    for key, c in xi.coeffs.items():
        out = out + left_monomial(key, f, theta_left).scale(TruncatedSeries(c))
    return out


def right_action(f: RankSection, a: TorusElement, theta: TruncatedSeries) -> RankSection:
    if a.realization != FLAT:
        raise ValueError("module actions use the flat realization")
    out = RankSection.zero(f.g, f.order)
    for key, c in a.coeffs.items():
        out = out + right_monomial(f, key, theta).scale(TruncatedSeries(c))
    return out


def act_left_Uprime(f: RankSection, theta_left: TruncatedSeries) -> RankSection:
    return left_monomial((0, 1), f, theta_left)


def act_left_Vprime(f: RankSection, theta_left: TruncatedSeries) -> RankSection:
    return left_monomial((1, 0), f, theta_left)


def act_right_U(f: RankSection, theta: TruncatedSeries) -> RankSection:
    return right_monomial(f, (0, 1), theta)


def act_right_V(f: RankSection, theta: TruncatedSeries) -> RankSection:
    return right_monomial(f, (1, 0), theta)


# -- function picture --------------------------------------------------------------

def _k_range(f: RankSection, xs: np.ndarray) -> range:
    lo, hi = np.inf, -np.inf
    for s in f.data:
        if s.is_zero():
            continue
        peak, radius, _ = s.peak_and_scale()
        lo, hi = min(lo, float(np.min(peak - radius))), max(hi, float(np.max(peak + radius)))
    if lo > hi:
        return range(0)
    r = f.g.c / f.g.d
    ends = [r * (lo - float(np.max(xs))), r * (hi - float(np.min(xs)))]
    return range(math.floor(min(ends)) - 1, math.ceil(max(ends)) + 2)


def rank_eval_many(f: RankSection, x, y, dy: int = 0) -> np.ndarray:
    """Values of d^dy/dy^dy f at points (x, y); shape (P, N+1)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    c, d = f.g.c, f.g.d
    out = np.zeros((len(x), f.order + 1), dtype=complex)
    for k in _k_range(f, x):
        w = np.exp(2j * math.pi * k * y) * (2j * math.pi * k) ** dy
        out += w[:, None] * f.slot(k).evaluate_many(x + k * d / c)
    return out


def bimodule_commutation_profile(xi: BElement, f: RankSection, a: TorusElement, theta: TruncatedSeries,
                   theta_left: TruncatedSeries, points) -> np.ndarray:
    """(xi *' f) * a - xi *' (f * a), max over points per hbar order."""
    left = right_action(left_action(xi, f, theta_left), a, theta)
    right = left_action(xi, right_action(f, a, theta), theta_left)
    pts = np.atleast_2d(points)
    diff = rank_eval_many(left - right, pts[:, 0], pts[:, 1])
    return np.max(np.abs(diff), axis=0)


def verify_bimodule_commutation(theta: TruncatedSeries, c: int = 3, d: int = 2, trials: int = 3, seed: int = 0,
                  points=None) -> Tuple[float, float]:
    """(matched, mismatched) defects with theta' = alpha(c/d, theta) and theta' = theta."""
    from .zak import sample_points

    theta = as_parameter(theta)
    c, d = normalize(c, d)
    g = bezout_completion(c, d)
    rng = np.random.default_rng(seed)
    pts = sample_points(seed=seed) if points is None else points
    N = theta.order
    matched = alpha(Fraction(c, d), theta)
    best = [0.0, 0.0]
    from .torus import random_element

    for _ in range(trials):
        xi = random_b_element(rng, g, N)
        f = random_rank_section(rng, g, N)
        a = random_element(rng, N, n_terms=2, max_freq=1)
        for i, tl in enumerate((matched, theta)):
            best[i] = max(best[i], float(np.max(bimodule_commutation_profile(xi, f, a, theta, tl, pts))))
    return best[0], best[1]


def _fft_components(f: RankSection, y: np.ndarray, M: int) -> np.ndarray:
    """Fourier coefficients over period d of h = e^{2 pi i (c/d) x y} f; shape (len(y), M, N+1)."""
    c, d = f.g.c, f.g.d
    xs = np.arange(M) * d / M
    X, Y = np.meshgrid(xs, y, indexing="ij")
    vals = rank_eval_many(f, X.ravel(), Y.ravel()).reshape(M, len(y), -1)
    h = vals * np.exp(2j * math.pi * (c / d) * X * Y)[..., None]
    return np.fft.fft(h, axis=0).transpose(1, 0, 2) / M


def components_at(f: RankSection, x, y, M: int = 256) -> np.ndarray:
    """f_1..f_d at points (x, y); shape (d, P, N+1)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    c, d = f.g.c, f.g.d
    coef = _fft_components(f, y, M)
    freqs = np.fft.fftfreq(M, 1.0 / M).astype(int)
    out = np.zeros((d, len(x), f.order + 1), dtype=complex)
    for idx, n in enumerate(freqs):
        k, m = decompose(int(n), c, d)
        out[k - 1] += np.exp(2j * math.pi * m * x)[:, None] * coef[:, idx]
    return out


@dataclass(frozen=True)
class BundleComponents:
    values: np.ndarray  # (d, P, N+1): f_k sampled on the grid
    shift_defect: float  # f_k(x, y+1) vs f_{k-1}(x, y), k != 1
    twist_defect: float  # f_1(x, y+1) vs e^{2 pi i c x} f_d(x, y)
    reconstruction_defect: float  # f vs e^{-2 pi i (c/d) x y} sum_k e^{2 pi i (c/d) k x} f_k


def bundle_components(f: RankSection, grid: int = 8, M: int = 256) -> BundleComponents:
    """Vector-bundle components on a grid x grid sample of [0, 1)^2 and their gluing defects."""
    c, d = f.g.c, f.g.d
    g1 = np.arange(grid) / grid
    X, Y = (a.ravel() for a in np.meshgrid(g1, g1, indexing="ij"))
    comp = components_at(f, X, Y, M)
    up = components_at(f, X, Y + 1, M)
    shift = max((float(np.max(np.abs(up[k] - comp[k - 1]))) for k in range(1, d)), default=0.0)
    twist = float(np.max(np.abs(up[0] - np.exp(2j * math.pi * c * X)[:, None] * comp[d - 1])))
    ks = np.arange(1, d + 1)
    recon = np.exp(-2j * math.pi * (c / d) * X * Y)[:, None] * np.einsum(
        "kp,kpj->pj", np.exp(2j * math.pi * (c / d) * np.outer(ks, X)), comp)
    direct = rank_eval_many(f, X, Y)
    return BundleComponents(comp, shift, twist, float(np.max(np.abs(recon - direct))))


def quasi_periodicity_defect(f: RankSection, points) -> float:
    """f(x + d, y) against e^{-2 pi i c y} f(x, y)."""
    pts = np.atleast_2d(points)
    x, y = pts[:, 0], pts[:, 1]
    lhs = rank_eval_many(f, x + f.g.d, y)
    rhs = np.exp(-2j * math.pi * f.g.c * y)[:, None] * rank_eval_many(f, x, y)
    return float(np.max(np.abs(lhs - rhs)))


def _q_values(vals: np.ndarray, dvals: np.ndarray, x: np.ndarray, slope: float) -> np.ndarray:
    """q = (-i/sqrt(2 pi)) (d/dy + 2 pi i slope x) from values and y-derivatives."""
    return (-1j / SQRT2PI) * (dvals + 2j * math.pi * slope * x[:, None] * vals)


def _values_and_dy(f, x, y):
    if isinstance(f, TorusElement):
        v = f.evaluate(x, y)
        dv = TorusElement(f.order, {k: 2j * math.pi * k[1] * c for k, c in f.coeffs.items()}).evaluate(x, y)
        return v, dv, 0.0
    return rank_eval_many(f, x, y), rank_eval_many(f, x, y, dy=1), f.slope


def leibniz_defect(f: RankSection, h: "RankSection | TorusElement", points) -> float:
    """q(f h) - q(f) h - f q(h) at ℏ-order 0 values, with the product in the slope-additive module."""
    pts = np.atleast_2d(points)
    x, y = pts[:, 0], pts[:, 1]
    fv, fdy, sf = _values_and_dy(f, x, y)
    hv, hdy, sh = _values_and_dy(h, x, y)
    conv = lambda a, b: np.array([truncated_convolve(u, v) for u, v in zip(a, b)])
    prod = conv(fv, hv)
    dprod = conv(fdy, hv) + conv(fv, hdy)
    lhs = _q_values(prod, dprod, x, sf + sh)
    rhs = conv(_q_values(fv, fdy, x, sf), hv) + conv(fv, _q_values(hv, hdy, x, sh))
    return float(np.max(np.abs(lhs - rhs)))


def inner_product(f1: RankSection, f2: RankSection) -> complex:
    """Integral of conj(f1) f2 over [0, d] x [0, 1] at hbar-order 0."""
    if f1.g != f2.g:
        raise ValueError("sections of different modules")
    total = 0j
    for s1, s2 in zip(f1.data, f2.data):
        total += G.integrate(G.pointwise_mul(G.conjugate(s1), s2))[0]
    return total
