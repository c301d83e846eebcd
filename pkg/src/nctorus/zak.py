"""Degree-n modules E_n in the Zak picture.

A section of degree ``n`` is stored as ``|n|`` Gaussian sums ``f~(x; k)``,
one per residue ``k mod |n|``.  The function picture on the Heisenberg
manifold is

    f(x, y, t) = sum_{k in Z} f~(x + k/n; k) exp(2 pi i (k y + n t)).

In this picture ``p = (1/sqrt(2 pi)) d/dx``, ``q = sqrt(2 pi) n x`` and ``t = n``.
Degree-zero elements are flat :class:`~nctorus.torus.TorusElement` objects
(key ``(m, k)`` is ``exp(2 pi i (m x + k y))``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np
from scipy.stats import qmc

from . import gauss as G
from .gauss import GaussSum
from .series import TruncatedSeries, alpha, as_parameter
from .torus import FLAT, TorusElement, star_mul as torus_star_mul

SQRT2PI = math.sqrt(2 * math.pi)
TAIL_TOL = 1e-16
DEFAULT_WINDOW = 6


class DegreeError(ValueError):
    """Degrees are incompatible with the requested operation."""


class ZakSection:
    """A module element of nonzero degree ``n`` with one GaussSum per residue class."""

    __slots__ = ("n", "order", "data")

    def __init__(self, n: int, data: Sequence[GaussSum]):
        if n == 0:
            raise DegreeError("degree-zero elements are TorusElement objects")
        data = tuple(data)
        if len(data) != abs(n):
            raise ValueError(f"degree {n} needs exactly {abs(n)} residue slots, got {len(data)}")
        orders = {g.order for g in data}
        if len(orders) != 1:
            raise ValueError("all slots must share one truncation order")
        self.n = int(n)
        self.order = orders.pop()
        self.data = data

    @classmethod
    def zero(cls, n: int, order: int) -> "ZakSection":
        return cls(n, [GaussSum.zero(order)] * abs(n))

    def slot(self, k: int) -> GaussSum:
        return self.data[k % abs(self.n)]

    def map(self, fn) -> "ZakSection":
        return ZakSection(self.n, [fn(g) for g in self.data])

    def _check(self, other: "ZakSection"):
        if not isinstance(other, ZakSection) or other.n != self.n:
            raise DegreeError("sections must have equal degree")

    def __add__(self, other: "ZakSection") -> "ZakSection":
        self._check(other)
        return ZakSection(self.n, [a + b for a, b in zip(self.data, other.data)])

    def __neg__(self) -> "ZakSection":
        return self.map(lambda g: -g)

    def __sub__(self, other: "ZakSection") -> "ZakSection":
        return self + (-other)

    def scale(self, s) -> "ZakSection":
        return self.map(lambda g: g.scale(s))

    def is_zero(self) -> bool:
        return all(g.is_zero() for g in self.data)

    def __repr__(self):
        blocks = sum(g.n_blocks for g in self.data)
        return f"ZakSection(n={self.n}, N={self.order}, blocks={blocks})"


Element = Union[ZakSection, TorusElement]


def degree(a: Element) -> int:
    return 0 if isinstance(a, TorusElement) else a.n


# -- Heisenberg generators -------------------------------------------------------

def act_p(f: ZakSection) -> ZakSection:
    return f.map(lambda g: G.derivative(g).scale(1 / SQRT2PI))


def act_q(f: ZakSection) -> ZakSection:
    return f.map(lambda g: G.mul_x(g).scale(SQRT2PI * f.n))


def act_t(f: ZakSection) -> ZakSection:
    return f.scale(f.n)


def act_power(name: str, f: Element, j: int) -> Element:
    """``name**j`` applied to a section or to a flat torus element."""
    if isinstance(f, TorusElement):
        if name == "t":
            return f.scale(0.0) if j else f
        return f.apply_vector_field(name, j)
    step = {"p": act_p, "q": act_q, "t": act_t}[name]
    for _ in range(j):
        f = step(f)
    return f


# -- bimodule actions ------------------------------------------------------------

def left_monomial(key: Tuple[int, int], f: ZakSection, theta_left: TruncatedSeries) -> ZakSection:
    """e^{2 pi i (m x + k y)} star f, with the star product at ``theta_left``.

    Zak picture: g(X; j) = e^{2 pi i m (X - j/n)} e^{-2 pi i theta' m n (X - k/n)} f(X - k/n; j - k).
    """
    m, k = key
    n = f.n
    theta_left = as_parameter(theta_left)
    sigma = theta_left * (-2j * math.pi * m * n)
    out = []
    for j in range(abs(n)):
        g = f.slot(j - k)
        if m:
            g = G.formal_exp_mul(g, sigma)
        g = G.real_shift(g, k / n)
        if m:
            g = G.phase_mul(g, 2 * math.pi * m).scale(np.exp(-2j * math.pi * m * j / n))
        out.append(g)
    return ZakSection(n, out)


def right_monomial(f: ZakSection, key: Tuple[int, int], theta: TruncatedSeries) -> ZakSection:
    """f star e^{2 pi i (m x + k y)}: g(X; j) = e^{2 pi i m (X - j/n)} f(X - k/n - k theta; j - k)."""
    m, k = key
    n = f.n
    theta = as_parameter(theta)
    out = []
    for j in range(abs(n)):
        g = f.slot(j - k)
        if k:
            g = G.formal_shift(g, theta * (-k))
        g = G.real_shift(g, k / n)
        if m:
            g = G.phase_mul(g, 2 * math.pi * m).scale(np.exp(-2j * math.pi * m * j / n))
        out.append(g)
    return ZakSection(n, out)


def _torus_sum(a: TorusElement, f: ZakSection, fn) -> ZakSection:
    if a.realization != FLAT:
        raise ValueError("module actions use the flat realization")
    out = ZakSection.zero(f.n, f.order)
    for key, c in a.coeffs.items():
        out = out + fn(key).scale(TruncatedSeries(c))
    return out


def left_action(a: TorusElement, f: ZakSection, theta_left: TruncatedSeries) -> ZakSection:
    return _torus_sum(a, f, lambda key: left_monomial(key, f, theta_left))


def right_action(f: ZakSection, a: TorusElement, theta: TruncatedSeries) -> ZakSection:
    return _torus_sum(a, f, lambda key: right_monomial(f, key, theta))


def act_left_U(f: ZakSection, theta_left: TruncatedSeries) -> ZakSection:
    return left_monomial((0, 1), f, theta_left)


def act_left_V(f: ZakSection, theta_left: TruncatedSeries) -> ZakSection:
    return left_monomial((1, 0), f, theta_left)


def act_right_U(f: ZakSection, theta: TruncatedSeries) -> ZakSection:
    return right_monomial(f, (0, 1), theta)


def act_right_V(f: ZakSection, theta: TruncatedSeries) -> ZakSection:
    return right_monomial(f, (1, 0), theta)


# -- graded star product ---------------------------------------------------------

def star_product_zak(f1: ZakSection, f2: ZakSection, theta: TruncatedSeries,
                     tail_tol: float = TAIL_TOL) -> ZakSection:
    """Product E_{n1} x E_{n2} -> E_{n1+n2}.

    g(x; k) = sum_{k1} f1((1 - n2 theta) x + (1 + n1 theta) D/n1; k1) f2(x - D/n2; k - k1)
    with D = k1 - k n1/n.  The k1 sum is walked outward until the Gaussian
    magnitude bound of the summands drops below ``tail_tol`` times the largest one.
    """
    n1, n2 = f1.n, f2.n
    n = n1 + n2
    if n == 0:
        raise DegreeError("opposite degrees land in degree zero; use product_into_A0")
    theta = as_parameter(theta)
    eps = theta * (-n2)
    slots = []
    for k in range(abs(n)):
        centre = int(round(k * n1 / n))
        total = GaussSum.zero(f1.order)

        def term(k1: int) -> GaussSum:
            D = k1 - k * n1 / n
            h1 = G.formal_shift(G.real_shift(f1.slot(k1), -D / n1), theta * D, eps)
            h2 = G.real_shift(f2.slot(k - k1), D / n2)
            return G.pointwise_mul(h1, h2)

        terms = [term(centre)]
        peak = terms[0].magnitude()
        for direction in (1, -1):
            k1, quiet = centre, 0
            while quiet < 2:
                k1 += direction
                t = term(k1)
                mag = t.magnitude()
                peak = max(peak, mag)
                terms.append(t)
                quiet = quiet + 1 if mag <= tail_tol * max(peak, 1e-300) else 0
                if abs(k1 - centre) > 10_000:
                    raise RuntimeError("star product window failed to converge")
        cut = tail_tol * peak
        for t in terms:
            total = total + t.prune(cut)
        slots.append(total)
    return ZakSection(n, slots)


@dataclass(frozen=True)
class A0Product:
    """Truncated degree-zero product together with its measured tail."""

    element: TorusElement
    window: int
    tail: float


def _a0_coefficients(f1: ZakSection, f2: ZakSection, theta: TruncatedSeries, rmax: int, smax: int):
    """Fourier coefficients a_{rs} of f1 * f2 for |r| <= rmax, |s| <= smax (key (s, r))."""
    n = f1.n
    theta = as_parameter(theta)
    eps = theta * n
    out = {}
    for r in range(-rmax, rmax + 1):
        parts = []
        for k in range(abs(n)):
            h1 = G.formal_shift(f1.slot(k), theta * (-r), eps)
            h2 = G.real_shift(f2.slot(r - k), r / n)
            parts.append((k, G.pointwise_mul(h1, h2)))
        for s in range(-smax, smax + 1):
            acc = np.zeros(f1.order + 1, dtype=complex)
            for k, h in parts:
                if h.is_zero():
                    continue
                val = G.integrate(G.phase_mul(h, -2 * math.pi * s)).coeffs
                acc = acc + val * np.exp(2j * math.pi * s * k / n)
            out[(s, r)] = acc
    return out


def pairing(f1: ZakSection, f2: ZakSection, theta: TruncatedSeries) -> TruncatedSeries:
    """sum_k integral f1((1 + n theta) x; k) f2(x; -k) dx for degrees n and -n."""
    if f1.n + f2.n != 0:
        raise DegreeError("pairing needs opposite degrees")
    theta = as_parameter(theta)
    total = GaussSum.zero(f1.order)
    for k in range(abs(f1.n)):
        total = total + G.pointwise_mul(G.formal_shift(f1.slot(k), theta * 0, theta * f1.n), f2.slot(-k))
    return G.integrate(total)


def pairing_coefficient(f1: ZakSection, f2: ZakSection, r: int, s: int, theta: TruncatedSeries,
                        right_parameter: TruncatedSeries | None = None) -> TruncatedSeries:
    """(f1 | f2 . (V^{-s} U^{-r})) with the right action and monomial product at ``right_parameter``.

    The default ``alpha(n, theta)`` reproduces the U^r V^s coefficient of f1 * f2;
    passing ``theta`` itself gives the unadjusted reading.
    """
    if f1.n + f2.n != 0:
        raise DegreeError("pairing needs opposite degrees")
    theta = as_parameter(theta)
    rp = alpha(f1.n, theta) if right_parameter is None else as_parameter(right_parameter)
    N = f1.order
    mono = torus_star_mul(TorusElement.monomial((-s, 0), N), TorusElement.monomial((0, -r), N), rp)
    return pairing(f1, right_action(f2, mono, rp), theta)


def product_into_A0(f1: ZakSection, f2: ZakSection, theta: TruncatedSeries,
                    window: int = DEFAULT_WINDOW, tail_margin: int = 6) -> A0Product:
    """f1 * f2 for opposite degrees as sum_{|r|,|s| <= window} a_{rs} U^r V^s.

    The tail is the summed magnitude of coefficients with window < max(|r|,|s|) <= window + tail_margin.
    """
    if f1.n + f2.n != 0:
        raise DegreeError("product_into_A0 needs opposite degrees")
    if window < 0:
        raise ValueError("window must be non-negative")
    R = window + tail_margin
    coeffs = _a0_coefficients(f1, f2, theta, R, R)
    inner, tail = {}, 0.0
    for (s, r), c in coeffs.items():
        if max(abs(r), abs(s)) <= window:
            inner[(s, r)] = c
        else:
            tail += float(np.max(np.abs(c)))
    return A0Product(TorusElement(f1.order, inner), window, tail)


def star(a: Element, b: Element, theta: TruncatedSeries, window: int = DEFAULT_WINDOW) -> Element:
    """The graded star product m o F_theta^{-1} for any pair of homogeneous elements."""
    da, db = degree(a), degree(b)
    if da == 0 and db == 0:
        return torus_star_mul(a, b, theta)
    if da == 0:
        return left_action(a, b, theta)
    if db == 0:
        return right_action(a, b, theta)
    if da + db == 0:
        return product_into_A0(a, b, theta, window).element
    return star_product_zak(a, b, theta)


# -- function picture ------------------------------------------------------------

def sample_points(count: int = 20, seed: int = 0) -> np.ndarray:
    """Scrambled Halton points in [0, 1)^3, reproducible from ``seed``."""
    return qmc.Halton(d=3, scramble=True, seed=seed).random(count)


def _k_range(f: ZakSection, xs: np.ndarray, tol: float = 1e-18) -> range:
    lo, hi = np.inf, -np.inf
    for g in f.data:
        if g.is_zero():
            continue
        peak, radius, _ = g.peak_and_scale(tol)
        lo, hi = min(lo, float(np.min(peak - radius))), max(hi, float(np.max(peak + radius)))
    if lo > hi:
        return range(0)
    ends = [f.n * (lo - float(np.max(xs))), f.n * (hi - float(np.min(xs)))]
    return range(math.floor(min(ends)) - 1, math.ceil(max(ends)) + 2)


def _field_values(f: Element, points: np.ndarray, jmax: int, which: str, K_cut: int | None = None) -> np.ndarray:
    """Values of which**j f at points for j = 0..jmax; shape (P, jmax+1, N+1)."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    x, y, t = points[:, 0], points[:, 1], points[:, 2]
    N = f.order
    out = np.zeros((len(points), jmax + 1, N + 1), dtype=complex)
    if isinstance(f, TorusElement):
        for j in range(jmax + 1):
            out[:, j] = f.apply_vector_field(which, j).evaluate(x, y) if j else f.evaluate(x, y)
        return out
    n = f.n
    ks = range(-K_cut, K_cut + 1) if K_cut is not None else _k_range(f, x)
    derivs = [list(f.data)]
    if which == "p":
        for _ in range(jmax):
            derivs.append([G.derivative(g) for g in derivs[-1]])
    for k in ks:
        phase = np.exp(2j * np.pi * (k * y + n * t))
        X = x + k / n
        if which == "p":
            for j in range(jmax + 1):
                g = derivs[j][k % abs(n)]
                out[:, j] += (phase * SQRT2PI ** (-j))[:, None] * g.evaluate_many(X)
        else:
            base = f.slot(k).evaluate_many(X) * phase[:, None]
            lam = SQRT2PI * (k + n * x)
            for j in range(jmax + 1):
                out[:, j] += (lam**j)[:, None] * base
    return out


def function_eval_many(f: Element, points, K_cut: int | None = None) -> np.ndarray:
    """Function-picture values at each (x, y, t) row; shape (P, N+1)."""
    return _field_values(f, points, 0, "p", K_cut)[:, 0]


def function_eval(f: Element, x: float, y: float, t: float, K_cut: int | None = None) -> TruncatedSeries:
    return TruncatedSeries(function_eval_many(f, [[x, y, t]], K_cut)[0])


def direct_twisted_product_many(f1: Element, f2: Element, theta: TruncatedSeries, points) -> np.ndarray:
    """sum_j (-theta)^j / j! (p^j f1)(q^j f2), evaluated analytically at each point."""
    theta = as_parameter(theta)
    N = theta.order
    P = _field_values(f1, points, N, "p")
    Q = _field_values(f2, points, N, "q")
    out = np.zeros((P.shape[0], N + 1), dtype=complex)
    w = TruncatedSeries.one(N)
    for j in range(N + 1):
        prod = np.array([G.truncated_convolve(a, b) for a, b in zip(P[:, j], Q[:, j])])
        out += G.truncated_convolve(prod, w.coeffs)
        w = w * (-theta) / (j + 1)
    return out


def direct_twisted_product(f1: Element, f2: Element, theta: TruncatedSeries, point) -> TruncatedSeries:
    return TruncatedSeries(direct_twisted_product_many(f1, f2, theta, [point])[0])


# -- identities ------------------------------------------------------------------

def defect_profile(a: Element, b: Element, points) -> np.ndarray:
    """max over points of |a - b| per hbar order."""
    diff = function_eval_many(a, points) - function_eval_many(b, points)
    return np.max(np.abs(diff), axis=0)


def relative_defect(values: np.ndarray, reference: np.ndarray) -> float:
    """sup |values - reference| / sup |reference| over all points and hbar orders."""
    scale = float(np.max(np.abs(reference)))
    return float(np.max(np.abs(values - reference))) / (scale if scale > 0 else 1.0)


def leading_order(profile: np.ndarray, threshold: float = 1e-9) -> int | None:
    hits = np.flatnonzero(np.asarray(profile) > threshold)
    return int(hits[0]) if len(hits) else None


def generalized_associativity_profile(a: Element, b: ZakSection, c: Element, theta: TruncatedSeries,
                                      points, theta_left: TruncatedSeries | None = None) -> np.ndarray:
    """(a *_{theta'} b) *_theta c - a *_{theta'} (b *_theta c) with theta' = alpha(deg b, theta) by default."""
    theta = as_parameter(theta)
    n = degree(b)
    tl = alpha(n, theta) if theta_left is None else as_parameter(theta_left)
    da, dc = degree(a), degree(c)
    if (da and da + n == 0) or (dc and n + dc == 0) or (da and dc and da + n + dc == 0):
        raise DegreeError("a product of two sections lands in degree zero")
    left = star(star(a, b, tl), c, theta)
    right = star(a, star(b, c, theta), tl)
    return defect_profile(left, right, points)


def verify_generalized_associativity(a: Element, b: ZakSection, c: Element, theta: TruncatedSeries,
                                     points=None, theta_left: TruncatedSeries | None = None) -> float:
    points = sample_points() if points is None else points
    return float(np.max(generalized_associativity_profile(a, b, c, theta, points, theta_left)))


def quasi_associativity_profile(f1: ZakSection, f2: ZakSection, f3: ZakSection, theta: TruncatedSeries,
                                points, with_coassociator: bool = True) -> np.ndarray:
    """(f1 * f2) * f3 against (f1 * (f2 * f3)) o exp(theta^2 p x t x q)."""
    theta = as_parameter(theta)
    for d in (f1.n + f2.n, f2.n + f3.n, f1.n + f2.n + f3.n):
        if d == 0:
            raise DegreeError("quasi-associativity check needs nonzero partial degrees")
    left = star(star(f1, f2, theta), f3, theta)
    N = theta.order
    if not with_coassociator:
        right = star(f1, star(f2, f3, theta), theta)
        return defect_profile(left, right, points)
    lam = theta * theta * f2.n
    w = TruncatedSeries.one(N)
    right_vals = np.zeros((len(points), N + 1), dtype=complex)
    p1, q3 = f1, f3
    for j in range(N // 2 + 1):
        vals = function_eval_many(star(p1, star(f2, q3, theta), theta), points)
        right_vals += G.truncated_convolve(vals, w.coeffs)
        p1, q3 = act_p(p1), act_q(q3)
        w = w * lam / (j + 1)
    return np.max(np.abs(function_eval_many(left, points) - right_vals), axis=0)


def verify_quasi_associativity(f1: ZakSection, f2: ZakSection, f3: ZakSection, theta: TruncatedSeries,
                               points=None, with_coassociator: bool = True) -> float:
    points = sample_points() if points is None else points
    return float(np.max(quasi_associativity_profile(f1, f2, f3, theta, points, with_coassociator)))


def factorized_star(f1: ZakSection, f2: ZakSection, theta: TruncatedSeries) -> ZakSection:
    """sum_j (-theta)^j / j! (p^j f1) *_0 (q^j f2): the twist applied before the undeformed product."""
    theta = as_parameter(theta)
    N = theta.order
    zero = theta * 0
    out = ZakSection.zero(f1.n + f2.n, N)
    w = TruncatedSeries.one(N)
    a, b = f1, f2
    for j in range(N + 1):
        out = out + star_product_zak(a, b, zero).scale(w)
        a, b = act_p(a), act_q(b)
        w = w * (-theta) / (j + 1)
    return out


def random_section(rng: np.random.Generator, n: int, order: int, n_blocks: int = 1, **kw) -> ZakSection:
    return ZakSection(n, [G.random_gauss_sum(rng, order, n_blocks, **kw) for _ in range(abs(n))])
