"""Tensor powers of the enveloping algebra of the Heisenberg Lie algebra.

Generators ``p, q, t`` with ``[p, q] = t`` and ``t`` central.  A monomial on one
leg is stored as the exponent triple ``(b, a, c)`` of the normal-ordered word
``t**c q**b p**a``.  A :class:`TensorElement` is a finite map from ``L``-tuples of
such triples to truncated hbar-series (coefficient arrays of length N+1).
"""
from __future__ import annotations

from functools import lru_cache
from itertools import product as cartesian
from math import comb, factorial
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np

from .series import DeformationParameter, NotInvertible, TruncatedSeries, as_parameter

Mono = Tuple[int, int, int]  # (q-exponent b, p-exponent a, t-exponent c)
Key = Tuple[Mono, ...]

ONE: Mono = (0, 0, 0)
P: Mono = (0, 1, 0)
Q: Mono = (1, 0, 0)
T: Mono = (0, 0, 1)
GENERATORS = {"p": P, "q": Q, "t": T}
MAX_LEGS = 4


@lru_cache(maxsize=None)
def reorder_pq(a: int, b: int) -> Tuple[Tuple[int, int, int, int], ...]:
    """p**a q**b = sum_k C(a,k) C(b,k) k! q**(b-k) t**k p**(a-k); returns (coef, b-k, a-k, k)."""
    return tuple(
        (comb(a, k) * comb(b, k) * factorial(k), b - k, a - k, k) for k in range(min(a, b) + 1)
    )


@lru_cache(maxsize=None)
def mono_product(m1: Mono, m2: Mono) -> Tuple[Tuple[Mono, int], ...]:
    """Normal form of the product of two single-leg monomials, integer coefficients."""
    b1, a1, c1 = m1
    b2, a2, c2 = m2
    return tuple(
        ((b1 + bb, aa + a2, c1 + c2 + k), coef) for coef, bb, aa, k in reorder_pq(a1, b2)
    )


@lru_cache(maxsize=None)
def mono_coproduct(m: Mono) -> Tuple[Tuple[Mono, Mono, int], ...]:
    """Delta(t^c q^b p^a) with p, q, t primitive; the result is already normal ordered."""
    b, a, c = m
    out = []
    for c1 in range(c + 1):
        for b1 in range(b + 1):
            for a1 in range(a + 1):
                coef = comb(c, c1) * comb(b, b1) * comb(a, a1)
                out.append(((b1, a1, c1), (b - b1, a - a1, c - c1), coef))
    return tuple(out)


def _valuation(c: np.ndarray) -> int:
    nz = np.flatnonzero(c)
    return int(nz[0]) if len(nz) else len(c)


class TensorElement:
    """Element of U(h3)^{(x)L}[[hbar]] mod hbar^(N+1), ``1 <= L <= 4``."""

    __slots__ = ("legs", "order", "terms")

    def __init__(self, legs: int, order: int, terms: Dict[Key, np.ndarray] | None = None):
        if not 1 <= legs <= MAX_LEGS:
            raise ValueError(f"leg count must be in 1..{MAX_LEGS}, got {legs}")
        self.legs = legs
        self.order = order
        clean: Dict[Key, np.ndarray] = {}
        for key, c in (terms or {}).items():
            if len(key) != legs:
                raise ValueError("monomial tuple length does not match leg count")
            c = np.asarray(c, dtype=complex)
            if c.shape != (order + 1,):
                raise ValueError("coefficient arrays must have length order+1")
            if np.any(c):
                clean[key] = c
        self.terms = clean

    # -- constructors -------------------------------------------------------
    @classmethod
    def unit(cls, legs: int, order: int) -> "TensorElement":
        c = np.zeros(order + 1, dtype=complex)
        c[0] = 1
        return cls(legs, order, {(ONE,) * legs: c})

    @classmethod
    def zero(cls, legs: int, order: int) -> "TensorElement":
        return cls(legs, order)

    @classmethod
    def monomial(cls, monos: Sequence[Mono | str], coeff: TruncatedSeries | complex = 1.0,
                 order: int | None = None) -> "TensorElement":
        """``monomial(["p", "q"], theta)`` is ``theta * p (x) q``; strings name generators."""
        key = tuple(GENERATORS[m] if isinstance(m, str) else tuple(m) for m in monos)
        if isinstance(coeff, TruncatedSeries):
            order = coeff.order
            c = np.array(coeff.coeffs)
        else:
            if order is None:
                raise ValueError("order required for scalar coefficients")
            c = np.zeros(order + 1, dtype=complex)
            c[0] = coeff
        return cls(len(key), order, {key: c})

    # -- linear structure ---------------------------------------------------
    def _check(self, other: "TensorElement"):
        if other.legs != self.legs:
            raise ValueError(f"leg-count mismatch: {self.legs} vs {other.legs}")
        if other.order != self.order:
            raise ValueError(f"order mismatch: {self.order} vs {other.order}")

    def __add__(self, other: "TensorElement") -> "TensorElement":
        self._check(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            terms[k] = terms[k] + c if k in terms else c
        return TensorElement(self.legs, self.order, terms)

    def __neg__(self) -> "TensorElement":
        return TensorElement(self.legs, self.order, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-other)

    def scale(self, s: TruncatedSeries | complex) -> "TensorElement":
        if isinstance(s, TruncatedSeries):
            if s.order != self.order:
                raise ValueError("order mismatch")
            from .series import truncated_convolve

            return TensorElement(self.legs, self.order,
                                 {k: truncated_convolve(c, s.coeffs) for k, c in self.terms.items()})
        return TensorElement(self.legs, self.order, {k: c * s for k, c in self.terms.items()})

    def __mul__(self, other: "TensorElement") -> "TensorElement":
        return normal_order_product(self, other)

    # -- inspection ---------------------------------------------------------
    def coefficient(self, monos: Sequence[Mono | str]) -> TruncatedSeries:
        key = tuple(GENERATORS[m] if isinstance(m, str) else tuple(m) for m in monos)
        c = self.terms.get(key)
        return TruncatedSeries(c if c is not None else np.zeros(self.order + 1))

    def max_abs(self) -> float:
        if not self.terms:
            return 0.0
        return float(max(np.max(np.abs(c)) for c in self.terms.values()))

    def order_profile(self) -> np.ndarray:
        """Largest coefficient magnitude at each power of hbar."""
        prof = np.zeros(self.order + 1)
        for c in self.terms.values():
            prof = np.maximum(prof, np.abs(c))
        return prof

    def __repr__(self):
        return f"TensorElement(legs={self.legs}, N={self.order}, {len(self.terms)} terms)"


def normal_order_product(u: TensorElement, v: TensorElement) -> TensorElement:
    """Legwise product reduced to normal form, truncated at hbar**N."""
    u._check(v)
    N = u.order
    out: Dict[Key, np.ndarray] = {}
    vterms = [(k, c, _valuation(c)) for k, c in v.terms.items()]
    for k1, c1 in u.terms.items():
        v1 = _valuation(c1)
        for k2, c2, v2 in vterms:
            if v1 + v2 > N:
                continue
            cc = np.zeros(N + 1, dtype=complex)
            for i in range(v1, N + 1 - v2):
                cc[i + v2 :] += c1[i] * c2[v2 : N + 1 - i]
            per_leg = [mono_product(a, b) for a, b in zip(k1, k2)]
            for combo in cartesian(*per_leg):
                key = tuple(m for m, _ in combo)
                coef = 1
                for _, n in combo:
                    coef *= n
                if key in out:
                    out[key] = out[key] + coef * cc
                else:
                    out[key] = coef * cc
    return TensorElement(u.legs, N, out)


def coproduct(u: TensorElement, leg: int) -> TensorElement:
    """Apply Delta to leg ``leg`` (0-based); the two halves occupy legs ``leg, leg+1``."""
    if u.legs >= MAX_LEGS:
        raise ValueError("coproduct would exceed four legs")
    if not 0 <= leg < u.legs:
        raise IndexError(leg)
    out: Dict[Key, np.ndarray] = {}
    for key, c in u.terms.items():
        for m1, m2, coef in mono_coproduct(key[leg]):
            nk = key[:leg] + (m1, m2) + key[leg + 1 :]
            out[nk] = out[nk] + coef * c if nk in out else coef * c
    return TensorElement(u.legs + 1, u.order, out)


def counit(u: TensorElement, leg: int) -> TensorElement:
    """Apply epsilon to one leg: the identity monomial goes to 1, everything else to 0."""
    if u.legs < 2:
        raise ValueError("counit needs at least two legs; use counit_scalar for one leg")
    out: Dict[Key, np.ndarray] = {}
    for key, c in u.terms.items():
        if key[leg] == ONE:
            nk = key[:leg] + key[leg + 1 :]
            out[nk] = out[nk] + c if nk in out else c
    return TensorElement(u.legs - 1, u.order, out)


def counit_scalar(u: TensorElement) -> TruncatedSeries:
    """epsilon on a one-leg element."""
    if u.legs != 1:
        raise ValueError("expected a one-leg element")
    c = u.terms.get((ONE,))
    return TruncatedSeries(c if c is not None else np.zeros(u.order + 1))


def embed(u: TensorElement, positions: Sequence[int], legs: int) -> TensorElement:
    """Place leg i of ``u`` at ``positions[i]`` among ``legs`` legs, filling the rest with 1."""
    if len(positions) != u.legs or len(set(positions)) != len(positions):
        raise ValueError("positions must be distinct, one per leg")
    out = {}
    for key, c in u.terms.items():
        nk = [ONE] * legs
        for pos, m in zip(positions, key):
            nk[pos] = m
        out[tuple(nk)] = c
    return TensorElement(legs, u.order, out)


def specialize_central(u: TensorElement, leg: int, value: complex) -> TensorElement:
    """Let ``t`` act on one leg by the scalar ``value`` (t^c -> value^c), keeping p, q symbolic."""
    out: Dict[Key, np.ndarray] = {}
    for key, c in u.terms.items():
        b, a, cc = key[leg]
        nk = key[:leg] + ((b, a, 0),) + key[leg + 1 :]
        w = c * (value ** cc)
        out[nk] = out[nk] + w if nk in out else w
    return TensorElement(u.legs, u.order, out)


def _constant_part(u: TensorElement) -> complex:
    """hbar^0 coefficient of the unit monomial; raises if other monomials appear at hbar^0."""
    unit_key = (ONE,) * u.legs
    for key, c in u.terms.items():
        if key != unit_key and c[0] != 0:
            raise NotInvertible("hbar^0 part is not a multiple of the unit")
    c = u.terms.get(unit_key)
    return complex(c[0]) if c is not None else 0.0


def exp_tensor(u: TensorElement) -> TensorElement:
    """sum_j u^j / j! for ``u`` with every coefficient divisible by hbar."""
    for c in u.terms.values():
        if c[0] != 0:
            raise NotInvertible("exp_tensor needs coefficients with zero constant term")
    result = TensorElement.unit(u.legs, u.order)
    term = result
    for j in range(1, u.order + 1):
        term = normal_order_product(term, u).scale(1.0 / j)
        if not term.terms:
            break
        result = result + term
    return result


def inverse(u: TensorElement) -> TensorElement:
    """Inverse of ``c (1 + x)`` with ``x`` divisible by hbar, by the geometric series."""
    c0 = _constant_part(u)
    if c0 == 0:
        raise NotInvertible("constant part vanishes")
    x = u.scale(1.0 / c0) - TensorElement.unit(u.legs, u.order)
    result = TensorElement.unit(u.legs, u.order)
    term = result
    for _ in range(u.order):
        term = -normal_order_product(term, x)
        if not term.terms:
            break
        result = result + term
    return result.scale(1.0 / c0)


# -- twist and coassociator ----------------------------------------------------

def build_twist(theta: TruncatedSeries) -> TensorElement:
    """F_theta = exp(theta p (x) q)."""
    theta = as_parameter(theta)
    return exp_tensor(TensorElement.monomial(["p", "q"], theta))


def build_twist_inverse(theta: TruncatedSeries) -> TensorElement:
    theta = as_parameter(theta)
    return exp_tensor(TensorElement.monomial(["p", "q"], -theta))


def coassociator_exponent(theta: TruncatedSeries, theta2: TruncatedSeries) -> TensorElement:
    """-p (x) (theta - theta2 - theta*theta2 t) (x) q."""
    theta, theta2 = as_parameter(theta), as_parameter(theta2)
    return (TensorElement.monomial(["p", ONE, "q"], -(theta - theta2))
            + TensorElement.monomial(["p", "t", "q"], theta * theta2))


def build_coassociator(theta: TruncatedSeries, theta2: TruncatedSeries | None = None) -> TensorElement:
    """Phi_{theta, theta2}; with one argument, the coassociator Phi_{theta, theta}."""
    if theta2 is None:
        theta2 = theta
    return exp_tensor(coassociator_exponent(theta, theta2))


def twisted_coproduct(u: TensorElement, leg: int, twist: TensorElement,
                      twist_inv: TensorElement | None = None) -> TensorElement:
    """Delta_F on one leg: F_{leg,leg+1} (Delta on leg) F^{-1}_{leg,leg+1}."""
    if twist_inv is None:
        twist_inv = inverse(twist)
    legs = u.legs + 1
    f = embed(twist, (leg, leg + 1), legs)
    finv = embed(twist_inv, (leg, leg + 1), legs)
    return f * coproduct(u, leg) * finv


def generator(name: str, order: int) -> TensorElement:
    return TensorElement.monomial([name], 1.0, order=order)


# -- identity checks -----------------------------------------------------------

def defect(a: TensorElement, b: TensorElement) -> float:
    return (a - b).max_abs()


def twist_composition_sides(theta: TruncatedSeries, theta2: TruncatedSeries,
                  phi: TensorElement | None = None) -> Tuple[TensorElement, TensorElement]:
    """Both sides of the twist-cocycle relation relating F_theta, F_theta2 and Phi_{theta,theta2}.

    LHS = (Delta (x) id)(F_theta^-1) (F_theta2^-1 (x) 1)
    RHS = (id (x) Delta)(F_theta2^-1) (1 (x) F_theta^-1) Phi
    """
    fi = build_twist_inverse(theta)
    fi2 = build_twist_inverse(theta2)
    if phi is None:
        phi = build_coassociator(theta, theta2)
    lhs = coproduct(fi, 0) * embed(fi2, (0, 1), 3)
    rhs = coproduct(fi2, 1) * embed(fi, (1, 2), 3) * phi
    return lhs, rhs


def verify_twist_composition(theta: TruncatedSeries, theta2: TruncatedSeries,
                   phi: TensorElement | None = None) -> float:
    lhs, rhs = twist_composition_sides(theta, theta2, phi)
    return defect(lhs, rhs)


def twisted_coassociator(theta: TruncatedSeries) -> TensorElement:
    """F_23 F_1(23) (F^-1)_(12)3 (F^-1)_12 built from the twist of the trivial coassociator."""
    f = build_twist(theta)
    fi = build_twist_inverse(theta)
    return (embed(f, (1, 2), 3) * coproduct(f, 1)
            * coproduct(fi, 0) * embed(fi, (0, 1), 3))


def pentagon_sides(theta: TruncatedSeries, twisted: bool = True,
                   phi: TensorElement | None = None) -> Tuple[TensorElement, TensorElement]:
    """Phi_{12(34)} Phi_{(12)34} and Phi_{234} Phi_{1(23)4} Phi_{123} in four legs."""
    if phi is None:
        phi = build_coassociator(theta)
    if twisted:
        f = build_twist(theta)
        fi = build_twist_inverse(theta)

        def delta(u, leg):
            return twisted_coproduct(u, leg, f, fi)
    else:
        delta = coproduct
    lhs = delta(phi, 2) * delta(phi, 0)
    rhs = embed(phi, (1, 2, 3), 4) * delta(phi, 1) * embed(phi, (0, 1, 2), 4)
    return lhs, rhs


def verify_pentagon(theta: TruncatedSeries, twisted: bool = True) -> float:
    lhs, rhs = pentagon_sides(theta, twisted)
    return defect(lhs, rhs)


def verify_counitality(theta: TruncatedSeries, theta2: TruncatedSeries | None = None) -> float:
    phi = build_coassociator(theta, theta2)
    return defect(counit(phi, 1), TensorElement.unit(2, phi.order))


def verify_twist_counitality(theta: TruncatedSeries) -> float:
    """max defect of (id (x) eps)(F) = 1 = (eps (x) id)(F)."""
    f = build_twist(theta)
    one = TensorElement.unit(1, f.order)
    return max(defect(counit(f, 0), one), defect(counit(f, 1), one))


def quasi_coassoc_sides(h: str, theta: TruncatedSeries) -> Tuple[TensorElement, TensorElement]:
    """(id (x) Delta_F) Delta_F (h) and Phi (Delta_F (x) id) Delta_F (h) Phi^-1."""
    N = theta.order
    f = build_twist(theta)
    fi = build_twist_inverse(theta)
    phi = build_coassociator(theta)
    phi_inv = build_coassociator_inverse(theta)
    d1 = twisted_coproduct(generator(h, N), 0, f, fi)
    lhs = twisted_coproduct(d1, 1, f, fi)
    rhs = phi * twisted_coproduct(d1, 0, f, fi) * phi_inv
    return lhs, rhs


def build_coassociator_inverse(theta: TruncatedSeries, theta2: TruncatedSeries | None = None) -> TensorElement:
    if theta2 is None:
        theta2 = theta
    return exp_tensor(-coassociator_exponent(theta, theta2))


def verify_quasi_coassoc(h: str, theta: TruncatedSeries) -> float:
    if h not in GENERATORS:
        raise ValueError(f"generator must be one of p, q, t; got {h!r}")
    lhs, rhs = quasi_coassoc_sides(h, theta)
    return defect(lhs, rhs)


def coassociator_matched_defect(theta: TruncatedSeries, n: int) -> float:
    """Phi_{theta, alpha_n(theta)} with t -> n on the middle leg, compared with the unit."""
    from .series import alpha

    phi = build_coassociator(theta, alpha(n, theta))
    return defect(specialize_central(phi, 1, n), TensorElement.unit(3, theta.order))


def schroedinger_action(u: TensorElement, poly: np.ndarray) -> np.ndarray:
    """Act with a one-leg element on a polynomial in u via p = d/du, q = u, t = 1.

    ``poly`` has shape (deg+1, N+1): polynomial coefficients with hbar-series entries.
    Serves as an independent check of the reordering formula.
    """
    from .series import truncated_convolve

    if u.legs != 1:
        raise ValueError("one-leg element expected")
    N = u.order
    out = np.zeros((poly.shape[0] + 64, N + 1), dtype=complex)
    for (m,), c in u.terms.items():
        b, a, _c = m
        w = poly.copy()
        for _ in range(a):
            w = np.array([(i + 1) * w[i + 1] for i in range(len(w) - 1)] or [np.zeros(N + 1)])
        shifted = np.zeros((len(w) + b, N + 1), dtype=complex)
        shifted[b:] = w
        out[: len(shifted)] += truncated_convolve(shifted, c)
    last = np.flatnonzero(np.any(out != 0, axis=1))
    return out[: (last[-1] + 1 if len(last) else 1)]
