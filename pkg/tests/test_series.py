from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nctorus.series import (DeformationParameter, NotInvertible, OrderMismatch, TruncatedSeries, alpha,
                            random_parameter, truncated_convolve)

coef = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)


def series(order=5, const=coef):
    return st.tuples(const, st.lists(coef, min_size=order, max_size=order)).map(
        lambda t: TruncatedSeries([t[0], *t[1]]))


def naive_product(a, b):
    n = len(a)
    out = np.zeros(n, dtype=complex)
    for i in range(n):
        for j in range(n - i):
            out[i + j] += a[i] * b[j]
    return out


@given(series(), series())
def test_product_matches_double_loop(a, b):
    assert np.allclose((a * b).coeffs, naive_product(a.coeffs, b.coeffs), atol=1e-12)


@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert ((a * b) * c).allclose(a * (b * c), 1e-9)
    assert (a * (b + c)).allclose(a * b + a * c, 1e-9)
    assert (a * b).allclose(b * a, 1e-12)


@given(series(const=st.complex_numbers(min_magnitude=0.5, max_magnitude=3)))
def test_inverse(a):
    one = TruncatedSeries.one(a.order)
    assert (a * a.invert()).allclose(one, 1e-8)
    assert (a / a).allclose(one, 1e-8)


@given(st.lists(coef, min_size=5, max_size=5), st.lists(coef, min_size=5, max_size=5))
def test_exp_is_a_homomorphism(x, y):
    a, b = TruncatedSeries([0, *x]), TruncatedSeries([0, *y])
    assert (a + b).exp().allclose(a.exp() * b.exp(), 1e-8)


def test_exp_of_hbar():
    e = TruncatedSeries.hbar(6).exp()
    assert np.allclose(e.coeffs, [1, 1, 1 / 2, 1 / 6, 1 / 24, 1 / 120, 1 / 720])


def test_errors():
    with pytest.raises(OrderMismatch):
        TruncatedSeries.one(3) + TruncatedSeries.one(4)
    with pytest.raises(NotInvertible):
        TruncatedSeries.hbar(3).invert()
    with pytest.raises(NotInvertible):
        TruncatedSeries.one(3).exp()
    with pytest.raises(ValueError):
        DeformationParameter([1, 1], 3)


def test_truncated_convolve_last_axis():
    a = np.arange(6.0).reshape(2, 3)
    out = truncated_convolve(a, np.array([1.0, 1.0, 0.0]))
    assert np.allclose(out, [[0, 1, 3], [3, 7, 9]])


def test_power_and_scalar_mixing():
    h = TruncatedSeries.hbar(5)
    assert ((1 + h) ** 3).allclose(TruncatedSeries([1, 3, 3, 1], 5))
    assert (2 * h - h).allclose(h)


rationals = st.fractions(min_value=-6, max_value=6, max_denominator=7)


@settings(max_examples=60)
@given(rationals, rationals, st.integers(0, 2**32 - 1))
def test_alpha_group_law(j, k, seed):
    t = random_parameter(np.random.default_rng(seed), 6, scale=0.5)
    assert (alpha(j, alpha(k, t)) - alpha(j + k, t)).max_abs() < 1e-12


@given(st.integers(-5, 5), st.integers(0, 2**32 - 1))
def test_alpha_closed_form(r, seed):
    # theta / (1 + r theta) = sum_j (-r)^j theta^(j+1)
    t = random_parameter(np.random.default_rng(seed), 6)
    ref = sum(((-r) ** j) * t ** (j + 1) for j in range(7))
    assert (alpha(r, t) - ref).max_abs() < 1e-9


def test_alpha_zero_is_identity():
    t = random_parameter(np.random.default_rng(1), 6)
    assert alpha(0, t) == t
    assert alpha(Fraction(0), t) == t


def test_alpha_stays_in_the_ideal():
    t = random_parameter(np.random.default_rng(2), 4)
    assert isinstance(alpha(Fraction(3, 2), t), DeformationParameter)
    assert alpha(5, t).coeffs[0] == 0
