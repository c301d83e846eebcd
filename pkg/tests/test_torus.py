import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nctorus import torus
from nctorus.series import DeformationParameter, TruncatedSeries, random_parameter, truncated_convolve
from nctorus.torus import ELLIPTIC, FLAT, TorusElement

TAU = 0.3 + 1.1j


def bidifferential_oracle(a, b, theta, x, y):
    """sum_j (-theta)^j / j! (p^j a)(q^j b) evaluated pointwise."""
    N = theta.order
    out = np.zeros(x.shape + (N + 1,), dtype=complex)
    w = TruncatedSeries.one(N)
    for j in range(N + 1):
        pa = a.apply_vector_field("p", j).evaluate(x, y)
        qb = b.apply_vector_field("q", j).evaluate(x, y)
        out += truncated_convolve(truncated_convolve(pa, qb), w.coeffs)
        w = w * (-theta) / (j + 1)
    return out


@pytest.mark.parametrize("realization,tau", [(FLAT, None), (ELLIPTIC, TAU)])
def test_star_matches_bidifferential_series(realization, tau):
    rng = np.random.default_rng(5)
    theta = random_parameter(rng, 5, scale=0.3)
    a = torus.random_element(rng, 5, 3, 2, realization, tau)
    b = torus.random_element(rng, 5, 3, 2, realization, tau)
    x, y = rng.random(20), rng.random(20)
    got = torus.star_mul(a, b, theta).evaluate(x, y)
    ref = bidifferential_oracle(a, b, theta, x, y)
    assert np.max(np.abs(got - ref)) / np.max(np.abs(ref)) < 1e-12


@pytest.mark.parametrize("realization,tau", [(FLAT, None), (ELLIPTIC, TAU)])
def test_commutation_relation(realization, tau):
    for seed in range(5):
        theta = random_parameter(np.random.default_rng(seed), 6, scale=0.5)
        assert torus.commutation_defect(theta, realization, tau).max_abs() < 1e-12


def test_wrong_phase_is_detected():
    theta = TruncatedSeries.hbar(6)
    wrong = (theta * (-2j * math.pi)).exp()
    assert torus.commutation_defect(DeformationParameter.of(theta), phase=wrong).max_abs() > 1


def test_generators_follow_realization():
    assert torus.generator_key("U") == (0, 1)
    assert torus.generator_key("U", ELLIPTIC) == (1, 0)
    with pytest.raises(ValueError):
        TorusElement(2, {}, ELLIPTIC, -1j)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_associativity(seed):
    rng = np.random.default_rng(seed)
    theta = random_parameter(rng, 4)
    a, b, c = (torus.random_element(rng, 4, 3, 1) for _ in range(3))
    scale = max(1.0, torus.star_mul(torus.star_mul(a, b, theta), c, theta).max_abs())
    assert torus.associativity_defect(a, b, c, theta) / scale < 1e-10


def test_associativity_elliptic():
    rng = np.random.default_rng(9)
    theta = random_parameter(rng, 4, scale=0.3)
    a, b, c = (torus.random_element(rng, 4, 2, 1, ELLIPTIC, TAU) for _ in range(3))
    assert torus.associativity_defect(a, b, c, theta) < 1e-10


def test_monomial_inverse_and_unit():
    theta = random_parameter(np.random.default_rng(4), 5)
    one = TorusElement.unit(5)
    for key in [(1, 0), (0, 1), (2, -3)]:
        m = TorusElement.monomial(key, 5)
        inv = torus.star_inverse_monomial(key, theta, 5)
        tol = 1e-14 * max(1.0, inv.max_abs())
        assert (torus.star_mul(m, inv, theta) - one).max_abs() < tol
        assert (torus.star_mul(inv, m, theta) - one).max_abs() < tol
        assert (torus.star_mul(one, m, theta) - m).max_abs() == 0


def test_undeformed_product_is_pointwise():
    rng = np.random.default_rng(6)
    a, b = torus.random_element(rng, 2), torus.random_element(rng, 2)
    x, y = rng.random(7), rng.random(7)
    got = torus.star_mul(a, b, DeformationParameter([0, 0, 0])).evaluate(x, y)
    ref = truncated_convolve(a.evaluate(x, y), b.evaluate(x, y))
    assert np.allclose(got, ref)
