from fractions import Fraction
from math import gcd

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from nctorus import rank, torus, zak
from nctorus.rank import BElement, RankSection
from nctorus.series import DeformationParameter, alpha, random_parameter

PTS = zak.sample_points()
PAIRS = [(3, 2), (5, 3)]
coprime = st.tuples(st.integers(-12, 12), st.integers(1, 12)).filter(lambda p: gcd(*p) == 1)


@given(coprime)
def test_bezout_completion(cd):
    c, d = cd
    g = rank.bezout_completion(c, d)
    assert (g.c, g.d) == (c, d)
    assert g.a * g.d - g.b * g.c == 1
    if abs(c) > 1:
        assert 0 <= g.a < abs(c)


def test_bezout_rejects_bad_input():
    with pytest.raises(ValueError):
        rank.bezout_completion(4, 2)
    with pytest.raises(ValueError):
        rank.bezout_completion(1, 0)
    with pytest.raises(ValueError):
        rank.SL2ZMatrix(1, 1, 1, 1)
    assert rank.normalize(3, -2) == (-3, 2)


@pytest.mark.parametrize("c,d", [(3, 2), (5, 3), (2, 7), (-3, 4), (0, 1), (1, 5)])
def test_decompose_is_unique(c, d):
    for n in range(-50, 51):
        k, m = rank.decompose(n, c or 1, d) if c == 0 else rank.decompose(n, c, d)
        cc = c or 1
        assert 1 <= k <= d and k * cc + m * d == n
        assert [j for j in range(1, d + 1) if (n - j * cc) % d == 0] == [k]


@settings(max_examples=50)
@given(coprime, st.dictionaries(st.integers(-30, 30), st.complex_numbers(max_magnitude=5), max_size=8))
def test_fourier_split_round_trip(cd, phi):
    c, d = cd
    parts = rank.fourier_split(phi, c, d)
    assert len(parts) == d
    back = rank.fourier_join(parts, c, d)
    assert {k: v for k, v in back.items() if v} == {k: v for k, v in phi.items() if v}


def test_fourier_split_pointwise():
    c, d = 3, 2
    phi = {1: 1.0, -4: 2j, 7: 0.5}
    x = np.linspace(0, 2, 9)
    total = sum(v * np.exp(2j * np.pi * n * x / d) for n, v in phi.items())
    parts = rank.fourier_split(phi, c, d)
    recon = sum(np.exp(2j * np.pi * c * k * x / d) * sum(v * np.exp(2j * np.pi * m * x) for m, v in p.items())
                for k, p in enumerate(parts, start=1))
    assert np.allclose(total, recon)


@pytest.mark.parametrize("c,d", PAIRS)
def test_relation_and_matched_parameter(c, d):
    g = rank.bezout_completion(c, d)
    for seed in range(5):
        t = random_parameter(np.random.default_rng(seed), 6, scale=0.5)
        assert rank.b_commutation_defect(g, t).max_abs() < 1e-12
        assert rank.matched_parameter_defect(g, t) < 1e-12


@pytest.mark.parametrize("c,d", PAIRS)
def test_bimodule_commutation_direction(c, d):
    theta = DeformationParameter.from_hbar_coeffs([1, 0, 0, 0], 4)
    matched, mismatched = rank.verify_bimodule_commutation(theta, c, d, trials=3, points=PTS)
    assert matched < 1e-8
    assert mismatched > 1e-3


@pytest.mark.parametrize("c,d", PAIRS)
def test_left_action_is_a_representation(c, d):
    rng = np.random.default_rng(c * d)
    theta = DeformationParameter.from_hbar_coeffs([1, 0, 0], 3)
    g = rank.bezout_completion(c, d)
    tl = alpha(Fraction(c, d), theta)
    f = rank.random_rank_section(rng, g, 3)
    for _ in range(3):
        xi, eta = rank.random_b_element(rng, g, 3), rank.random_b_element(rng, g, 3)
        lhs = rank.left_action(xi, rank.left_action(eta, f, tl), tl)
        rhs = rank.left_action(rank.b_star_mul(xi, eta, tl), f, tl)
        v = rank.rank_eval_many(lhs - rhs, PTS[:, 0], PTS[:, 1])
        assert np.max(np.abs(v)) < 1e-10 * max(1, np.max(np.abs(rank.rank_eval_many(rhs, PTS[:, 0], PTS[:, 1]))))


@pytest.mark.parametrize("c,d", PAIRS)
def test_right_action_is_a_representation(c, d):
    rng = np.random.default_rng(c + d)
    theta = DeformationParameter.from_hbar_coeffs([1, 0, 0], 3)
    g = rank.bezout_completion(c, d)
    f = rank.random_rank_section(rng, g, 3)
    a, b = torus.random_element(rng, 3, 2, 1), torus.random_element(rng, 3, 2, 1)
    lhs = rank.right_action(rank.right_action(f, a, theta), b, theta)
    rhs = rank.right_action(f, torus.star_mul(a, b, theta), theta)
    ref = rank.rank_eval_many(rhs, PTS[:, 0], PTS[:, 1])
    assert zak.relative_defect(rank.rank_eval_many(lhs, PTS[:, 0], PTS[:, 1]), ref) < 1e-10


def test_unit_slope_reduces_to_degree_one_sections():
    rng = np.random.default_rng(9)
    theta = DeformationParameter.from_hbar_coeffs([1, 0, 0], 3)
    g = rank.bezout_completion(1, 1)
    f = rank.random_rank_section(rng, g, 3)
    z = zak.ZakSection(1, list(f.data))
    flat = PTS * [1, 1, 0]  # rank sections carry no fiber coordinate
    for key in [(1, 0), (0, 1), (1, -2)]:
        r = rank.right_monomial(f, key, theta)
        assert np.allclose(rank.rank_eval_many(r, PTS[:, 0], PTS[:, 1]),
                           zak.function_eval_many(zak.right_monomial(z, key, theta), flat), atol=1e-12)
        tl = alpha(1, theta)
        lft = rank.left_monomial(key, f, tl)
        assert np.allclose(rank.rank_eval_many(lft, PTS[:, 0], PTS[:, 1]),
                           zak.function_eval_many(zak.left_monomial(key, z, tl), flat), atol=1e-12)


@pytest.mark.parametrize("c,d", PAIRS + [(2, 1)])
def test_bundle_components_glue(c, d):
    f = rank.random_rank_section(np.random.default_rng(c), rank.bezout_completion(c, d), 0, 2)
    bc = rank.bundle_components(f, grid=6)
    assert bc.values.shape[0] == d
    assert max(bc.shift_defect, bc.twist_defect, bc.reconstruction_defect) < 1e-10


@pytest.mark.parametrize("c,d", PAIRS)
def test_quasi_periodicity_and_leibniz(c, d):
    rng = np.random.default_rng(31 + c)
    g = rank.bezout_completion(c, d)
    f = rank.random_rank_section(rng, g, 0, 2)
    assert rank.quasi_periodicity_defect(f, PTS) < 1e-10
    assert rank.leibniz_defect(f, f, PTS) < 1e-8
    assert rank.leibniz_defect(f, torus.random_element(rng, 0, 2, 1), PTS) < 1e-8


def test_right_generators_are_unitary():
    rng = np.random.default_rng(40)
    g = rank.bezout_completion(3, 2)
    theta = DeformationParameter([0.0])
    f1, f2 = rank.random_rank_section(rng, g, 0), rank.random_rank_section(rng, g, 0)
    ip = rank.inner_product(f1, f2)
    for act in (rank.act_right_U, rank.act_right_V):
        assert abs(rank.inner_product(act(f1, theta), act(f2, theta)) - ip) < 1e-10 * max(1, abs(ip))


def test_b_element_validation():
    g = rank.bezout_completion(3, 2)
    with pytest.raises(ValueError):
        BElement(g, 2, {(0, 0): np.ones(2)})
    assert BElement.generator(g, "U'", 2).coefficient((0, 1)).coeffs[0] == 1
    with pytest.raises(ValueError):
        rank.b_star_mul(BElement.generator(g, "U'", 2), BElement.generator(rank.bezout_completion(5, 3), "V'", 2),
                        DeformationParameter([0, 1, 0]))


def test_bimodule_commutation_at_zero_parameter():
    matched, mismatched = rank.verify_bimodule_commutation(DeformationParameter([0] * 5), 3, 2, points=PTS)
    assert matched < 1e-12 and mismatched < 1e-12


def test_mismatch_leading_coefficient():
    # leading hbar^2 term of the mismatch is controlled by alpha_{c/d}(theta) - theta = -(c/d) hbar^2 + ...
    theta = DeformationParameter.from_hbar_coeffs([1, 0, 0, 0], 4)
    rng = np.random.default_rng(12)
    g = rank.bezout_completion(3, 2)
    xi, f = rank.random_b_element(rng, g, 4), rank.random_rank_section(rng, g, 4)
    a = torus.random_element(rng, 4, 2, 1)
    prof = rank.bimodule_commutation_profile(xi, f, a, theta, theta, PTS)
    assert zak.leading_order(prof) == 2 and prof[2] > 1e-3
