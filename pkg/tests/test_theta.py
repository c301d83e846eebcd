import cmath
import math

import numpy as np
import pytest

from nctorus import theta as th
from nctorus import zak
from nctorus.series import DeformationParameter
from nctorus.theta import ThetaVector

TAU = 1j
PTS = zak.sample_points()


def brute_series(u, z, K=40):
    """Prefactor-free theta series summed with a fixed generous cutoff."""
    q = cmath.exp(1j * math.pi * u.tau)
    return sum(u.coefficient(k) * q ** (k * k / u.n) * cmath.exp(2j * math.pi * k * z) for k in range(-K, K + 1))


@pytest.mark.parametrize("n1,n2", [(1, 1), (1, 2), (2, 3)])
def test_product_matches_pointwise_multiplication(n1, n2):
    rng = np.random.default_rng(n1 + 7 * n2)
    u, v = th.random_theta_vector(rng, n1, TAU), th.random_theta_vector(rng, n2, TAU)
    zs, ts = th.elliptic_points(PTS, TAU)
    ref = th.theta_eval_many(u, zs, ts) * th.theta_eval_many(v, zs, ts)
    got = th.theta_eval_many(th.theta_product(u, v), zs, ts)
    assert np.max(np.abs(got - ref)) / np.max(np.abs(ref)) < 1e-10


def test_product_at_generic_modulus():
    tau = 0.4 + 0.8j
    rng = np.random.default_rng(2)
    u, v = th.random_theta_vector(rng, 2, tau), th.random_theta_vector(rng, 1, tau)
    zs, ts = th.elliptic_points(PTS, tau)
    ref = th.theta_eval_many(u, zs, ts) * th.theta_eval_many(v, zs, ts)
    got = th.theta_eval_many(th.theta_product(u, v), zs, ts)
    assert np.max(np.abs(got - ref)) / np.max(np.abs(ref)) < 1e-10


def test_evaluator_against_fixed_cutoff_sum():
    u = th.random_theta_vector(np.random.default_rng(3), 3, TAU)
    zs, ts = th.elliptic_points(PTS, TAU)
    x, y = th.real_coordinates(zs, TAU)
    pref = np.exp(1j * math.pi * 3 * (ts / TAU.imag + x * y + TAU * y * y))
    ref = pref * np.array([brute_series(u, z) for z in zs])
    assert np.allclose(th.theta_eval_many(u, zs, ts), ref, atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_holomorphy_and_quasi_periodicity(n):
    u = th.random_theta_vector(np.random.default_rng(n), n, TAU)
    assert th.holomorphy_defect(u, PTS) < 1e-8
    assert th.quasi_periodicity_defect(u, PTS) < 1e-10


def test_weight_perturbation_breaks_quasi_periodicity():
    u = th.random_theta_vector(np.random.default_rng(4), 2, TAU)
    assert th.quasi_periodicity_defect(u, PTS, weight_scale={1: 1.5}) > 1e-3


def test_negative_degree_is_rejected():
    with pytest.raises(ValueError):
        ThetaVector(-1, TAU, (1.0,))
    with pytest.raises(ValueError):
        ThetaVector(0, TAU, ())
    with pytest.raises(ValueError):
        ThetaVector(1, -1j, (1.0,))


def test_product_is_commutative_and_associative():
    rng = np.random.default_rng(5)
    u, v, w = (th.random_theta_vector(rng, n, TAU) for n in (1, 2, 1))
    assert np.allclose(th.theta_product(u, v).c, th.theta_product(v, u).c, atol=1e-14)
    left = th.theta_product(th.theta_product(u, v), w).c
    right = th.theta_product(u, th.theta_product(v, w)).c
    assert np.allclose(left, right, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("n", [1, 2])
def test_bridge_reproduces_theta_function(n):
    u = th.random_theta_vector(np.random.default_rng(10 + n), n, TAU)
    zs, ts = th.elliptic_points(PTS, TAU)
    got = th.elliptic_eval_many(th.zak_bridge(u), TAU, zs, ts)[:, 0]
    assert np.allclose(got, th.theta_eval_many(u, zs, ts), atol=1e-12)


def test_bridge_lies_in_kernel_of_q():
    u = th.random_theta_vector(np.random.default_rng(20), 2, TAU)
    zs, ts = th.elliptic_points(PTS, TAU)
    qf = th.elliptic_q(th.zak_bridge(u, 2), TAU)
    assert np.max(np.abs(th.elliptic_eval_many(qf, TAU, zs, ts))) < 1e-12


def test_elliptic_heisenberg_commutator():
    f = zak.random_section(np.random.default_rng(21), 2, 1)
    pq = th.elliptic_p(th.elliptic_q(f, TAU), TAU) - th.elliptic_q(th.elliptic_p(f, TAU), TAU)
    zs, ts = th.elliptic_points(PTS, TAU)
    assert np.allclose(th.elliptic_eval_many(pq, TAU, zs, ts), 2 * th.elliptic_eval_many(f, TAU, zs, ts), atol=1e-12)


def test_holomorphic_sections_multiply_undeformed():
    rng = np.random.default_rng(22)
    u, v = th.random_theta_vector(rng, 1, TAU), th.random_theta_vector(rng, 1, TAU)
    theta = DeformationParameter.from_hbar_coeffs([1, 0, 0, 0], 4)
    assert th.undeformed_defect(u, v, theta, PTS) < 1e-8
