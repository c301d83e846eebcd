import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from nctorus import gauss as G
from nctorus.gauss import GaussSum, GaussTerm, TermCapExceeded
from nctorus.series import TruncatedSeries

N = 3
seeds = st.integers(0, 2**32 - 1)


def term_eval(f, z):
    """Scalar oracle evaluating the term list at a (possibly complex) point, hbar^0 part only."""
    return sum(t.coeff.coeffs[0] * (z - t.center) ** t.degree * np.exp(-t.width * (z - t.center) ** 2)
               for t in f.terms)


def taylor_in_hbar(g, order, radius=0.25, m=64):
    """Taylor coefficients of an analytic scalar function of hbar by the Cauchy integral (FFT)."""
    h = radius * np.exp(2j * np.pi * np.arange(m) / m)
    vals = np.array([g(v) for v in h])
    return (np.fft.fft(vals) / m)[: order + 1] / radius ** np.arange(order + 1)


def sample(seed, **kw):
    return G.random_gauss_sum(np.random.default_rng(seed), N, **kw)


xs = np.linspace(-3, 3, 41)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_evaluate_matches_term_list(seed):
    f = sample(seed, hbar_dependent=False, complex_width=True)
    assert np.allclose(f.evaluate_many(xs)[:, 0], [term_eval(f, x) for x in xs], atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(seeds, seeds)
def test_pointwise_product(s1, s2):
    f, g = sample(s1), sample(s2)
    got = G.pointwise_mul(f, g).evaluate_many(xs)
    ref = G.truncated_convolve(f.evaluate_many(xs), g.evaluate_many(xs))
    assert np.max(np.abs(got - ref)) < 1e-10 * max(1, np.max(np.abs(ref)))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_derivative_against_finite_difference(seed):
    f = sample(seed, max_degree=2)
    h = 1e-5
    fd = (f.evaluate_many(xs + h) - f.evaluate_many(xs - h)) / (2 * h)
    assert np.allclose(G.derivative(f).evaluate_many(xs), fd, atol=1e-6)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_integral_against_quadrature(seed):
    f = sample(seed, hbar_dependent=False, max_degree=3, complex_width=True)
    re = quad(lambda x: term_eval(f, x).real, -np.inf, np.inf, epsabs=1e-13)[0]
    im = quad(lambda x: term_eval(f, x).imag, -np.inf, np.inf, epsabs=1e-13)[0]
    assert abs(G.integrate(f).coeffs[0] - (re + 1j * im)) < 1e-9


@settings(max_examples=20, deadline=None)
@given(seeds, st.floats(-2, 2))
def test_real_shift_and_phase(seed, s):
    f = sample(seed)
    assert np.allclose(G.real_shift(f, s).evaluate_many(xs), f.evaluate_many(xs - s), atol=1e-12)
    ph = np.exp(1j * s * xs)[:, None]
    assert np.allclose(G.phase_mul(f, s).evaluate_many(xs), ph * f.evaluate_many(xs), atol=1e-11)


def test_multiplication_by_polynomial():
    f = sample(3)
    poly = [1.0, TruncatedSeries([0, 2, 0, 0]), -0.5]
    ref = f.evaluate_many(xs) * (1 + 0 * xs)[:, None]
    ref = ref + G.truncated_convolve(f.evaluate_many(xs) * xs[:, None], np.array([0, 2, 0, 0]))
    ref = ref - 0.5 * f.evaluate_many(xs) * xs[:, None] ** 2
    assert np.allclose(G.mul_x_polynomial(f, poly).evaluate_many(xs), ref)
    assert np.allclose(G.mul_x(f).evaluate_many(xs), xs[:, None] * f.evaluate_many(xs))


@pytest.mark.parametrize("seed", range(5))
def test_formal_shift_against_cauchy_integral(seed):
    rng = np.random.default_rng(seed)
    f = G.random_gauss_sum(rng, 5, hbar_dependent=False, max_degree=2)
    r1, r2, e1 = rng.normal(size=3)
    rho = TruncatedSeries([0, r1, r2, 0, 0, 0])
    eps = TruncatedSeries([0, e1, 0, 0, 0, 0])
    got = G.formal_shift(f, rho, eps).evaluate_many(xs[::8])
    for x, row in zip(xs[::8], got):
        ref = taylor_in_hbar(lambda h: term_eval(f, x + r1 * h + r2 * h * h + e1 * h * x), 5)
        assert np.allclose(row, ref, atol=1e-9)


@pytest.mark.parametrize("seed", range(5))
def test_formal_exponential_against_cauchy_integral(seed):
    rng = np.random.default_rng(seed + 50)
    f = G.random_gauss_sum(rng, 5, hbar_dependent=False)
    s1, s2 = rng.normal(size=2) + 1j * rng.normal(size=2)
    got = G.formal_exp_mul(f, TruncatedSeries([0, s1, s2, 0, 0, 0])).evaluate_many(xs[::8])
    for x, row in zip(xs[::8], got):
        ref = taylor_in_hbar(lambda h: term_eval(f, x) * np.exp((s1 * h + s2 * h * h) * x), 5)
        assert np.allclose(row, ref, atol=1e-9)


def test_merging_collapses_equal_blocks():
    g = GaussSum.gaussian(2, 1.0, 0.3, 1.0)
    s = g + g + g
    assert s.n_blocks == 1
    assert np.allclose(s.evaluate_many(xs), 3 * g.evaluate_many(xs))
    assert (g - g).is_zero()


def test_width_and_degree_validation():
    with pytest.raises(ValueError):
        GaussTerm(TruncatedSeries.one(2), 0, 0.0, -1.0)
    with pytest.raises(ValueError):
        GaussTerm(TruncatedSeries.one(2), -1, 0.0, 1.0)


def test_term_cap():
    f = G.random_gauss_sum(np.random.default_rng(0), 1, n_blocks=3, term_cap=5)
    with pytest.raises(TermCapExceeded):
        G.pointwise_mul(f, f)


def test_prune_keeps_dominant_blocks():
    big = GaussSum.gaussian(1, 1.0, 0.0, 1.0)
    tiny = GaussSum.gaussian(1, 1e-30, 0.5, 2.0)
    assert (big + tiny).prune(1e-20).n_blocks == 1


def test_conjugate_on_real_line():
    f = sample(11, complex_width=True)
    assert np.allclose(G.conjugate(f).evaluate_many(xs)[:, 0], np.conj(f.evaluate_many(xs)[:, 0]))
