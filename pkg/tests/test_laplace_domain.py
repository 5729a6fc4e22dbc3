import numpy as np
import pytest
from hypothesis import assume, given, strategies as st
from scipy.integrate import quad

from memkernel import (
    ConstraintViolationError,
    DeltaKernel,
    IllConditionedError,
    InstabilityError,
    PoleError,
    PronySeries,
    kernel_to_acf,
    laplace_eval,
    partial_fractions,
    rational_quotient,
    theta_L,
)
from memkernel.laplace_domain import RationalLaplace, poly_from_roots

from conftest import random_stable_series


def _laplace_quad(f, z, T):
    re = quad(lambda t: (f(t) * np.exp(-z * t)).real, 0, T, epsabs=1e-15, epsrel=1e-12, limit=500)[0]
    im = quad(lambda t: (f(t) * np.exp(-z * t)).imag, 0, T, epsabs=1e-15, epsrel=1e-12, limit=500)[0]
    return re + 1j * im


def _sorted_pairs(series):
    s = series.sorted()
    return s.weights, s.exponents


# -- transforms ---------------------------------------------------------------
def test_laplace_eval_single_mode():
    f = PronySeries([1.0], [-1.0])
    assert laplace_eval(f, 0.0) == pytest.approx(1.0)
    assert laplace_eval(f, 1.0) == pytest.approx(0.5)


def test_laplace_eval_pole_raises():
    with pytest.raises(PoleError):
        laplace_eval(PronySeries([1.0], [-1.0]), -1.0)


def test_laplace_eval_matches_quadrature(rng):
    f = random_stable_series(rng, 2, 1, min_rate=0.5)
    # |f| e^{-Re z t} < 1e-13 past T
    T = 40.0 / f.decay_rate
    for z in (0.3, 1.0 + 2.0j, 2.5 - 0.7j):
        assert laplace_eval(f, z) == pytest.approx(_laplace_quad(f, z, T), rel=1e-8, abs=1e-12)


# -- rational quotient -----------------------------------------------------------
def test_single_mode_quotient_is_constant():
    acf = PronySeries([1.0], [-1.0])
    R = rational_quotient(-acf.derivative(), acf)
    assert R.is_constant
    assert complex(R.num[0]) == pytest.approx(1.0)


def test_quotient_of_exponential_kernel_acf():
    acf = kernel_to_acf(PronySeries([1.0], [-1.0]), 1.0)
    R = rational_quotient(-acf.derivative(), acf, strictly_proper=True)
    z = np.array([0.3, 1.0 + 1.0j, 5.0 - 2.0j])
    np.testing.assert_allclose(R(z), 1.0 / (z + 1.0), rtol=1e-12)


def test_quotient_round_trip_five_mode(gamma5, h5, rng):
    R = rational_quotient(-h5.derivative(), h5, strictly_proper=True)
    z = rng.uniform(0.01, 3, 20) + 1j * rng.uniform(-5, 5, 20)
    np.testing.assert_allclose(R(z), gamma5.laplace(z), rtol=1e-6)


def test_degree_anomaly_flagged():
    acf = PronySeries([1.0, 1.0], [-1.0, -2.0])  # h'(0) != 0
    with pytest.raises(ConstraintViolationError):
        rational_quotient(-acf.derivative(), acf, strictly_proper=True)


# -- partial fractions -------------------------------------------------------------
def test_textbook_residues():
    pf = partial_fractions(RationalLaplace([1.0, 3.0], poly_from_roots([-1.0, -2.0])))
    assert pf.constant == 0
    w, lam = _sorted_pairs(pf.series)
    np.testing.assert_allclose(lam, [-2.0, -1.0], atol=1e-12)
    np.testing.assert_allclose(w, [-1.0, 2.0], atol=1e-12)


def test_equal_degree_constant_and_residues():
    # (z^2 + z) / ((z + 1)(z + 2)) = 1 - 2 / (z + 2); the pole at -1 cancels
    pf = partial_fractions(RationalLaplace([1.0, 1.0, 0.0], poly_from_roots([-1.0, -2.0])))
    assert pf.constant == pytest.approx(1.0)
    w, lam = _sorted_pairs(pf.series)
    np.testing.assert_allclose(w, [-2.0, 0.0], atol=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_random_rational_reconstruction(seed):
    rng = np.random.default_rng(seed)
    p = rng.integers(1, 6)
    poles = -rng.uniform(0.1, 3, p) + 1j * rng.uniform(-3, 3, p)
    num = rng.normal(size=p) + 1j * rng.normal(size=p)
    R = RationalLaplace(num, poly_from_roots(poles))
    pf = partial_fractions(R)
    assert pf.reconstruction_error <= 1e-10
    z = 4 * np.exp(2j * np.pi * rng.random(50))
    np.testing.assert_allclose(pf.constant + pf.series.laplace(z), R(z), rtol=1e-9)


def test_clustered_poles_rejected():
    R = RationalLaplace([1.0], poly_from_roots([-1.0, -1.0]))
    with pytest.raises(IllConditionedError):
        partial_fractions(R)


# -- theta_L -------------------------------------------------------------------------
def test_theta_L_exponential_round_trip():
    acf = kernel_to_acf(PronySeries([1.0], [-1.0]), 1.0)
    est = theta_L(acf)
    assert est.delta_weight == 0
    assert est.series.n_modes == 1
    assert complex(est.series.weights[0]) == pytest.approx(1.0, abs=1e-10)
    assert complex(est.series.exponents[0]) == pytest.approx(-1.0, abs=1e-10)


def test_theta_L_five_mode_round_trip(gamma5, h5):
    est = theta_L(h5)
    w, lam = _sorted_pairs(est.series)
    w0, lam0 = _sorted_pairs(gamma5)
    np.testing.assert_allclose(lam, lam0, atol=1e-8)
    np.testing.assert_allclose(w, w0, atol=1e-8)


def test_theta_L_force_without_mass_has_no_delta():
    acf = kernel_to_acf(PronySeries([1.0], [-1.0]), 1.0)
    force_corr = PronySeries([0.3, -0.3], [-1.5, -2.5])  # sum of weights zero
    est = theta_L(acf, force_corr, bandwidth=0.1)
    assert est.delta_weight == pytest.approx(0.0, abs=1e-12)


def test_theta_L_force_delta_weight():
    # phi = -mu h shifts the quotient by the constant -mu
    acf = kernel_to_acf(PronySeries([1.0], [-1.0]), 1.0)
    est = theta_L(acf, -0.7 * acf, bandwidth=0.1)
    assert est.delta_weight == pytest.approx(-0.7, rel=1e-9)
    assert est.bandwidth == 0.1
    np.testing.assert_allclose(est.series(np.linspace(0, 5, 11)), np.exp(-np.linspace(0, 5, 11)), atol=1e-9)


@given(
    st.lists(st.floats(0.1, 2.0), min_size=3, max_size=3),
    st.lists(st.floats(0.2, 3.0), min_size=3, max_size=3),
)
def test_acf_then_theta_L_recovers_three_mode_kernel(u, rates):
    rates = sorted(rates)
    assume(min(np.diff(rates)) > 0.05)
    gamma = PronySeries(u, [-r for r in rates])
    try:
        acf = kernel_to_acf(gamma, 1.0)
    except (InstabilityError, IllConditionedError):
        assume(False)
    est = theta_L(acf)
    w, lam = _sorted_pairs(est.series)
    w0, lam0 = _sorted_pairs(gamma)
    assert est.series.n_modes == 3
    np.testing.assert_allclose(lam, lam0, atol=1e-6)
    np.testing.assert_allclose(w, w0, atol=1e-6)


# -- kernel to autocorrelation --------------------------------------------------------
def test_exponential_kernel_acf_closed_form():
    acf = kernel_to_acf(PronySeries([1.0], [-1.0]), 1.0)
    lam = np.sort_complex(acf.exponents)
    np.testing.assert_allclose(lam, [-0.5 - 1j * np.sqrt(3) / 2, -0.5 + 1j * np.sqrt(3) / 2], atol=1e-12)
    t = np.linspace(0, 10, 50)
    s = np.sqrt(3) / 2
    ref = np.exp(-t / 2) * (np.cos(s * t) + np.sin(s * t) / np.sqrt(3))
    np.testing.assert_allclose(acf(t), ref, atol=1e-12)


def test_acf_has_zero_slope_and_requested_variance(h5):
    assert abs(h5.derivative().value_at_zero) <= 1e-10
    assert h5.value_at_zero.real == pytest.approx(1.0, rel=1e-12)
    assert h5.n_modes == 6


def test_unstable_kernel_rejected():
    # den z^2 + z - 2 has a root at z = 1
    with pytest.raises(InstabilityError):
        kernel_to_acf(PronySeries([-2.0], [-1.0]), 1.0)


# -- identities -------------------------------------------------------------------------
def _plancherel(f, omega):
    # (1/2pi) int |F(omega + i tau)|^2 dtau over the real line
    rhs = lambda tau: abs(complex(f.laplace(omega + 1j * tau))) ** 2  # noqa: E731
    return (quad(rhs, -np.inf, 0, limit=400, epsabs=0, epsrel=1e-10)[0]
            + quad(rhs, 0, np.inf, limit=400, epsabs=0, epsrel=1e-10)[0]) / (2 * np.pi)


@given(st.integers(0, 2**32 - 1), st.floats(0.01, 2.0))
def test_plancherel_identity(seed, omega):
    f = random_stable_series(np.random.default_rng(seed), 2, 1)
    assert _plancherel(f, omega) == pytest.approx(f.l2_rho_sq(omega), rel=1e-6)


@given(st.integers(0, 2**32 - 1))
def test_convolution_identity(seed):
    rng = np.random.default_rng(seed)
    f = random_stable_series(rng, 1, 1)
    rhs = random_stable_series(rng, 2, 0)
    z = rng.uniform(0, 3, 10) + 1j * rng.uniform(-5, 5, 10)
    np.testing.assert_allclose(f.convolve(rhs).laplace(z), f.laplace(z) * rhs.laplace(z), rtol=1e-9)


# -- delta kernels -------------------------------------------------------------------------
def test_mollified_delta_transform_matches_quadrature():
    k = DeltaKernel(PronySeries([0.5], [-1.0]), 0.8, 0.05)
    for z in (0.2, 1.0 + 3.0j):
        ref = _laplace_quad(k, z, 40.0)
        assert complex(k.laplace(z)) == pytest.approx(ref, rel=1e-8)
    assert complex(k.laplace(0.2, mollified=False)) == pytest.approx(0.5 / 1.2 + 0.8)


def test_delta_kernel_needs_bandwidth():
    with pytest.raises(Exception):
        DeltaKernel(PronySeries([1.0], [-1.0]), 1.0, 0.0)


def test_serialization_round_trips():
    R = RationalLaplace([1.0, 2.0], [1.0, 3.0, 2.0])
    R2 = RationalLaplace.from_dict(R.to_dict())
    assert np.array_equal(R.num, R2.num) and np.array_equal(R.den, R2.den)
    k = DeltaKernel(PronySeries([0.5], [-1.0]), 0.8, 0.05)
    k2 = DeltaKernel.from_dict(k.to_dict())
    assert k2.delta_weight == 0.8 and k2.bandwidth == 0.05
    assert np.array_equal(k2.series.weights, k.series.weights)
