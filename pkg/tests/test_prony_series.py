import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad

from memkernel import InvalidKernelError, PronySeries, ValidationError
from memkernel.prony_series import conjugate_symmetrize

from conftest import random_stable_series


def test_evaluate_and_laplace_single_mode():
    f = PronySeries([2.0], [-0.5])
    assert f(0.0) == pytest.approx(2.0)
    assert f(2.0) == pytest.approx(2.0 * np.exp(-1.0))
    assert complex(f.laplace(0.5)) == pytest.approx(2.0)


def test_mismatched_lengths_rejected():
    with pytest.raises(ValidationError):
        PronySeries([1.0, 2.0], [-1.0])


def test_derivative_and_integral():
    f = PronySeries([2.0, -1.0], [-1.0, -2.0])
    assert f.derivative()(0.0) == pytest.approx(0.0)
    assert f.integral() == pytest.approx(1.5)


def test_check_stable_rejects_growth():
    with pytest.raises(InvalidKernelError):
        PronySeries([1.0], [0.1]).check_stable()


def test_conjugate_pair_is_real(rng):
    f = random_stable_series(rng, 1, 2)
    assert f.imag_ratio() < 1e-12


def test_l2_rho_closed_form_matches_quadrature(rng):
    f = random_stable_series(rng, 2, 1)
    omega = 0.3
    ref = quad(lambda t: f(t) ** 2 * np.exp(-2 * omega * t), 0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=400)[0]
    assert f.l2_rho_sq(omega) == pytest.approx(ref, rel=1e-9)


def test_convolution_matches_quadrature(rng):
    f = random_stable_series(rng, 1, 1)
    rhs = random_stable_series(rng, 2, 0)
    fg = f.convolve(rhs)
    for t in (0.3, 1.7, 4.0):
        ref = quad(lambda s: f(t - s) * rhs(s), 0, t, epsabs=1e-14, epsrel=1e-12)[0]
        assert fg(t) == pytest.approx(ref, rel=1e-9, abs=1e-13)


def test_convolution_rejects_coincident_exponents():
    f = PronySeries([1.0], [-1.0])
    with pytest.raises(ValidationError):
        f.convolve(f)


def test_arithmetic_and_simplify():
    f = PronySeries([1.0], [-1.0])
    rhs = PronySeries([2.0], [-1.0])
    s = (f + rhs).simplify()
    assert s.n_modes == 1 and s.weights[0] == pytest.approx(3.0)
    assert (f - f).simplify().n_modes == 0


@given(st.integers(0, 2**32 - 1), st.integers(0, 3), st.integers(0, 2))
def test_json_round_trip_is_bit_exact(seed, n_real, n_pairs):
    f = random_stable_series(np.random.default_rng(seed), n_real, n_pairs)
    rhs = PronySeries.from_json(f.to_json())
    assert np.array_equal(f.weights, rhs.weights)
    assert np.array_equal(f.exponents, rhs.exponents)


def test_conjugate_symmetrize_averages_pairs():
    w = np.array([1 + 1e-9j, 1 + 2e-9j, 0.5 + 0.1j, 0.5 - 0.1j])
    lam = np.array([-1.0, -2.0, -1 + 1j, -1 - 1j])
    w2, _ = conjugate_symmetrize(w, lam)
    f = PronySeries(w2, lam)
    assert f.imag_ratio() < 1e-14


def test_sorted_orders_by_rate():
    f = PronySeries([1, 2, 3], [-0.5, -3.0, -1.0]).sorted()
    assert np.all(np.diff(f.exponents.real) >= 0)
    assert f.weights[0] == 2
