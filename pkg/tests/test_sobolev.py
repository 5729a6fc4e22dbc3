import numpy as np
import pytest
from scipy.integrate import quad
from sklearn.base import clone

from memkernel import (
    DegenerateInputError,
    KernelEstimate,
    PronySeries,
    SobolevKernelRegressor,
    SplineBasis,
    ValidationError,
    WeightedSpace,
    alpha_from_h,
    coercivity_bounds,
    estimate_kernel,
    l2_rho_norm,
    sobolev_loss,
)
from memkernel.analysis import error_bound, h1_alpha_norm
from memkernel.sobolev import assemble_normal_system, convolve_basis, h1_norm_sq, solve_rkhs

OMEGA = 0.05


@pytest.fixture(scope="module")
def small_basis():
    return SplineBasis(10.0, 8)


@pytest.fixture(scope="module")
def setup5(gamma5, h5):
    basis = SplineBasis(30.0, 30)
    alpha = alpha_from_h(h5)
    space = WeightedSpace(OMEGA, alpha)
    rhs = -h5.derivative()
    A, b = assemble_normal_system(basis, h5, rhs, space)
    return basis, space, rhs, A, b


def _random_thetas(basis, gamma, n, seed):
    rng = np.random.default_rng(seed)
    t = np.linspace(0, basis.T, 400)
    base = np.linalg.lstsq(basis.design(t), gamma(t), rcond=None)[0]
    return [KernelEstimate(basis, base + rng.normal(scale=0.2, size=basis.size)) for _ in range(n)]


# -- weights ----------------------------------------------------------------------
def test_alpha_from_single_exponential():
    assert alpha_from_h(PronySeries([1.0], [-1.0])) == pytest.approx((0.5, 0.5))


def test_alpha_conventions_two_modes():
    acf = PronySeries([2.0, -1.0], [-1.0, -2.0])  # h(0) = 1, integral 3/2
    assert alpha_from_h(acf, "literal") == pytest.approx((1 / 3.25, 1.5 / 3.25))
    assert alpha_from_h(acf, "normalized") == pytest.approx((0.4, 0.6))
    a = alpha_from_h(acf)
    assert a == pytest.approx((1 / 3.25, 2.25 / 3.25))
    assert sum(a) == pytest.approx(1.0)


def test_alpha_rejects_nonpositive_integral():
    with pytest.raises(DegenerateInputError):
        alpha_from_h(PronySeries([1.0, -1.0], [-1.0, -0.5]))


def test_weighted_space_validation():
    with pytest.raises(ValidationError):
        WeightedSpace(0.0)
    with pytest.raises(ValidationError):
        WeightedSpace(0.1, (0.5, 0.6))
    with pytest.raises(ValidationError):
        WeightedSpace(0.1, (1.0, 0.0))
    assert WeightedSpace.for_loss(0.1, "E1").alpha == (1.0, 0.0)
    assert WeightedSpace.for_loss(0.1, "E2").alpha == (0.0, 1.0)


# -- basis and convolutions ------------------------------------------------------------
def test_basis_partition_of_unity(small_basis):
    t = np.linspace(0, small_basis.T, 101)
    np.testing.assert_allclose(small_basis.design(t).sum(axis=1), 1.0, atol=1e-13)
    assert np.all(small_basis.design(np.array([-1.0, 11.0])) == 0)
    assert small_basis.size == 10


def test_convolution_with_unit_spline(small_basis):
    cb = convolve_basis(small_basis, PronySeries([1.0], [-1.0]))
    t = np.linspace(0, small_basis.T, 41)
    np.testing.assert_allclose(cb(t).sum(axis=1), 1 - np.exp(-t), atol=1e-13)


def test_convolution_matches_quadrature(small_basis, h5):
    cb = convolve_basis(small_basis, h5)
    rng = np.random.default_rng(0)
    t = rng.uniform(0, 14, 20)
    V = cb(t)
    for q, tq in enumerate(t):
        for i in (0, 3, 9):
            f = lambda s: small_basis.design(np.array([s]))[0, i] * h5(tq - s)  # noqa: E731
            pts = [k for k in small_basis.knots if 0 < k < tq]
            ref = quad(f, 0, min(tq, small_basis.T), points=pts or None, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
            assert V[q, i] == pytest.approx(ref, abs=1e-9)


def test_convolution_derivative_matches_finite_differences(small_basis, h5):
    cb = convolve_basis(small_basis, h5)
    t = np.linspace(0.05, small_basis.T - 0.05, 60)
    eps = 1e-6
    fd = (cb(t + eps) - cb(t - eps)) / (2 * eps)
    d = cb.derivative(t)
    assert np.max(np.abs(fd - d)) <= 1e-6 * np.max(np.abs(d))


# -- normal system ------------------------------------------------------------------------
def test_normal_matrix_symmetric_psd(setup5):
    _, _, _, A, _ = setup5
    np.testing.assert_array_equal(A, A.T)
    assert np.linalg.eigvalsh(A)[0] >= -1e-10 * np.trace(A)


def test_normal_matrix_converged(setup5, h5):
    basis, space, rhs, A, b = setup5
    A2, b2 = assemble_normal_system(basis, h5, rhs, space, refine=2)
    assert np.max(np.abs(A2 - A)) <= 1e-9 * np.max(np.abs(A))
    assert np.max(np.abs(b2 - b)) <= 1e-9 * np.max(np.abs(b))


def test_normal_matrix_matches_adaptive_quadrature(setup5, h5):
    basis, space, rhs, A, b = setup5
    cb = convolve_basis(basis, h5)
    a1, a2 = space.alpha

    def entry(i, j):
        def f(t):
            t = np.array([t])
            return (a1 * cb(t)[0, i] * cb(t)[0, j] + a2 * cb.derivative(t)[0, i] * cb.derivative(t)[0, j]) \
                * np.exp(-2 * OMEGA * t[0])
        pts = list(basis.knots)
        body = sum(quad(f, lo, hi, epsabs=1e-15, epsrel=1e-12)[0] for lo, hi in zip(pts[:-1], pts[1:]))
        return body + quad(f, basis.T, np.inf, epsabs=1e-15, epsrel=1e-12, limit=200)[0]

    for i, j in ((0, 0), (3, 4), (10, 25), (31, 31)):
        assert A[i, j] == pytest.approx(entry(i, j), rel=1e-8)


# -- regularized solve ------------------------------------------------------------------------
def test_solve_identity_without_penalty():
    b = np.array([1.0, -2.0, 3.0])
    c, _ = solve_rkhs(np.eye(3), b, lam_reg=0.0)
    np.testing.assert_allclose(c, b)


def test_solve_drops_null_space():
    c, info = solve_rkhs(np.diag([1.0, 1e-14]), np.array([2.0, 5.0]), lam_reg=0.0)
    np.testing.assert_allclose(c, [2.0, 0.0])
    assert info["rank"] == 1 and info["range_residual"] == pytest.approx(5.0)


def test_lcurve_monotone(setup5, h5):
    _, space, rhs, A, b = setup5
    const = h1_norm_sq(rhs, space)
    res, pen = [], []
    for lam in np.logspace(-14, -2, 13) * np.trace(A) / A.shape[0]:
        _, info = solve_rkhs(A, b, lam_reg=lam, const=const)
        res.append(info["residual"])
        pen.append(info["penalty"])
    assert np.all(np.diff(res) >= -1e-10 * max(res))
    assert np.all(np.diff(pen) <= 1e-10 * max(pen))


# -- loss identities -----------------------------------------------------------------------------
def test_loss_decomposes_into_single_terms(setup5, gamma5, h5):
    basis, space, rhs, _, _ = setup5
    a1, a2 = space.alpha
    for theta in _random_thetas(basis, gamma5, 20, 1):
        E = sobolev_loss(theta, h5, rhs, space)
        E1 = sobolev_loss(theta, h5, rhs, WeightedSpace.for_loss(OMEGA, "E1"))
        E2 = sobolev_loss(theta, h5, rhs, WeightedSpace.for_loss(OMEGA, "E2"))
        assert E == pytest.approx(a1 * E1 + a2 * E2, rel=1e-8)


def test_loss_equals_quadratic_form(setup5, gamma5, h5):
    basis, space, rhs, A, b = setup5
    const = h1_norm_sq(rhs, space)
    for theta in _random_thetas(basis, gamma5, 20, 2):
        c = theta.coef
        assert sobolev_loss(theta, h5, rhs, space) == pytest.approx(c @ A @ c - 2 * b @ c + const, rel=1e-8)


def test_coercivity_sandwich(setup5, gamma5, h5):
    basis, space, rhs, _, _ = setup5
    rep = coercivity_bounds(h5, OMEGA, space.alpha)
    for theta in _random_thetas(basis, gamma5, 20, 3):
        E = sobolev_loss(theta, h5, rhs, space)
        err = l2_rho_norm(theta, OMEGA, gamma5)
        assert rep.m_lower * err <= E * (1 + 1e-8)
        assert E <= rep.M_upper * err * (1 + 1e-8)


# -- estimates ------------------------------------------------------------------------------------
def test_noise_free_estimate_under_bound(setup5, gamma5, h5):
    basis, space, rhs, _, _ = setup5
    est = estimate_kernel(h5, rhs, basis, space)
    err = l2_rho_norm(est, OMEGA, gamma5)
    m = coercivity_bounds(h5, OMEGA, space.alpha).m_lower
    assert est.loss == "E" and est.alpha == space.alpha
    # exact correlations: only the projection error onto the spline space remains
    assert err <= error_bound(0.0, est.meta["loss_value"], m, case="known_h") * (1 + 1e-6)
    assert err / l2_rho_norm(gamma5, OMEGA) < 0.05**2


@pytest.mark.parametrize("loss, alpha", [("E1", (1.0, 0.0)), ("E2", (0.0, 1.0))])
def test_single_term_losses(setup5, h5, loss, alpha):
    basis, _, rhs, _, _ = setup5
    est = estimate_kernel(h5, rhs, basis, loss=loss, omega=OMEGA)
    assert est.loss == loss and est.alpha == alpha


def test_unknown_loss_rejected(setup5, h5):
    basis, space, rhs, _, _ = setup5
    with pytest.raises(ValidationError):
        estimate_kernel(h5, rhs, basis, space, loss="E3")


def test_estimate_files_round_trip(tmp_path, setup5, gamma5):
    basis = setup5[0]
    est = KernelEstimate(basis, np.arange(basis.size) / 7, "E2", 1e-3, 0.05, (0.0, 1.0))
    est.write(tmp_path / "k.csv", tmp_path / "k.json")
    back = KernelEstimate.read(tmp_path / "k.csv", tmp_path / "k.json")
    np.testing.assert_array_equal(back.coef, est.coef)
    assert (back.loss, back.lambda_reg, back.omega, back.alpha) == ("E2", 1e-3, 0.05, (0.0, 1.0))


def test_h1_norm_closed_form_matches_analysis(h5):
    space = WeightedSpace(0.3, (0.25, 0.75))
    assert h1_norm_sq(h5, space) == pytest.approx(h1_alpha_norm(h5, 0.3, (0.25, 0.75)), rel=1e-12)


def test_regressor_api(gamma5, h5):
    reg = SobolevKernelRegressor(omega=OMEGA, n_knots=20)
    assert clone(reg).get_params() == reg.get_params()
    reg.fit(h5, -h5.derivative())
    assert sum(reg.alpha_) == pytest.approx(1.0)
    t = np.linspace(0, 10, 21)
    assert np.max(np.abs(reg.predict(t) - gamma5(t))) < 0.05
    with pytest.raises(ValidationError):
        SobolevKernelRegressor().fit(np.ones(3), np.ones(3))
