"""End-to-end kernel estimation from observed trajectories.

correlations -> Prony fits of ``h`` (and ``phi``) -> spline regression for each
requested loss, plus the inverse-Laplace estimate. :class:`MemoryKernelEstimator`
exposes the same chain as a scikit-learn estimator.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .analysis import coercivity_bounds, error_bound, h1_alpha_norm, l2_rho_norm
from .correlation import CorrelationEstimate, ensemble_corr
from .exceptions import MemKernelError, ValidationError
from .gle_sim import KernelSpec, TrajectoryEnsemble, as_force
from .laplace_domain import kernel_to_acf, theta_L
from .prony import PronyConfig, prony_fit
from .prony_series import PronySeries
from .sobolev import SplineBasis, WeightedSpace, alpha_from_h, estimate_kernel

log = logging.getLogger(__name__)

__all__ = ["PipelineResult", "fit_correlations", "resolve_alpha", "run_pipeline", "evaluate", "MemoryKernelEstimator"]


@dataclass
class PipelineResult:
    correlation: CorrelationEstimate
    acf: PronySeries
    force_corr: PronySeries
    rhs: PronySeries
    alpha: tuple
    omega: float
    estimates: dict = field(default_factory=dict)  # loss -> KernelEstimate
    theta_L: object = None
    errors: dict = field(default_factory=dict)  # stage -> message

    @property
    def theta(self):
        return self.estimates.get("E")


def fit_correlations(corr, prony_cfg=None, with_force=False):
    """Prony fits ``(acf, force_corr, rhs)`` of a correlation estimate.

    ``force_corr`` is fitted from lag 0 without the slope constraint and
    ``rhs = -acf' + force_corr``. With the constraint enabled, ``acf'(0)`` is
    pinned to ``force_corr(0)`` so that ``rhs(0) = 0``, as the Volterra
    relation requires.
    """
    cfg = prony_cfg or PronyConfig()
    force_corr = None
    slope = 0.0
    if with_force:
        if corr.values_phi is None:
            raise ValidationError("force correlation samples are missing")
        cfg_phi = replace(cfg, constrain_derivative_zero=False)
        force_corr = prony_fit(corr.values_phi, cfg_phi, dt_obs=corr.dt_obs, start=0)
        slope = float(force_corr.value_at_zero.real)
    acf = prony_fit(corr, cfg, slope=slope)
    rhs = -acf.derivative()
    if force_corr is not None:
        rhs = (rhs + force_corr).simplify(0.0)
    return acf, force_corr, rhs


def resolve_alpha(acf, alpha=None, convention="balanced"):
    """Sobolev weights: ``alpha`` if given, else derived from ``h`` and rescaled to sum to one."""
    if alpha is not None:
        return tuple(float(a) for a in alpha)
    a1, a2 = alpha_from_h(acf, convention)
    return a1 / (a1 + a2), a2 / (a1 + a2)


def run_pipeline(data, n_lags, omega, dt_obs=None, prony_cfg=None, basis=None, force=None,
                 losses=("E", "E1", "E2"), alpha=None, alpha_convention="balanced", with_theta_L=True,
                 lcurve_grid=None, anchor="time"):
    """Estimate the memory kernel from observed trajectories.

    Parameters
    ----------
    data : TrajectoryEnsemble, CorrelationEstimate or array_like (M, L)
    n_lags : int
    omega : float
    dt_obs : float, optional
        Required unless ``data`` carries its own time step.
    force : ForceSpec, str or None
        External force; ``None`` or ``"zero"`` means no force.
    alpha : pair, optional
        Sobolev weights; derived from the ``h`` fit when None.
    anchor : {"time", "origin"}
        Correlation averaging, see :func:`ensemble_corr`.

    Returns
    -------
    PipelineResult
    """
    force = as_force(force)
    with_force = not force.is_zero
    if isinstance(data, CorrelationEstimate):
        corr = data
    else:
        if isinstance(data, TrajectoryEnsemble):
            dt_obs = data.dt
            data = data.data
        if dt_obs is None:
            raise ValidationError("dt_obs is required")
        corr = ensemble_corr(data, n_lags, dt_obs, force if with_force else None, anchor)
    acf, force_corr, rhs = fit_correlations(corr, prony_cfg, with_force)
    alpha = resolve_alpha(acf, alpha, alpha_convention)
    basis = basis or SplineBasis()
    res = PipelineResult(corr, acf, force_corr, rhs, tuple(alpha), float(omega))
    for loss in losses:
        space = WeightedSpace.for_loss(omega, loss, alpha)
        res.estimates[loss] = estimate_kernel(acf, rhs, basis, space, loss, lcurve_grid=lcurve_grid)
    if with_theta_L:
        try:
            res.theta_L = theta_L(acf, force_corr, bandwidth=corr.dt_obs)
        except MemKernelError as exc:
            log.warning("inverse-Laplace estimate failed: %s", exc)
            res.errors["theta_L"] = str(exc)
    return res


def evaluate(res, gamma, h_true=None, g_true=None, omega=None, beta=1.0):
    """Oracle diagnostics against a known kernel.

    ``gamma`` is a :class:`KernelSpec` or :class:`PronySeries`. For Prony
    kernels without force, ``h_true`` defaults to the induced autocorrelation
    (with ``h(0) = 1 / beta``) and ``g_true`` to ``-h_true'``; the error bound
    is then reported as well.
    """
    omega = res.omega if omega is None else omega
    series = gamma.series if isinstance(gamma, KernelSpec) and gamma.is_prony else gamma
    if isinstance(series, PronySeries) and h_true is None and res.force_corr is None:
        h_true = kernel_to_acf(series, 1.0 / beta)
    if h_true is not None and g_true is None and res.force_corr is None:
        g_true = -h_true.derivative()
    out = {"omega": omega, "alpha1": res.alpha[0], "alpha2": res.alpha[1],
           "gamma_norm_sq": l2_rho_norm(gamma, omega)}
    for loss, est in res.estimates.items():
        out[f"err_{loss}"] = l2_rho_norm(est, omega, gamma)
    if res.theta_L is not None:
        try:
            out["err_L"] = l2_rho_norm(res.theta_L, omega, gamma)
        except MemKernelError as exc:
            out["err_L"] = np.nan
            log.warning("theta_L error undefined: %s", exc)
    else:
        out["err_L"] = np.nan
    rep = coercivity_bounds(res.acf, omega, res.alpha)
    out["m_h"] = rep.m_lower
    out["M_h"] = rep.M_upper
    if h_true is not None and g_true is not None and isinstance(series, PronySeries):
        out["h_err_sq"] = l2_rho_norm(h_true, omega, res.acf)
        out["g_err_sq"] = h1_alpha_norm(g_true, omega, res.alpha, res.rhs)
        out["M_gamma"] = coercivity_bounds(series, omega, res.alpha, which="gamma-sobolev").M_upper
        out["bound"] = (error_bound(out["h_err_sq"], out["g_err_sq"], rep.m_lower, out["M_gamma"])
                        if rep.m_lower > 0 else np.inf)
    for key in [k for k in out if k.startswith("err_")]:
        out["rel_" + key] = float(np.sqrt(out[key] / out["gamma_norm_sq"]))
    return out


class MemoryKernelEstimator(BaseEstimator):
    """Memory-kernel estimator from observed trajectories.

    ``fit(X)`` takes an array of shape ``(n_members, length)`` (or a
    :class:`TrajectoryEnsemble`) sampled every ``dt_obs``; ``predict(t)``
    evaluates the fitted kernel.

    Parameters
    ----------
    dt_obs : float, default=1.0
        Observation step (ignored for a TrajectoryEnsemble).
    n_lags : int, default=24
    p_prime : int, default=10
    sigma : float, default=0.05
    omega : float, default=0.05
    T, n_knots : spline support and knot count
    loss : {"E", "E1", "E2", "L"}, default="E"
        ``"L"`` selects the inverse-Laplace estimate.
    alpha : pair or None
    alpha_convention : str, default="balanced"
    force : str or ForceSpec, default="zero"

    Attributes
    ----------
    correlation_ : CorrelationEstimate
    h_prony_, phi_prony_, g_prony_ : PronySeries
    alpha_ : tuple
    kernel_ : KernelEstimate or DeltaKernel
    theta_L_ : DeltaKernel or None
    coef_ : ndarray (spline losses only)
    """

    def __init__(self, dt_obs=1.0, n_lags=24, p_prime=10, sigma=0.05, omega=0.05, T=30.0, n_knots=30,
                 loss="E", alpha=None, alpha_convention="balanced", force="zero"):
        self.dt_obs = dt_obs
        self.n_lags = n_lags
        self.p_prime = p_prime
        self.sigma = sigma
        self.omega = omega
        self.T = T
        self.n_knots = n_knots
        self.loss = loss
        self.alpha = alpha
        self.alpha_convention = alpha_convention
        self.force = force

    def fit(self, X, y=None):
        if self.loss not in ("E", "E1", "E2", "L"):
            raise ValidationError(f"unknown loss {self.loss!r}")
        losses = () if self.loss == "L" else (self.loss,)
        res = run_pipeline(X, self.n_lags, self.omega, dt_obs=self.dt_obs,
                           prony_cfg=PronyConfig(p_prime=self.p_prime, sigma=self.sigma),
                           basis=SplineBasis(self.T, self.n_knots), force=self.force, losses=losses,
                           alpha=self.alpha, alpha_convention=self.alpha_convention,
                           with_theta_L=self.loss == "L")
        self.result_ = res
        self.correlation_ = res.correlation
        self.h_prony_, self.phi_prony_, self.g_prony_ = res.acf, res.force_corr, res.rhs
        self.alpha_ = res.alpha
        self.theta_L_ = res.theta_L
        if self.loss == "L":
            if res.theta_L is None:
                raise ValidationError(f"inverse-Laplace estimate failed: {res.errors.get('theta_L')}")
            self.kernel_ = res.theta_L
        else:
            self.kernel_ = res.estimates[self.loss]
            self.coef_ = self.kernel_.coef
        return self

    def predict(self, t):
        check_is_fitted(self, "kernel_")
        return self.kernel_(np.asarray(t, float))
