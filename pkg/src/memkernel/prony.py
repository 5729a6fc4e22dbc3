"""Regularized Prony fitting of sampled correlation functions.

The fit runs in four stages:

1. linear-prediction coefficients from a Hankel least-squares system,
2. roots of the characteristic polynomial (companion-matrix eigenvalues),
3. root regularization: decay clamping, logarithm, branch-cut augmentation,
4. amplitudes from a constrained, RKHS-regularized least-squares problem
   whose strength is picked on the L-curve.

:func:`prony_fit` composes them; :class:`RegularizedProny` wraps the same
procedure behind the scikit-learn estimator interface.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._lcurve import lcurve_corner
from ._validation import check_samples, check_uniform_times
from .correlation import CorrelationEstimate
from .exceptions import (
    ConstraintError,
    DegenerateInputError,
    IllConditionedError,
    ValidationError,
)
from .prony_series import PronySeries, conjugate_symmetrize

log = logging.getLogger(__name__)

__all__ = [
    "PronyConfig",
    "RootDiagnostics",
    "hankel_coefficients",
    "characteristic_roots",
    "regularize_roots",
    "fit_weights",
    "prony_fit",
    "RegularizedProny",
]

BRANCH_TOL = 1e-6
ROOT_MERGE_TOL = 1e-8
ZERO_ROOT_TOL = 1e-12
EXACT_FIT_TOL = 1e-10


def default_lcurve_grid():
    return np.logspace(-24, 0, 49)


@dataclass
class PronyConfig:
    """Settings for :func:`prony_fit`.

    ``lcurve_grid`` holds regularization strengths relative to a power of
    the largest singular value ``s`` of the design matrix: ``s^4`` for the
    ``rkhs`` penalty ``w^H pinv(Z^H Z) w`` and ``s^6`` for the ``squared``
    penalty ``||pinv(Z^H Z) w||^2``, so that both terms scale alike.
    ``None`` disables the penalty.
    """

    p_prime: int = 10
    sigma: float = 0.05
    constrain_derivative_zero: bool = True
    lcurve_grid: object = field(default_factory=default_lcurve_grid)
    pinv_tol: float = 1e-10
    clamp: str = "rate"  # "rate": |r| <= exp(-sigma dt);  "literal": |r| <= exp(-sigma)
    penalty: str = "rkhs"  # "rkhs": w^H G^+ w;  "squared": ||G^+ w||^2, with G = Z^H Z

    def validate(self, n_samples=None):
        if self.p_prime < 1:
            raise ValidationError("p_prime must be >= 1")
        if n_samples is not None and 2 * self.p_prime > n_samples:
            raise ValidationError(f"need 2*p_prime <= N (p_prime={self.p_prime}, N={n_samples})")
        if not self.sigma > 0:
            raise ValidationError("sigma must be positive")
        if self.clamp not in ("rate", "literal"):
            raise ValidationError("clamp must be 'rate' or 'literal'")
        if self.penalty not in ("rkhs", "squared"):
            raise ValidationError("penalty must be 'rkhs' or 'squared'")
        if self.lcurve_grid is not None:
            rhs = np.asarray(self.lcurve_grid, float)
            if rhs.ndim != 1 or rhs.size == 0 or np.any(rhs <= 0) or np.any(np.diff(rhs) <= 0):
                raise ValidationError("lcurve_grid must be strictly positive and increasing")
        return self


@dataclass
class RootDiagnostics:
    n_roots: int = 0
    n_discarded: int = 0
    n_clamped: int = 0
    n_augmented: int = 0
    n_merged: int = 0


def _values(acf):
    if isinstance(acf, CorrelationEstimate):
        return np.asarray(acf.values_h, float)
    return np.asarray(acf, float)


def hankel_coefficients(acf, p_prime, pinv_tol=1e-10):
    """Linear-prediction coefficients ``a_1..a_p'`` from samples ``h_1..h_N``.

    Solves ``sum_j a_j h_{n+p'-j} = -h_{n+p'}`` for ``n = 1..N-p'`` in the
    least-squares sense, truncating singular values below
    ``pinv_tol * s_max``.
    """
    acf = _values(acf)
    N = acf.size
    if N < 2 * p_prime:
        raise ValidationError(f"need N >= 2*p_prime (N={N}, p_prime={p_prime})")
    if not np.any(acf):
        raise DegenerateInputError("all-zero correlation samples")
    H = scipy.linalg.hankel(acf[:N - p_prime], acf[N - p_prime - 1:N - 1])[:, ::-1]
    rhs = -acf[p_prime:]
    a, *_ = np.linalg.lstsq(H, rhs, rcond=pinv_tol)
    return a


def characteristic_roots(a):
    """Roots of ``z^p' + a_1 z^(p'-1) + ... + a_p'`` via the companion matrix."""
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise ValidationError("coefficients must be finite")
    try:
        return np.roots(np.concatenate([[1.0], a]))
    except np.linalg.LinAlgError as exc:
        raise IllConditionedError(f"companion eigenvalues did not converge for a={a}") from exc


def regularize_roots(r, dt_obs, sigma, clamp="rate", branch_tol=BRANCH_TOL):
    """Turn characteristic roots into decaying continuous-time exponents.

    Returns ``(exponents, diagnostics)``. Roots at the origin are dropped,
    roots outside the decay disc are pulled radially onto it, and a root on
    the negative real axis yields both ``(log|r| +- i pi) / dt``.
    """
    if not dt_obs > 0:
        raise ValidationError("dt_obs must be positive")
    r = np.atleast_1d(np.asarray(r, complex))
    diag = RootDiagnostics(n_roots=r.size)
    keep = np.abs(r) > ZERO_ROOT_TOL
    diag.n_discarded = int(np.sum(~keep))
    r = r[keep]
    thr = np.exp(-sigma * dt_obs) if clamp == "rate" else np.exp(-sigma)
    big = np.abs(r) >= thr
    diag.n_clamped = int(np.sum(big))
    r = np.where(big, r * thr / np.where(big, np.abs(r), 1.0), r)

    lam = []
    for rk in r:
        if abs(abs(np.angle(rk)) - np.pi) <= branch_tol:
            re = np.log(abs(rk))
            lam += [complex(re, np.pi), complex(re, -np.pi)]
            diag.n_augmented += 1
        else:
            lam.append(np.log(rk))
    lam = np.asarray(lam, complex) / dt_obs

    merged = []
    for x in lam:
        if any(abs(x - y) <= ROOT_MERGE_TOL * max(1.0, abs(y)) for y in merged):
            diag.n_merged += 1
        else:
            merged.append(x)
    return np.asarray(merged, complex), diag


def _design(exponents, times):
    return np.exp(np.multiply.outer(times, exponents))


def _constraint_basis(exponents, constrained):
    p = exponents.size
    if not constrained:
        return np.eye(p, dtype=complex)
    if np.all(exponents == 0):
        raise ConstraintError("derivative constraint is infeasible when all exponents vanish")
    return scipy.linalg.null_space(exponents[None, :].astype(complex))


def _penalty_matrix(Z, cfg):
    """``Q`` with penalty ``||Q w||^2``; ``pinv_tol`` truncates ``Z^H Z``."""
    _, sv, Vh = np.linalg.svd(Z, full_matrices=False)
    keep = sv**2 > cfg.pinv_tol * sv[0] ** 2
    power = 1 if cfg.penalty == "rkhs" else 2
    return (Vh[keep].conj().T / sv[keep] ** power) @ Vh[keep]


def _particular(exponents, constrained, slope):
    """Minimum-norm weights with ``sum_k w_k lambda_k = slope``."""
    if not constrained or slope == 0:
        return np.zeros(exponents.size, complex)
    return slope * exponents.conj() / np.vdot(exponents, exponents).real


def _solve_weights(Z, P, acf, B, lam_reg, w0):
    acf = acf - Z @ w0
    if lam_reg > 0:
        A = np.vstack([Z @ B, np.sqrt(lam_reg) * (P @ B)])
        rhs = np.concatenate([acf, -np.sqrt(lam_reg) * (P @ w0)])
    else:
        A, rhs = Z @ B, acf
    y, *_ = np.linalg.lstsq(A, rhs.astype(complex), rcond=None)
    return w0 + B @ y


def fit_weights(exponents, acf, dt_obs=None, cfg=None, start=1, lam_reg=None, return_curve=False,
                slope=0.0):
    """Amplitudes for fixed exponents.

    Minimizes ``||Z w - h||^2 + lam_reg pen(w)`` with the penalty chosen by ``cfg.penalty``,
    optionally subject to ``sum_k w_k lambda_k = slope`` (eliminated through a
    null-space basis). ``Z[n, k] = exp(lambda_k t_n)`` with
    ``t_n = (start + n) dt_obs``.

    If ``lam_reg`` is None it is picked on the L-curve over
    ``cfg.lcurve_grid`` (relative strengths, see :class:`PronyConfig`).
    When the weakest penalty already fits to round-off (residual below
    ``EXACT_FIT_TOL * ||h||``) that point is kept.
    Returns ``(weights, info)``.
    """
    cfg = cfg or PronyConfig()
    exponents = np.asarray(exponents, complex)
    if exponents.size < 1:
        raise ValidationError("need at least one exponent")
    if isinstance(acf, CorrelationEstimate):
        dt_obs = acf.dt_obs if dt_obs is None else dt_obs
    hv = _values(acf)
    if dt_obs is None:
        raise ValidationError("dt_obs is required")
    times = (start + np.arange(hv.size)) * dt_obs
    Z = _design(exponents, times)
    B = _constraint_basis(exponents, cfg.constrain_derivative_zero)
    w0 = _particular(exponents, cfg.constrain_derivative_zero, float(slope))
    s = np.linalg.svd(Z, compute_uv=False)
    P = _penalty_matrix(Z, cfg)

    info = {"lambda_reg": 0.0}
    if lam_reg is None and cfg.lcurve_grid is not None and B.shape[1] > 0:
        grid = np.asarray(cfg.lcurve_grid, float) * s[0] ** (4 if cfg.penalty == "rkhs" else 6)
        res, pen, ws = [], [], []
        for lr in grid:
            w = _solve_weights(Z, P, hv, B, lr, w0)
            ws.append(w)
            res.append(np.linalg.norm(Z @ w - hv))
            pen.append(np.linalg.norm(P @ w))
        # noise-free data: the curve has no corner, keep the weakest penalty
        if res[0] <= EXACT_FIT_TOL * np.linalg.norm(hv):
            i = 0
        else:
            i = lcurve_corner(res, pen)
        w, lam_reg = ws[i], grid[i]
        info.update(curve_lambda=grid, curve_residual=np.asarray(res), curve_penalty=np.asarray(pen))
    else:
        lam_reg = 0.0 if lam_reg is None else lam_reg
        w = _solve_weights(Z, P, hv, B, lam_reg, w0) if B.shape[1] else w0

    w, _ = conjugate_symmetrize(w, exponents)
    info["lambda_reg"] = float(lam_reg)
    info["residual"] = float(np.linalg.norm(Z @ w - hv))
    if not return_curve:
        for k in ("curve_lambda", "curve_residual", "curve_penalty"):
            info.pop(k, None)
    return w, info


def prony_fit(acf, cfg=None, dt_obs=None, start=1, slope=0.0):
    """Regularized Prony fit of equally spaced samples.

    Parameters
    ----------
    acf : CorrelationEstimate or array_like
        Samples at times ``(start + n) * dt_obs``, ``n = 0..N-1``. For a
        :class:`CorrelationEstimate` these are ``h_1..h_N``.
    cfg : PronyConfig
    dt_obs : float, optional
        Sample spacing; taken from ``acf`` when it is a CorrelationEstimate.
    start : int
        Index of the first sample (1 for autocorrelations with lag 0 dropped,
        0 for force correlations).
    slope : float
        Target of the derivative constraint ``h'(0)`` when it is enabled.

    Returns
    -------
    PronySeries
        With fit diagnostics in ``.meta``.
    """
    cfg = cfg or PronyConfig()
    if isinstance(acf, CorrelationEstimate):
        dt_obs = acf.dt_obs
    hv = _values(acf)
    if dt_obs is None:
        raise ValidationError("dt_obs is required")
    cfg.validate(hv.size)
    a = hankel_coefficients(hv, cfg.p_prime, cfg.pinv_tol)
    roots = characteristic_roots(a)
    lam, diag = regularize_roots(roots, dt_obs, cfg.sigma, cfg.clamp)
    if lam.size == 0:
        raise DegenerateInputError("no usable roots")
    w, info = fit_weights(lam, hv, dt_obs, cfg, start=start, slope=slope)
    keep = w != 0
    meta = {
        "dt_obs": float(dt_obs),
        "residual": info["residual"],
        "lambda_reg": info["lambda_reg"],
        "n_clamped": diag.n_clamped,
        "n_augmented": diag.n_augmented,
        "n_discarded": diag.n_discarded,
        "n_merged": diag.n_merged,
    }
    log.debug("prony fit: %s", meta)
    return PronySeries(w[keep], lam[keep], meta)


class RegularizedProny(RegressorMixin, BaseEstimator):
    """Regularized Prony interpolant of equally spaced samples.

    ``X`` holds the sample times (one column, uniform spacing, first time a
    positive multiple of the spacing or zero); ``y`` the sampled values.
    After fitting, ``predict`` evaluates the exponential sum at new times.

    Parameters
    ----------
    p_prime : int, default=10
        Model order of the linear-prediction polynomial.
    sigma : float, default=0.05
        Minimum decay rate enforced on every mode.
    constrain_derivative_zero : bool, default=True
        Enforce zero slope at the origin.
    lcurve_grid : array_like or None
        Relative regularization strengths scanned by the L-curve.
    pinv_tol : float, default=1e-10
    """

    def __init__(self, p_prime=10, sigma=0.05, constrain_derivative_zero=True,
                 lcurve_grid=None, pinv_tol=1e-10):
        self.p_prime = p_prime
        self.sigma = sigma
        self.constrain_derivative_zero = constrain_derivative_zero
        self.lcurve_grid = lcurve_grid
        self.pinv_tol = pinv_tol

    def _config(self):
        grid = default_lcurve_grid() if self.lcurve_grid is None else self.lcurve_grid
        if isinstance(grid, str) and grid == "none":
            grid = None
        return PronyConfig(self.p_prime, self.sigma, self.constrain_derivative_zero, grid, self.pinv_tol)

    def fit(self, X, y):
        t, y = check_samples(X, y)
        dt, start = check_uniform_times(t)
        self.dt_ = dt
        self.series_ = prony_fit(y, self._config(), dt_obs=dt, start=start)
        self.n_modes_ = self.series_.n_modes
        return self

    def predict(self, X):
        check_is_fitted(self, "series_")
        t, _ = check_samples(X)
        return self.series_(t)

    def derivative(self, X, order=1):
        """Evaluate the ``order``-th derivative of the fitted sum."""
        check_is_fitted(self, "series_")
        t, _ = check_samples(X)
        return self.series_.derivative(order)(t)
