"""Weighted norms, Laplace-domain coercivity constants and error bounds."""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .exceptions import CoercivityError, DivergenceError, ValidationError
from .gle_sim import KernelSpec
from .laplace_domain import DeltaKernel
from .prony_series import PronySeries
from .sobolev import GAUSS_NODES, KernelEstimate, _exp_moments, _gauss_points

__all__ = [
    "CoercivityReport",
    "l2_rho_norm",
    "h1_alpha_norm",
    "coercivity_bounds",
    "error_bound",
    "spectral_function",
    "laplace_multiplier",
]

MOLLIFIER_REACH = 12.0  # half-normal mass beyond 12 bandwidths is below 1e-32


# -- decomposition into closed-form and compact parts ------------------------------
@dataclass
class _Parts:
    prony: PronySeries
    compact: list  # (sign, callable, derivative callable, breakpoints)
    other: list  # (sign, callable, derivative callable) with unbounded support


def _split(f, sign=1.0):
    if isinstance(f, PronySeries):
        return _Parts(sign * f, [], [])
    if isinstance(f, KernelEstimate):
        return _Parts(PronySeries.zero(), [(sign, f, f.derivative, f.breakpoints)], [])
    if isinstance(f, DeltaKernel):
        parts = _Parts(sign * f.series, [], [])
        if f.delta_weight != 0:
            b = f.bandwidth
            moll = lambda t: f.delta_weight * f.mollifier(t)  # noqa: E731
            dmoll = lambda t: -np.asarray(t) / b**2 * moll(t)  # noqa: E731
            parts.compact.append((sign, moll, dmoll, np.linspace(0, MOLLIFIER_REACH * b, 25)))
        return parts
    if isinstance(f, KernelSpec):
        if f.is_prony:
            return _Parts(sign * f.series, [], [])
        if f.variant == "tabulated":
            d = lambda t: np.interp(t, f.times[:-1], np.diff(f.values) / np.diff(f.times), right=0.0)  # noqa: E731
            return _Parts(PronySeries.zero(), [(sign, f, d, f.times)], [])
        t2 = lambda t: np.asarray(t, float) ** 2  # noqa: E731
        dpow = lambda t: (-6 * np.asarray(t) / (1 + t2(t)) ** 3  # noqa: E731
                          - 6 * np.asarray(t) * (1 - 3 * t2(t)) / (1 + t2(t)) ** 4)
        return _Parts(PronySeries.zero(), [], [(sign, f, dpow)])
    raise ValidationError(f"unsupported function type {type(f).__name__}")


def _combine(f, minus):
    p = _split(f)
    if minus is not None:
        q = _split(minus, -1.0)
        p = _Parts((p.prony + q.prony).simplify(0.0), p.compact + q.compact, p.other + q.other)
    return p


def _check_decay(prony, omega):
    if prony.n_modes and np.max(prony.exponents.real) >= omega:
        raise DivergenceError(0, "weighted integral diverges: exponent real part >= omega")


def _quad_panels(breaks, prony, omega):
    edges = np.unique(np.concatenate([np.asarray(b, float) for b in breaks]))
    lam = prony.exponents
    width = np.inf
    if lam.size:
        width = 4.0 / max(np.max(np.abs(lam)), 1e-300)
    fine = []
    for a, b in zip(edges[:-1], edges[1:]):
        n = 1 if not np.isfinite(width) else max(1, int(np.ceil((b - a) / width)))
        fine.append(np.linspace(a, b, n + 1)[:-1])
    return np.concatenate(fine + [edges[-1:]])


def _sq_norm(parts, omega, deriv=False):
    P = parts.prony.derivative() if deriv else parts.prony
    _check_decay(P, omega)
    total = P.l2_rho_sq(omega) if P.n_modes else 0.0
    if not parts.compact and not parts.other:
        # closed-form differences of nearly equal series can round below zero
        return max(float(total), 0.0)
    idx = 2 if deriv else 1
    if parts.compact:
        edges = _quad_panels([c[3] for c in parts.compact], P, omega)
        tq, wq = _gauss_points(edges, GAUSS_NODES)
        wq = wq * np.exp(-2 * omega * tq)
        Q = sum(c[0] * np.asarray(c[idx](tq), float) for c in parts.compact)
        Pv = P(tq) if P.n_modes else 0.0
        # the Prony square on [0, Tc] is already in ``total``
        total += np.sum(wq * (Q * Q + 2 * Pv * Q))
    if parts.other:
        def integrand(t):
            r = sum(c[0] * float(c[idx](t)) for c in parts.other)
            extra = sum(c[0] * float(c[idx](t)) for c in parts.compact) + (float(P(t)) if P.n_modes else 0.0)
            return (r * r + 2 * r * extra) * np.exp(-2 * omega * t)

        breaks = sorted(set([0.0] + [float(x) for c in parts.compact for x in c[3]]))
        for a, b in zip(breaks[:-1], breaks[1:]):
            total += quad(integrand, a, b, limit=200, epsabs=1e-14, epsrel=1e-11)[0]
        total += quad(integrand, breaks[-1], np.inf, limit=400, epsabs=1e-14, epsrel=1e-11)[0]
    return max(float(total), 0.0)


def l2_rho_norm(f, omega, minus=None):
    """``int_0^inf |f - minus|^2 exp(-2 omega t) dt`` (a squared norm).

    Exponential sums are integrated in closed form; spline, tabulated and
    mollified parts by Gauss-Legendre panels on their breakpoints; the
    power-law kernel by adaptive quadrature.
    """
    if not omega > 0:
        raise ValidationError("omega must be positive")
    return _sq_norm(_combine(f, minus), omega)


def h1_alpha_norm(f, omega, alpha, minus=None):
    """``a1 ||f - minus||^2 + a2 ||(f - minus)'||^2`` in ``L^2(rho)``."""
    if not omega > 0:
        raise ValidationError("omega must be positive")
    a1, a2 = alpha
    parts = _combine(f, minus)
    out = 0.0
    if a1:
        out += a1 * _sq_norm(parts, omega)
    if a2:
        out += a2 * _sq_norm(parts, omega, deriv=True)
    return float(out)


# -- coercivity ----------------------------------------------------------------------
def laplace_multiplier(f, omega, alpha, tau):
    """``q(tau) = a1 |F(z)|^2 + a2 |z F(z)|^2`` with ``z = omega + i tau``."""
    z = omega + 1j * np.asarray(tau, float)
    F = f.laplace(z)
    return alpha[0] * np.abs(F) ** 2 + alpha[1] * np.abs(z * F) ** 2


@dataclass
class CoercivityReport:
    omega: float
    alpha: tuple
    m_lower: float
    M_upper: float
    argmin_tau: float
    argmax_tau: float
    tau_grid: str
    which_function: str = "h-sobolev"
    limit_zero: float = None
    limit_inf: float = None
    curve: dict = field(default=None, repr=False)

    def to_dict(self):
        d = asdict(self)
        d.pop("curve")
        d["alpha"] = list(self.alpha)
        return d

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2)

    def write_curve(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["tau", "q"])
            for t, q in zip(self.curve["tau"], self.curve["q"]):
                w.writerow([repr(float(t)), repr(float(q))])


def _refine(fun, tau, i, sign, rtol):
    """Golden-section refinement of an extremum of ``fun`` around ``tau[i]`` (log scale)."""
    lo = tau[max(i - 1, 0)]
    hi = tau[min(i + 1, tau.size - 1)]
    if lo <= 0 or hi <= lo:
        return tau[i], fun(tau[i])
    res = minimize_scalar(lambda s: sign * fun(np.exp(s)), bounds=(np.log(lo), np.log(hi)), method="bounded",
                          options={"xatol": rtol})
    t = float(np.exp(res.x))
    v = float(fun(t))
    return (t, v) if sign * v < sign * fun(tau[i]) else (tau[i], fun(tau[i]))


def coercivity_bounds(f, omega, alpha, tau_min=1e-5, tau_max=1e5, n_tau=2000, which="h-sobolev", rtol=1e-6):
    """Infimum and supremum of the Laplace multiplier along ``Re z = omega``.

    Scans ``n_tau`` logarithmic points in ``[tau_min, tau_max]`` plus
    ``tau = 0``, refines the discrete extrema by golden section, and adds
    the analytic limit ``a2 |sum w|^2`` at ``tau -> inf`` as a candidate.
    The multiplier is even in ``tau`` for real functions, so only
    ``tau >= 0`` is scanned. ``omega = 0`` is allowed.
    """
    if omega < 0:
        raise ValidationError("omega must be nonnegative")
    if not isinstance(f, PronySeries):
        raise ValidationError("coercivity bounds need an exponential sum")
    if f.n_modes and np.max(f.exponents.real) >= omega:
        raise DivergenceError(0, "Laplace transform undefined on the scan line")
    alpha = tuple(float(a) for a in alpha)
    tau = np.concatenate([[0.0], np.logspace(np.log10(tau_min), np.log10(tau_max), n_tau)])
    fun = lambda t: float(laplace_multiplier(f, omega, alpha, t))  # noqa: E731
    q = laplace_multiplier(f, omega, alpha, tau)
    i_min, i_max = int(np.argmin(q)), int(np.argmax(q))
    t_min, v_min = _refine(fun, tau, i_min, 1.0, rtol)
    t_max, v_max = _refine(fun, tau, i_max, -1.0, rtol)
    lim_inf = alpha[1] * abs(np.sum(f.weights)) ** 2
    lim_zero = float(q[0])
    if lim_inf < v_min:
        t_min, v_min = np.inf, lim_inf
    if lim_inf > v_max:
        t_max, v_max = np.inf, lim_inf
    return CoercivityReport(
        omega=float(omega), alpha=alpha, m_lower=float(max(v_min, 0.0)), M_upper=float(v_max),
        argmin_tau=float(t_min), argmax_tau=float(t_max),
        tau_grid=f"0 + logspace({tau_min:g}, {tau_max:g}, {n_tau}) + limit", which_function=which,
        limit_zero=lim_zero, limit_inf=float(lim_inf), curve={"tau": tau, "q": q})


def error_bound(h_err_sq, g_err_sq, m_heps, M_gamma=None, case="estimated_h"):
    """Upper bound on ``||gamma - theta||^2`` in ``L^2(rho)``.

    ``known_h``: ``g_err_sq / m``. ``estimated_h``:
    ``(2 / m) (M_gamma h_err_sq + g_err_sq)``.
    """
    if not m_heps > 0:
        raise CoercivityError(f"coercivity constant must be positive, got {m_heps}")
    if case == "known_h":
        return float(g_err_sq / m_heps)
    if case == "estimated_h":
        if M_gamma is None:
            raise ValidationError("M_gamma is required for the estimated_h case")
        return float(2.0 / m_heps * (M_gamma * h_err_sq + g_err_sq))
    raise ValidationError(f"unknown case {case!r}")


# -- spectra --------------------------------------------------------------------------
def _spline_fourier(est, freq):
    """``int_0^T theta(t) exp(-i w t) dt`` from the piecewise polynomial form."""
    basis = est.basis
    pieces = np.einsum("i,ijm->jm", est.coef, basis.pieces)  # (J, 4)
    x0 = basis.knots[:-1]
    U = np.diff(basis.knots)
    lam = 1j * np.asarray(freq, float)[:, None]  # (F, 1)
    Lm = _exp_moments(lam, U[None, :])  # (4, F, J): int u^m exp(lam (U - u))
    mom = Lm * np.exp(-lam * U[None, :])  # int_0^U u^m exp(-i w u)
    return np.einsum("jm,mfj,fj->f", pieces, mom, np.exp(-lam * x0[None, :]))


def spectral_function(kernel, freq, mollified=False):
    """Fourier transform ``int_0^inf gamma(t) exp(-i w t) dt`` on a frequency grid.

    A :class:`DeltaKernel` contributes its weight ``C`` as a constant (the
    zero-bandwidth limit) unless ``mollified`` is set.
    """
    freq = np.asarray(freq, float)
    z = 1j * freq
    if isinstance(kernel, PronySeries):
        return kernel.laplace(z)
    if isinstance(kernel, DeltaKernel):
        return kernel.laplace(z, mollified=mollified)
    if isinstance(kernel, KernelEstimate):
        return _spline_fourier(kernel, freq.ravel()).reshape(freq.shape)
    if isinstance(kernel, KernelSpec):
        if kernel.is_prony:
            return kernel.series.laplace(z)
        out = np.empty(freq.size, complex)
        for i, w in enumerate(freq.ravel()):
            if kernel.variant == "tabulated":
                edges = kernel.times
                re = sum(quad(kernel, a, b, weight="cos", wvar=w)[0] for a, b in zip(edges[:-1], edges[1:]))
                im = sum(quad(kernel, a, b, weight="sin", wvar=w)[0] for a, b in zip(edges[:-1], edges[1:]))
            elif w == 0:
                re, im = quad(kernel, 0, np.inf)[0], 0.0
            else:
                re = quad(kernel, 0, np.inf, weight="cos", wvar=w, limlst=200)[0]
                im = quad(kernel, 0, np.inf, weight="sin", wvar=w, limlst=200)[0]
            out[i] = re - 1j * im
        return out.reshape(freq.shape)
    raise ValidationError(f"unsupported kernel type {type(kernel).__name__}")
