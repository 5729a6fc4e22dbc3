"""Memory-kernel regression under a weighted Sobolev loss.

The kernel is expanded in clamped cubic B-splines on ``[0, T]`` and fitted
to the Volterra relation ``g = theta * h`` by minimizing::

    E(theta) = a1 ||g - theta * h||^2 + a2 ||g' - (theta * h)'||^2

in ``L^2(rho)`` with ``rho(t) = exp(-2 omega t)``. For exponential-sum
``h`` the convolutions ``psi_i * h`` are piecewise closed forms, so the normal
matrix needs quadrature only on ``[0, T]``; past ``T`` every convolution is
itself an exponential sum and the inner products are exact.

``(a1, a2) = (1, 0)`` and ``(0, 1)`` give the first- and second-kind losses
``E1`` and ``E2``.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from math import factorial

import numpy as np
from scipy.interpolate import BSpline, PPoly
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._lcurve import lcurve_corner
from .exceptions import AccuracyError, DegenerateInputError, ValidationError
from .prony_series import PronySeries

log = logging.getLogger(__name__)

__all__ = [
    "WeightedSpace",
    "SplineBasis",
    "KernelEstimate",
    "alpha_from_h",
    "convolve_basis",
    "ConvolvedBasis",
    "assemble_normal_system",
    "solve_rkhs",
    "estimate_kernel",
    "sobolev_loss",
    "SobolevKernelRegressor",
]

LOSS_ALPHA = {"E1": (1.0, 0.0), "E2": (0.0, 1.0)}
GAUSS_NODES = 16


@dataclass(frozen=True)
class WeightedSpace:
    """Measure ``exp(-2 omega t) dt`` and Sobolev weights ``alpha``.

    ``tag`` marks the single-term losses (``"E1"``/``"E2"``), for which the
    weights ``(1, 0)`` and ``(0, 1)`` are allowed; otherwise both weights must
    be positive and sum to one.
    """

    omega: float
    alpha: tuple = (0.5, 0.5)
    tag: str = "E"

    def __post_init__(self):
        if not self.omega > 0:
            raise ValidationError(f"omega must be positive, got {self.omega}")
        a = tuple(float(x) for x in self.alpha)
        if len(a) != 2:
            raise ValidationError("alpha must be a pair")
        object.__setattr__(self, "alpha", a)
        if self.tag in LOSS_ALPHA:
            if a != LOSS_ALPHA[self.tag]:
                raise ValidationError(f"{self.tag} requires alpha = {LOSS_ALPHA[self.tag]}")
        elif self.tag == "E":
            if min(a) <= 0 or abs(sum(a) - 1) > 1e-12:
                raise ValidationError(f"alpha must be positive and sum to 1, got {a}")
        else:
            raise ValidationError(f"unknown loss tag {self.tag!r}")

    @classmethod
    def for_loss(cls, omega, loss, alpha=None):
        if loss in LOSS_ALPHA:
            return cls(omega, LOSS_ALPHA[loss], loss)
        return cls(omega, alpha, "E")


def alpha_from_h(acf, convention="balanced"):
    """Sobolev weights derived from an autocorrelation fit.

    With ``a = h(0) = sum w_k`` and ``b = int h = sum w_k / (-lambda_k)``:

    ``balanced``
        ``(a^2, b^2) / (a^2 + b^2)``. Sums to one and equalizes the
        Laplace-domain multiplier at ``z -> 0`` and ``z -> inf``.
    ``literal``
        ``(a, b) / (a^2 + b^2)``.
    ``normalized``
        ``(a, b) / (a + b)``.

    Raises
    ------
    DegenerateInputError
        If ``a`` or ``b`` is not positive.
    """
    acf.check_stable()
    a = complex(np.sum(acf.weights))
    b = complex(np.sum(acf.weights / -acf.exponents))
    for name, x in (("h(0)", a), ("integral of h", b)):
        if abs(x.imag) > 1e-10 * max(1.0, abs(x)):
            raise DegenerateInputError(f"{name} is not real: {x}")
    a, b = a.real, b.real
    if a <= 0 or b <= 0:
        raise DegenerateInputError(f"need h(0) > 0 and int h > 0, got {a:.3g}, {b:.3g}")
    if convention == "balanced":
        return a * a / (a * a + b * b), b * b / (a * a + b * b)
    if convention == "literal":
        return a / (a * a + b * b), b / (a * a + b * b)
    if convention == "normalized":
        return a / (a + b), b / (a + b)
    raise ValidationError(f"unknown alpha convention {convention!r}")


# -- spline basis ----------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class SplineBasis:
    """Clamped cubic B-splines on ``n_knots`` uniform knots over ``[0, T]``."""

    T: float = 30.0
    n_knots: int = 30
    degree: int = 3

    def __post_init__(self):
        if not self.T > 0:
            raise ValidationError("T must be positive")
        if self.degree != 3:
            raise ValidationError("only cubic splines are supported")
        if self.n_knots < 2:
            raise ValidationError("need at least two knots")
        x = np.linspace(0.0, self.T, self.n_knots)
        k = self.degree
        t = np.concatenate([np.zeros(k), x, np.full(k, self.T)])
        K = t.size - k - 1
        # local power coefficients (ascending) of every element on every interval
        pieces = np.zeros((K, x.size - 1, k + 1))
        for i in range(K):
            c = np.zeros(K)
            c[i] = 1.0
            pp = PPoly.from_spline(BSpline(t, c, k))
            # pp.x repeats the end knots; keep the intervals of positive length
            keep = np.diff(pp.x) > 0
            pieces[i] = pp.c[::-1, keep].T
        object.__setattr__(self, "knots", x)
        object.__setattr__(self, "_t", t)
        object.__setattr__(self, "pieces", pieces)

    @property
    def size(self):
        return self.pieces.shape[0]

    @property
    def breakpoints(self):
        return self.knots

    def spline(self, coef, nu=0):
        s = BSpline(self._t, np.asarray(coef, float), self.degree, extrapolate=False)
        return s.derivative(nu) if nu else s

    def evaluate(self, coef, t, nu=0):
        """``sum_i coef_i psi_i^(nu)(t)``; zero outside ``[0, T]``."""
        t = np.asarray(t, float)
        return np.nan_to_num(self.spline(coef, nu)(t), nan=0.0)

    def design(self, t, nu=0):
        """Matrix ``psi_i^(nu)(t_q)``, shape ``(len(t), K)``; zero outside ``[0, T]``."""
        t = np.asarray(t, float)
        inside = (t >= 0) & (t <= self.T)
        out = np.zeros((t.size, self.size))
        if nu == 0:
            if np.any(inside):
                out[inside] = BSpline.design_matrix(t[inside], self._t, self.degree).toarray()
        else:
            for i in range(self.size):
                out[:, i] = self.evaluate(np.eye(self.size)[i], t, nu)
        return out


# -- closed-form convolutions ------------------------------------------------------
def _exp_moments(lam, U, m_max=3):
    """``L_m(U) = int_0^U u^m exp(lam (U - u)) du`` for ``m = 0..m_max``.

    ``lam`` and ``U`` broadcast. Uses a power series when ``|lam U| < 1`` and
    the upward recurrence ``L_m = (m L_{m-1} - U^m) / lam`` otherwise.
    """
    lam, U = np.broadcast_arrays(np.asarray(lam, complex), np.asarray(U, float))
    x = lam * U
    small = np.abs(x) < 1.0
    out = np.empty((m_max + 1,) + x.shape, complex)
    # series: L_m = U^(m+1) m! sum_n x^n / (m+n+1)!
    n_terms = 22
    xs = np.where(small, x, 0)
    for m in range(m_max + 1):
        acc = np.zeros(x.shape, complex)
        term = np.full(x.shape, 1.0 / factorial(m + 1), complex)
        for n in range(n_terms):
            acc += term
            term = term * xs / (m + n + 2)
        out[m] = np.where(small, U ** (m + 1) * factorial(m) * acc, 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        lam_safe = np.where(small, 1.0, lam)
        Lm = np.expm1(np.where(small, 0, x)) / lam_safe
        out[0] = np.where(small, out[0], Lm)
        for m in range(1, m_max + 1):
            Lm = (m * Lm - U**m) / lam_safe
            out[m] = np.where(small, out[m], Lm)
    return out


def _piece_kernels(knots, exponents, t):
    """``E[q, j, k, m] = exp(lam_k D) L_m(U)`` for piece ``j`` evaluated at ``t_q``."""
    x0, x1 = knots[:-1], knots[1:]
    t = np.asarray(t, float)[:, None]
    top = np.minimum(t, x1)
    U = np.clip(top - x0, 0.0, None)  # (Q, J)
    D = np.clip(t - top, 0.0, None)
    lam = exponents[None, None, :]
    Lm = _exp_moments(lam, U[:, :, None])  # (4, Q, J, P)
    decay = np.exp(lam * D[:, :, None])
    return np.moveaxis(Lm * decay, 0, -1)  # (Q, J, P, 4)


@dataclass(frozen=True, eq=False)
class ConvolvedBasis:
    """``psi_i * h`` for every basis element, with derivatives.

    ``__call__(t)`` returns the ``(len(t), K)`` matrix of values and
    ``derivative(t)`` that of first derivatives. For ``t >= T`` each column
    is the exponential sum ``sum_k tail[i, k] exp(lam_k (t - T))``.
    """

    basis: SplineBasis
    acf: PronySeries

    def _contract(self, t, weights):
        E = _piece_kernels(self.basis.knots, self.acf.exponents, t)
        Fq = np.einsum("qjkm,k->qjm", E, weights)
        return np.einsum("ijm,qjm->qi", self.basis.pieces, Fq).real

    def __call__(self, t):
        return self._contract(t, self.acf.weights)

    def derivative(self, t):
        """``(psi * h)' = psi * h' + h(0) psi``."""
        t = np.asarray(t, float)
        h0 = float(np.real(np.sum(self.acf.weights)))
        out = self._contract(t, self.acf.weights * self.acf.exponents)
        return out + h0 * self.basis.design(t)

    @property
    def tail(self):
        """Complex ``(K, P)`` amplitudes of the columns past ``T``."""
        E = _piece_kernels(self.basis.knots, self.acf.exponents, [self.basis.T])[0]  # (J, P, 4)
        return np.einsum("ijm,jkm->ik", self.basis.pieces, E) * self.acf.weights


def convolve_basis(basis, acf):
    """Closed-form convolutions of the basis with an exponential sum."""
    return ConvolvedBasis(basis, acf)


# -- quadrature --------------------------------------------------------------------
def _panels(basis, series_list, max_width=None):
    """Knot-aligned panel edges over ``[0, T]``, refined for fast oscillation."""
    lam = np.concatenate([s.exponents for s in series_list]) if series_list else np.zeros(0)
    width = basis.T / max(basis.n_knots - 1, 1)
    if lam.size:
        width = min(width, 4.0 / max(np.max(np.abs(lam)), 1e-300))
        sig = np.min(-lam.real)
        if sig > 0:
            width = min(width, 1.0 / sig)
    if max_width is not None:
        width = min(width, max_width)
    edges = []
    for a, b in zip(basis.knots[:-1], basis.knots[1:]):
        n = max(1, int(np.ceil((b - a) / width - 1e-12)))
        edges.append(np.linspace(a, b, n + 1)[:-1])
    return np.concatenate(edges + [[basis.T]])


def _gauss_points(edges, n=GAUSS_NODES):
    x, w = np.polynomial.legendre.leggauss(n)
    a, b = edges[:-1, None], edges[1:, None]
    t = (0.5 * (b - a) * x + 0.5 * (a + b)).ravel()
    wt = (0.5 * (b - a) * w).ravel()
    return t, wt


def _tail_gram(A, lamA, B, lamB, omega, T):
    """``int_T^inf exp(-2 omega t) fA_i fB_j`` for exponential sums in ``t - T``."""
    denom = 2 * omega - lamA[:, None] - lamB[None, :]
    return np.exp(-2 * omega * T) * np.real(A @ (1.0 / denom) @ B.T)


def assemble_normal_system(basis, acf, rhs, space, refine=1, check_psd=True):
    """Normal matrix ``A`` and vector ``b`` of the Sobolev loss.

    ``A_ij = <psi_i*h, psi_j*h>`` and ``b_i = <psi_i*h, g>`` in
    ``H^1_alpha(rho)``. Gauss-Legendre quadrature (16 nodes per panel) on
    knot-aligned panels over ``[0, T]``; closed forms past ``T``.

    Parameters
    ----------
    refine : int
        Split every panel into this many pieces (for convergence checks).

    Returns
    -------
    A : ndarray, shape (K, K)
    b : ndarray, shape (K,)
    """
    a1, a2 = space.alpha
    w = space.omega
    T = basis.T
    edges = _panels(basis, [acf, rhs])
    if refine > 1:
        edges = np.unique(np.concatenate([np.linspace(a, b, refine + 1) for a, b in zip(edges[:-1], edges[1:])]))
    tq, wq = _gauss_points(edges)
    wq = wq * np.exp(-2 * w * tq)
    cb = convolve_basis(basis, acf)
    V = cb(tq)
    dV = cb.derivative(tq)
    gv, dg = rhs(tq), rhs.derivative()(tq)
    A = a1 * (V.T * wq) @ V + a2 * (dV.T * wq) @ dV
    b = a1 * (V.T * wq) @ gv + a2 * (dV.T * wq) @ dg

    # exact tail on [T, inf)
    tail = cb.tail
    lam = acf.exponents
    gt = rhs.weights * np.exp(rhs.exponents * T)
    A += a1 * _tail_gram(tail, lam, tail, lam, w, T) + a2 * _tail_gram(tail * lam, lam, tail * lam, lam, w, T)
    b += (a1 * _tail_gram(tail, lam, gt[None, :], rhs.exponents, w, T)
          + a2 * _tail_gram(tail * lam, lam, (gt * rhs.exponents)[None, :], rhs.exponents, w, T))[:, 0]

    A = 0.5 * (A + A.T)
    if check_psd:
        ev = np.linalg.eigvalsh(A)
        if ev[0] < -1e-10 * max(np.trace(A), 1e-300):
            raise AccuracyError(f"normal matrix is not positive semidefinite (min eigenvalue {ev[0]:.3e})")
    return A, b


def h1_norm_sq(rhs, space):
    """``||g||^2`` in ``H^1_alpha(rho)`` for an exponential sum (closed form)."""
    a1, a2 = space.alpha
    return a1 * rhs.l2_rho_sq(space.omega) + a2 * rhs.derivative().l2_rho_sq(space.omega)


# -- regularized solve ---------------------------------------------------------------
def default_rkhs_grid():
    return np.logspace(-12, 0, 30)


def solve_rkhs(A, b, lcurve_grid=None, lam_reg=None, pinv_tol=1e-10, const=None, return_curve=False):
    """Minimize ``c'Ac - 2b'c + lam c'A^+ c``.

    With ``A = Q diag(s) Q'`` the minimizer is ``Q diag(s / (s^2 + lam)) Q'b``
    on eigenvalues ``s > pinv_tol * s_max``; the null-space part of ``c`` is
    zero. If ``lam_reg`` is None it is picked at the L-curve corner over
    ``lcurve_grid * trace(A) / K`` (default 30 points in ``[1e-12, 1]``).
    The curve's residual is ``sqrt(loss)`` when the constant ``const =
    ||g||^2`` is given and ``||Ac - b||`` otherwise.

    Returns
    -------
    c : ndarray
    info : dict
        ``lambda_reg``, ``loss`` (if ``const`` given), ``residual`` and
        ``range_residual`` (the part of ``b`` outside the range of ``A``).
    """
    A = np.asarray(A, float)
    b = np.asarray(b, float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or b.shape != (A.shape[0],):
        raise ValidationError("A must be square and match b")
    s, Q = np.linalg.eigh(0.5 * (A + A.T))
    smax = max(s[-1], 0.0)
    keep = s > pinv_tol * smax if smax > 0 else np.zeros(s.size, bool)
    s, Q = s[keep], Q[:, keep]
    beta = Q.T @ b
    range_res = float(np.linalg.norm(b - Q @ beta))
    if range_res > 1e-8 * max(np.linalg.norm(b), 1e-300):
        log.warning("b has a component outside the numerical range of A (%.2e)", range_res)

    def solve(lam):
        return Q @ (s * beta / (s * s + lam))

    def curve_point(c):
        y = Q.T @ c
        pen = float(np.sqrt(np.sum(y * y / s))) if s.size else 0.0
        if const is None:
            res = float(np.linalg.norm(A @ c - b))
        else:
            res = float(np.sqrt(max(c @ A @ c - 2 * b @ c + const, 0.0)))
        return res, pen

    info = {}
    if lam_reg is None and s.size:
        grid = (default_rkhs_grid() if lcurve_grid is None else np.asarray(lcurve_grid, float))
        grid = grid * np.trace(A) / A.shape[0]
        cs = [solve(l) for l in grid]
        pts = np.array([curve_point(c) for c in cs])
        i = lcurve_corner(pts[:, 0], pts[:, 1])
        lam_reg, c = float(grid[i]), cs[i]
        if return_curve:
            info.update(curve_lambda=grid, curve_residual=pts[:, 0], curve_penalty=pts[:, 1])
    else:
        lam_reg = 0.0 if lam_reg is None else float(lam_reg)
        c = solve(lam_reg) if s.size else np.zeros_like(b)
    res, pen = curve_point(c) if s.size else (float(np.linalg.norm(b)), 0.0)
    info.update(lambda_reg=lam_reg, residual=res, penalty=pen, range_residual=range_res, rank=int(s.size))
    if const is not None:
        info["loss"] = float(c @ A @ c - 2 * b @ c + const)
    return c, info


# -- estimates --------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class KernelEstimate:
    """Spline memory-kernel estimate with its provenance."""

    basis: SplineBasis
    coef: np.ndarray
    loss: str = "E"
    lambda_reg: float = 0.0
    omega: float = None
    alpha: tuple = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.asarray(self.coef, float)
        if c.shape != (self.basis.size,) or not np.all(np.isfinite(c)):
            raise ValidationError("coefficients must be finite and match the basis size")
        object.__setattr__(self, "coef", c)

    def __call__(self, t):
        return self.basis.evaluate(self.coef, t)

    def derivative(self, t, nu=1):
        return self.basis.evaluate(self.coef, t, nu)

    @property
    def breakpoints(self):
        return self.basis.knots

    @property
    def support(self):
        return 0.0, self.basis.T

    def metadata(self):
        return {
            "loss": self.loss,
            "omega": self.omega,
            "alpha": list(self.alpha) if self.alpha is not None else None,
            "lambda_reg": self.lambda_reg,
            "T": self.basis.T,
            "n_knots": self.basis.n_knots,
            **{k: v for k, v in self.meta.items() if isinstance(v, (int, float, str))},
        }

    def write(self, csv_path, json_path=None):
        """Knots and coefficients as CSV, metadata as JSON."""
        with open(csv_path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["index", "knot", "coef"])
            for i, c in enumerate(self.coef):
                knot = repr(float(self.basis.knots[i])) if i < self.basis.knots.size else ""
                wr.writerow([i, knot, repr(float(c))])
        if json_path is not None:
            with open(json_path, "w") as fh:
                json.dump(self.metadata(), fh, indent=2)

    @classmethod
    def read(cls, csv_path, json_path):
        with open(json_path) as fh:
            meta = json.load(fh)
        with open(csv_path, newline="") as fh:
            coef = [float(r["coef"]) for r in csv.DictReader(fh)]
        basis = SplineBasis(meta["T"], meta["n_knots"])
        alpha = tuple(meta["alpha"]) if meta.get("alpha") is not None else None
        return cls(basis, coef, meta["loss"], meta["lambda_reg"], meta["omega"], alpha)


def estimate_kernel(acf, rhs, basis, space=None, loss="E", omega=None, lcurve_grid=None, lam_reg=None,
                    pinv_tol=1e-10):
    """Spline kernel estimate from correlation fits.

    Parameters
    ----------
    acf, rhs : PronySeries
        Autocorrelation fit and right-hand side (``-acf'`` when there is no
        external force, ``-acf' + force_corr`` otherwise).
    basis : SplineBasis
    space : WeightedSpace, optional
        Used for ``loss="E"``. For ``E1``/``E2`` only its ``omega`` is read.
    loss : {"E", "E1", "E2"}
    omega : float, optional
        Alternative to ``space`` for ``E1``/``E2``.

    Returns
    -------
    KernelEstimate
    """
    if loss not in ("E", "E1", "E2"):
        raise ValidationError(f"unknown loss {loss!r}")
    if space is None:
        if omega is None:
            raise ValidationError("need a WeightedSpace or omega")
        if loss == "E":
            space = WeightedSpace(omega, alpha_from_h(acf))
    om = space.omega if space is not None else omega
    if loss != "E":
        space = WeightedSpace.for_loss(om, loss)
    A, b = assemble_normal_system(basis, acf, rhs, space)
    const = h1_norm_sq(rhs, space)
    c, info = solve_rkhs(A, b, lcurve_grid, lam_reg, pinv_tol, const)
    return KernelEstimate(basis, c, loss, info["lambda_reg"], space.omega, space.alpha,
                          {"loss_value": info["loss"], "residual": info["residual"]})


def sobolev_loss(theta, acf, rhs, space, n_panels_per_knot=2):
    """Direct evaluation of the loss for a spline estimate ``theta``.

    Independent of :func:`assemble_normal_system`: the convolution
    ``theta * h`` is formed from ``theta``'s own coefficients.
    """
    coef = theta.coef if isinstance(theta, KernelEstimate) else np.asarray(theta, float)
    basis = theta.basis if isinstance(theta, KernelEstimate) else None
    if basis is None:
        raise ValidationError("theta must be a KernelEstimate")
    a1, a2 = space.alpha
    edges = _panels(basis, [acf, rhs], max_width=basis.T / max(basis.n_knots - 1, 1) / n_panels_per_knot)
    tq, wq = _gauss_points(edges)
    wq = wq * np.exp(-2 * space.omega * tq)
    cb = convolve_basis(basis, acf)
    f = cb(tq) @ coef
    df = cb.derivative(tq) @ coef
    r0 = rhs(tq) - f
    r1 = rhs.derivative()(tq) - df
    body = a1 * np.sum(wq * r0 * r0) + a2 * np.sum(wq * r1 * r1)
    # past T: residual is an exponential sum in t - T
    ft = coef @ cb.tail
    gt = rhs.weights * np.exp(rhs.exponents * basis.T)
    res_w = np.concatenate([gt, -ft])
    res_l = np.concatenate([rhs.exponents, acf.exponents])
    tail = (a1 * _tail_gram(res_w[None], res_l, res_w[None], res_l, space.omega, basis.T)
            + a2 * _tail_gram((res_w * res_l)[None], res_l, (res_w * res_l)[None], res_l, space.omega, basis.T))
    return float(body + tail[0, 0])


class SobolevKernelRegressor(BaseEstimator):
    """Spline kernel regression from fitted correlation functions.

    ``fit(h, g)`` takes two :class:`PronySeries`; ``predict(t)`` evaluates the
    estimated kernel.

    Parameters
    ----------
    omega : float, default=0.05
    loss : {"E", "E1", "E2"}, default="E"
    alpha : pair or None
        Sobolev weights for ``loss="E"``; derived from ``acf`` when None.
    alpha_convention : str, default="balanced"
    T : float, default=30.0
    n_knots : int, default=30
    lcurve_grid : array_like or None
    """

    def __init__(self, omega=0.05, loss="E", alpha=None, alpha_convention="balanced", T=30.0, n_knots=30,
                 lcurve_grid=None, pinv_tol=1e-10):
        self.omega = omega
        self.loss = loss
        self.alpha = alpha
        self.alpha_convention = alpha_convention
        self.T = T
        self.n_knots = n_knots
        self.lcurve_grid = lcurve_grid
        self.pinv_tol = pinv_tol

    def fit(self, acf, rhs):
        if not isinstance(acf, PronySeries) or not isinstance(rhs, PronySeries):
            raise ValidationError("h and g must be PronySeries")
        basis = SplineBasis(self.T, self.n_knots)
        alpha = self.alpha
        if self.loss == "E" and alpha is None:
            alpha = alpha_from_h(acf, self.alpha_convention)
            if self.alpha_convention != "balanced":
                alpha = (alpha[0] / sum(alpha), alpha[1] / sum(alpha))
        space = WeightedSpace.for_loss(self.omega, self.loss, alpha)
        self.alpha_ = space.alpha
        self.kernel_ = estimate_kernel(acf, rhs, basis, space, self.loss, lcurve_grid=self.lcurve_grid,
                                       pinv_tol=self.pinv_tol)
        self.coef_ = self.kernel_.coef
        return self

    def predict(self, t):
        check_is_fitted(self, "kernel_")
        return self.kernel_(np.asarray(t, float))
