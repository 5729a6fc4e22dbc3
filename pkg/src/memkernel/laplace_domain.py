"""Closed-form Laplace-domain algebra on exponential sums.

Transforms of Prony series are rational functions, so quotients such as
``L[g] / L[h]`` can be split into partial fractions and inverted exactly.
This gives the inverse-Laplace kernel estimator and the map from a Prony
memory kernel to the autocorrelation it induces.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.special import wofz

from .exceptions import (
    ConstraintViolationError,
    IllConditionedError,
    InstabilityError,
    PoleError,
    ValidationError,
)
from .prony_series import PronySeries, conjugate_symmetrize

__all__ = [
    "RationalLaplace",
    "DeltaKernel",
    "PartialFractions",
    "poly_from_roots",
    "laplace_eval",
    "rational_quotient",
    "partial_fractions",
    "theta_L",
    "kernel_to_acf",
]

MAX_DEGREE = 25


def poly_from_roots(roots):
    """Monic polynomial with the given roots, descending coefficients.

    Roots are scaled by the largest modulus before expansion to keep
    intermediate coefficients bounded.
    """
    roots = np.asarray(roots, dtype=complex)
    if roots.size > MAX_DEGREE:
        raise IllConditionedError(
            f"polynomial degree {roots.size} exceeds {MAX_DEGREE}; expansion is too ill-conditioned"
        )
    if roots.size == 0:
        return np.ones(1, complex)
    s = max(1.0, float(np.max(np.abs(roots))))
    c = np.poly(roots / s).astype(complex)
    return c * s ** np.arange(roots.size + 1)


def _transform_numerator(series):
    """Numerator ``sum_k w_k prod_{j != k} (z - lambda_j)`` of ``L[series]``."""
    p = series.n_modes
    num = np.zeros(max(p, 1), complex)
    for k in range(p):
        others = np.delete(series.exponents, k)
        num += series.weights[k] * poly_from_roots(others)
    return num


def _trim(c, tol=0.0):
    c = np.asarray(c, complex)
    nz = np.flatnonzero(np.abs(c) > tol)
    return c[nz[0]:] if nz.size else np.zeros(1, complex)


@dataclass(frozen=True, eq=False)
class RationalLaplace:
    """Ratio of complex polynomials ``num(z) / den(z)`` (descending order)."""

    num: np.ndarray
    den: np.ndarray
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        num = _trim(self.num)
        den = _trim(self.den)
        if den[0] == 0:
            raise ValidationError("denominator is identically zero")
        if num.size > den.size:
            raise ValidationError("improper rational function: deg(num) > deg(den)")
        # monic denominator
        object.__setattr__(self, "num", num / den[0])
        object.__setattr__(self, "den", den / den[0])

    @property
    def is_constant(self):
        return self.den.size == 1

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return np.polyval(self.num, z) / np.polyval(self.den, z)

    def to_dict(self):
        return {
            "type": "rational",
            "num": [[float(c.real), float(c.imag)] for c in self.num],
            "den": [[float(c.real), float(c.imag)] for c in self.den],
        }

    @classmethod
    def from_dict(cls, d):
        num = np.asarray(d["num"], float)
        den = np.asarray(d["den"], float)
        return cls(num[:, 0] + 1j * num[:, 1], den[:, 0] + 1j * den[:, 1])


@dataclass(frozen=True, eq=False)
class DeltaKernel:
    """Prony series plus a weighted (mollified) Dirac mass at the origin.

    The Dirac term is represented by a half-normal density of scale
    ``bandwidth`` so that its mass on ``[0, inf)`` equals ``delta_weight``.
    """

    series: PronySeries
    delta_weight: float = 0.0
    bandwidth: float = 0.0

    def __post_init__(self):
        if self.delta_weight != 0 and not self.bandwidth > 0:
            raise ValidationError("a nonzero delta weight needs a positive mollifier bandwidth")

    def mollifier(self, t):
        t = np.asarray(t, dtype=float)
        if self.delta_weight == 0:
            return np.zeros_like(t)
        b = self.bandwidth
        return np.where(t >= 0, 2.0 / (b * np.sqrt(2 * np.pi)) * np.exp(-0.5 * (t / b) ** 2), 0.0)

    def __call__(self, t):
        return self.series(t) + self.delta_weight * self.mollifier(t)

    def laplace(self, z, mollified=True):
        z = np.asarray(z, dtype=complex)
        out = self.series.laplace(z)
        if self.delta_weight != 0:
            if mollified:
                out = out + self.delta_weight * wofz(1j * z * self.bandwidth / np.sqrt(2.0))
            else:
                out = out + self.delta_weight
        return out

    @property
    def breakpoints(self):
        return np.array([0.0])

    def to_dict(self):
        d = self.series.to_dict()
        d.update(type="delta_kernel", C=float(self.delta_weight), bandwidth=float(self.bandwidth))
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(PronySeries.from_dict(d), float(d["C"]), float(d["bandwidth"]))


class PartialFractions(NamedTuple):
    constant: complex
    series: PronySeries
    reconstruction_error: float


def laplace_eval(series, z, pole_tol=1e-14):
    """``L[series](z) = sum_k w_k / (z - lambda_k)``.

    Raises :class:`PoleError` if ``z`` lies within ``pole_tol`` of an exponent.
    """
    z = np.asarray(z, dtype=complex)
    gap = np.abs(np.subtract.outer(z, series.exponents))
    if gap.size and np.min(gap) <= pole_tol * max(1.0, float(np.max(np.abs(z)))):
        raise PoleError("evaluation point coincides with a pole")
    return series.laplace(z)


def _match_exponents(a, b, tol):
    """Boolean masks of entries of ``a`` found in ``b`` and of ``b`` found in ``a``."""
    in_b = np.zeros(a.size, bool)
    in_a = np.zeros(b.size, bool)
    for i, x in enumerate(a):
        d = np.abs(b - x)
        d[in_a] = np.inf
        if d.size:
            j = int(np.argmin(d))
            if d[j] <= tol * max(1.0, abs(x)):
                in_b[i] = True
                in_a[j] = True
    return in_b, in_a


def rational_quotient(rhs, acf, strictly_proper=False, tol=1e-9, match_tol=1e-10):
    """Quotient ``L[g] / L[h]`` as a ratio of expanded polynomials.

    Exponents shared between ``rhs`` and ``acf`` cancel from the common
    denominators. With ``strictly_proper=True`` (the ``g = -h'`` case under the
    constraint ``sum w_k lambda_k = 0``) the top numerator coefficient must
    vanish to relative tolerance ``tol`` and is then removed.
    """
    rhs = rhs.simplify(match_tol)
    acf = acf.simplify(match_tol)
    if acf.n_modes == 0 or np.all(acf.weights == 0):
        raise ValidationError("denominator transform is identically zero")
    g_shared, h_shared = _match_exponents(rhs.exponents, acf.exponents, match_tol)
    num = np.polymul(_transform_numerator(rhs), poly_from_roots(acf.exponents[~h_shared]))
    den = np.polymul(poly_from_roots(rhs.exponents[~g_shared]), _transform_numerator(acf))
    num = np.pad(num, (max(0, den.size - num.size), 0))
    meta = {}
    if num.size > den.size:
        raise ValidationError("improper quotient")
    if num.size == den.size:
        lead = abs(num[0])
        scale = float(np.sum(np.abs(rhs.weights))) or 1.0
        meta["leading_ratio"] = lead / scale
        if strictly_proper:
            if lead > tol * scale:
                raise ConstraintViolationError(
                    f"numerator degree anomaly ({lead / scale:.2e} relative); "
                    "refit the Prony series with the derivative constraint"
                )
            num = num[1:]
    return RationalLaplace(num if num.size else np.zeros(1), den, meta)


def partial_fractions(R, root_sep=1e-6, n_test=50, seed=0):
    """Split ``R`` into ``C + sum_k u_k / (z - eta_k)``.

    Residues use the derivative rule ``u_k = Nr(eta_k) / D'(eta_k)`` where
    ``Nr = num - C den``. Poles closer than ``root_sep`` (relative to the
    largest modulus) raise :class:`IllConditionedError`; the default sits
    well above the ``~sqrt(eps)`` splitting of a double root by the
    eigenvalue solver.
    """
    num, den = R.num, R.den
    if den.size == 1:
        return PartialFractions(complex(num[-1] / den[0]), PronySeries.zero(), 0.0)
    C = num[0] / den[0] if num.size == den.size else 0.0
    rem = _trim(np.polysub(num, C * den)) if C != 0 else num
    try:
        poles = np.roots(den)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigensolver failure
        raise IllConditionedError(f"root finding failed: {exc}") from exc
    scale = max(1.0, float(np.max(np.abs(poles))))
    if poles.size > 1:
        d = np.abs(np.subtract.outer(poles, poles))
        np.fill_diagonal(d, np.inf)
        if np.min(d) <= root_sep * scale:
            raise IllConditionedError(
                "clustered poles in partial fraction decomposition; "
                "re-run the Prony fit with a different model order"
            )
    # D'(eta_k) in factored form; the expanded derivative loses digits for close poles
    diff = np.subtract.outer(poles, poles)
    np.fill_diagonal(diff, 1.0)
    residues = np.polyval(rem, poles) / (den[0] * np.prod(diff, axis=1))
    series = PronySeries(residues, poles)
    rng = np.random.default_rng(seed)
    zt = (2 * scale + 1) * np.exp(2j * np.pi * rng.random(n_test)) * (0.5 + rng.random(n_test))
    exact = R(zt)
    approx = C + series.laplace(zt)
    err = float(np.max(np.abs(exact - approx) / np.maximum(np.abs(exact), 1e-300)))
    return PartialFractions(complex(C), series, err)


def _real_constant(c, what, tol=1e-8):
    if abs(c.imag) > tol * max(1.0, abs(c)):
        raise ConstraintViolationError(f"{what} has a non-negligible imaginary part: {c}")
    return float(c.real)


def theta_L(acf, force_corr=None, bandwidth=None, tol=1e-9, prune_tol=1e-10):
    """Inverse-Laplace memory kernel estimate from Prony correlation fits.

    Parameters
    ----------
    acf : PronySeries
        Fitted autocorrelation; must satisfy ``sum w_k lambda_k = 0`` when
        ``force_corr`` is None.
    force_corr : PronySeries, optional
        Fitted force correlation (nonzero force case).
    bandwidth : float, optional
        Mollifier scale for the Dirac term. Defaults to ``acf.meta['dt_obs']``.
    prune_tol : float
        Modes with ``|u_k|`` below this fraction of ``sum |u|`` are dropped
        (round-off residues at spurious poles of exact data).

    Returns
    -------
    DeltaKernel
    """
    rhs = -acf.derivative()
    if force_corr is None:
        R = rational_quotient(rhs, acf, strictly_proper=True, tol=tol)
    else:
        R = rational_quotient(rhs + force_corr, acf)
    pf = partial_fractions(R)
    C = _real_constant(pf.constant, "delta weight")
    series = pf.series
    if series.n_modes:
        series = PronySeries(*conjugate_symmetrize(series.weights, series.exponents)).prune(prune_tol)
    if C != 0:
        if bandwidth is None:
            bandwidth = acf.meta.get("dt_obs")
        if bandwidth is None:
            raise ValidationError("mollifier bandwidth required for a nonzero delta term")
    return DeltaKernel(series, C, float(bandwidth or 0.0))


def kernel_to_acf(gamma, h0):
    """Autocorrelation induced by a Prony memory kernel.

    Expands ``L[h](z) = h0 / (z + L[gamma](z))`` and splits it into
    ``gamma.n_modes + 1`` exponential modes.

    Raises
    ------
    InstabilityError
        If a pole of ``L[h]`` has nonnegative real part.
    """
    if not h0 > 0:
        raise ValidationError("h0 must be positive")
    gamma.check_stable()
    D = poly_from_roots(gamma.exponents)
    N = _transform_numerator(gamma) if gamma.n_modes else np.zeros(1)
    den = np.polyadd(np.polymul([1.0, 0.0], D), N)
    R = RationalLaplace(h0 * D, den)
    pf = partial_fractions(R)
    if np.any(pf.series.exponents.real >= 0):
        raise InstabilityError("kernel does not admit a decaying stationary autocorrelation")
    w, lam = conjugate_symmetrize(pf.series.weights, pf.series.exponents)
    return PronySeries(w, lam, {"h0": float(h0)})
