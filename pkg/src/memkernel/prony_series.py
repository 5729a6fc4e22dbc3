"""Finite exponential sums ``f(t) = sum_k w_k exp(lambda_k t)``.

Correlation functions, their derivatives, Prony-type memory kernels and the
inverse-Laplace estimator are all carried around as :class:`PronySeries`.
Most integrals of such sums have closed forms, collected here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InvalidKernelError, ValidationError

__all__ = ["PronySeries", "conjugate_symmetrize"]


def _as_complex_1d(x, name):
    arr = np.atleast_1d(np.asarray(x, dtype=complex))
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be one-dimensional")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} must be finite")
    return arr


@dataclass(frozen=True, eq=False)
class PronySeries:
    """Sum of complex exponentials.

    Parameters
    ----------
    weights : array_like of complex
        Amplitudes ``w_k``.
    exponents : array_like of complex
        Rates ``lambda_k`` (units of 1/time).

    Examples
    --------
    >>> f = PronySeries([1.0], [-1.0])
    >>> float(f(0.0)), complex(f.laplace(1.0))
    (1.0, (0.5+0j))
    """

    weights: np.ndarray
    exponents: np.ndarray
    meta: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        w = _as_complex_1d(self.weights, "weights")
        lam = _as_complex_1d(self.exponents, "exponents")
        if w.shape != lam.shape:
            raise ValidationError("weights and exponents must have equal length")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "exponents", lam)

    # -- basic structure ---------------------------------------------------
    @classmethod
    def zero(cls):
        return cls(np.zeros(0, complex), np.zeros(0, complex))

    @property
    def n_modes(self):
        return self.weights.size

    def __len__(self):
        return self.n_modes

    def copy(self, **meta):
        return PronySeries(self.weights.copy(), self.exponents.copy(), {**self.meta, **meta})

    def __neg__(self):
        return PronySeries(-self.weights, self.exponents)

    def __add__(self, other):
        if not isinstance(other, PronySeries):
            return NotImplemented
        return PronySeries(
            np.concatenate([self.weights, other.weights]),
            np.concatenate([self.exponents, other.exponents]),
        )

    def __sub__(self, other):
        if not isinstance(other, PronySeries):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        return PronySeries(self.weights * scalar, self.exponents)

    __rmul__ = __mul__

    def simplify(self, tol=1e-12):
        """Merge modes with (numerically) equal exponents and drop zero weights."""
        w_out, lam_out = [], []
        for w, lam in zip(self.weights, self.exponents):
            for i, mu in enumerate(lam_out):
                if abs(lam - mu) <= tol * max(1.0, abs(mu)):
                    w_out[i] += w
                    break
            else:
                w_out.append(w)
                lam_out.append(lam)
        w_out = np.asarray(w_out, complex)
        lam_out = np.asarray(lam_out, complex)
        keep = w_out != 0
        return PronySeries(w_out[keep], lam_out[keep], dict(self.meta))

    def prune(self, rtol):
        """Drop modes whose weight is below ``rtol * sum |w|``."""
        if self.n_modes == 0:
            return self
        keep = np.abs(self.weights) > rtol * np.sum(np.abs(self.weights))
        return PronySeries(self.weights[keep], self.exponents[keep], dict(self.meta))

    # -- evaluation ----------------------------------------------------------
    def evaluate(self, t, real=True):
        """Evaluate at times ``t`` (any shape)."""
        t = np.asarray(t, dtype=float)
        vals = np.exp(np.multiply.outer(t, self.exponents)) @ self.weights
        return vals.real if real else vals

    def __call__(self, t):
        return self.evaluate(t)

    def derivative(self, order=1):
        return PronySeries(self.weights * self.exponents**order, self.exponents)

    @property
    def value_at_zero(self):
        return complex(self.weights.sum())

    @property
    def decay_rate(self):
        """``min_k -Re(lambda_k)``; infinite for the empty series."""
        if self.n_modes == 0:
            return np.inf
        return float(np.min(-self.exponents.real))

    def integral(self):
        """``int_0^inf f(t) dt``."""
        self.check_stable()
        return complex(np.sum(self.weights / -self.exponents))

    def laplace(self, z):
        """Laplace transform ``sum_k w_k / (z - lambda_k)`` at complex ``z``."""
        z = np.asarray(z, dtype=complex)
        return (1.0 / np.subtract.outer(z, self.exponents)) @ self.weights

    # -- invariants ----------------------------------------------------------
    def check_stable(self, strict=True):
        bad = self.exponents.real >= 0 if strict else self.exponents.real > 0
        if np.any(bad):
            raise InvalidKernelError(
                f"non-decaying exponent(s): {self.exponents[bad]}"
            )
        return self

    def imag_ratio(self, t=None):
        """``max |Im f| / max |f|`` on a test grid; zero for a real-valued sum."""
        if t is None:
            scale = 1.0 / max(self.decay_rate, 1e-3) if np.isfinite(self.decay_rate) else 1.0
            t = np.linspace(0.0, 10.0 * min(scale, 1e3), 2001)
        vals = self.evaluate(t, real=False)
        top = np.max(np.abs(vals)) if vals.size else 0.0
        if top == 0:
            return 0.0
        return float(np.max(np.abs(vals.imag)) / top)

    # -- closed-form integrals ----------------------------------------------
    def inner_rho(self, other, omega):
        """``int_0^inf f(t) conj(g(t)) exp(-2 omega t) dt`` in closed form."""
        denom = 2.0 * omega - np.add.outer(self.exponents, np.conj(other.exponents))
        if np.any(denom.real <= 0):
            raise InvalidKernelError("weighted integral diverges: Re(lambda) >= omega")
        return complex(self.weights @ (1.0 / denom) @ np.conj(other.weights))

    def l2_rho_sq(self, omega):
        """``int_0^inf |f(t)|^2 exp(-2 omega t) dt``."""
        return float(self.inner_rho(self, omega).real)

    def convolve(self, other, tol=1e-10):
        """Closed-form ``(f * g)(t) = int_0^t f(t - s) g(s) ds``.

        Exponent pairs must be distinct (no ``t exp(lambda t)`` terms).
        """
        w_out, lam_out = [], []
        for a, wa in zip(self.exponents, self.weights):
            for b, wb in zip(other.exponents, other.weights):
                if abs(a - b) <= tol * max(1.0, abs(a)):
                    raise ValidationError("coincident exponents give a secular term")
                c = wa * wb / (a - b)
                w_out += [c, -c]
                lam_out += [a, b]
        return PronySeries(w_out, lam_out).simplify()

    # -- serialization -------------------------------------------------------
    def to_records(self):
        """List of ``[Re w, Im w, Re lambda, Im lambda]`` rows."""
        return [
            [float(w.real), float(w.imag), float(lam.real), float(lam.imag)]
            for w, lam in zip(self.weights, self.exponents)
        ]

    def to_dict(self):
        return {"type": "prony", "modes": self.to_records()}

    @classmethod
    def from_records(cls, rows):
        rows = np.asarray(rows, dtype=float).reshape(-1, 4)
        return cls(rows[:, 0] + 1j * rows[:, 1], rows[:, 2] + 1j * rows[:, 3])

    @classmethod
    def from_dict(cls, d):
        return cls.from_records(d["modes"])

    def to_json(self):
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, s):
        return cls.from_dict(json.loads(s))

    def sorted(self):
        """Copy with modes sorted by (Re lambda, Im lambda)."""
        order = np.lexsort((self.exponents.imag, self.exponents.real))
        return PronySeries(self.weights[order], self.exponents[order], dict(self.meta))

    def __repr__(self):
        return f"PronySeries(n_modes={self.n_modes})"


def conjugate_symmetrize(weights, exponents, tol=1e-8):
    """Make ``(w, lambda)`` exactly closed under conjugation.

    Nearly-real exponents become real with real weights; for each conjugate
    exponent pair both entries are replaced by the average of the pair, so the
    sum is real-valued to rounding.

    Returns
    -------
    (weights, exponents) : tuple of complex ndarrays
    """
    w = np.array(weights, dtype=complex)
    lam = np.array(exponents, dtype=complex)
    used = np.zeros(lam.size, bool)
    for i in range(lam.size):
        if used[i]:
            continue
        used[i] = True
        scale = max(1.0, abs(lam[i]))
        if abs(lam[i].imag) <= tol * scale:
            w[i] = w[i].real
            lam[i] = lam[i].real
            continue
        d = np.abs(lam - np.conj(lam[i]))
        d[used] = np.inf
        j = int(np.argmin(d))
        if d[j] <= tol * scale:
            lam_avg = 0.5 * (lam[i] + np.conj(lam[j]))
            w_avg = 0.5 * (w[i] + np.conj(w[j]))
            lam[i], lam[j] = lam_avg, np.conj(lam_avg)
            w[i], w[j] = w_avg, np.conj(w_avg)
            used[j] = True
    return w, lam
