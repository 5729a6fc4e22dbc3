"""Discrete correlation estimates from observed trajectories.

``h_n = <v_l v_{l+n}>`` and ``phi_n = <v_l F(v_{l+n})>`` are averaged over
time (one trajectory) or over time and members (an ensemble). The lag-0
autocorrelation is biased by the observation noise variance and is never
returned; the force correlation keeps lag 0.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from ._validation import check_trajectories
from .exceptions import ValidationError

__all__ = [
    "CorrelationEstimate",
    "temporal_acf",
    "temporal_force_corr",
    "ensemble_corr",
    "write_correlation_csv",
    "read_correlation_csv",
]


@dataclass(frozen=True, eq=False)
class CorrelationEstimate:
    """Lagged correlation samples.

    Attributes
    ----------
    dt_obs : float
        Observation time step.
    values_h : ndarray, shape (N,)
        ``h_1 .. h_N`` (lag 0 excluded).
    values_phi : ndarray, shape (N + 1,) or None
        ``phi_0 .. phi_N``.
    n_terms : ndarray, shape (N + 1,)
        Summand count ``(L - n) M`` per lag ``n = 0..N``.
    """

    dt_obs: float
    values_h: np.ndarray
    values_phi: np.ndarray = None
    n_terms: np.ndarray = None

    def __post_init__(self):
        acf = np.asarray(self.values_h, float)
        if acf.ndim != 1 or acf.size < 1:
            raise ValidationError("values_h must hold at least one lag")
        object.__setattr__(self, "values_h", acf)
        if self.values_phi is not None:
            force_corr = np.asarray(self.values_phi, float)
            if force_corr.shape != (acf.size + 1,):
                raise ValidationError("values_phi must cover lags 0..N")
            object.__setattr__(self, "values_phi", force_corr)
        if self.n_terms is not None:
            n = np.asarray(self.n_terms, int)
            if n.shape != (acf.size + 1,) or np.any(n <= 0):
                raise ValidationError("n_terms must be positive for lags 0..N")
            object.__setattr__(self, "n_terms", n)

    @property
    def n_lags(self):
        return self.values_h.size

    @property
    def lags(self):
        return np.arange(1, self.n_lags + 1)

    @property
    def times(self):
        return self.lags * self.dt_obs

    @property
    def phi_estimate(self):
        """Force-correlation samples as a stand-alone estimate (lags 0..N)."""
        if self.values_phi is None:
            return None
        return self.values_phi


def _check_lags(N, L):
    if N < 1:
        raise ValidationError("need at least one lag")
    if N >= L:
        raise ValidationError(f"lag count N={N} must be smaller than the length L={L}")


def _lag_products(X, N, fX=None):
    """Per-lag sums of ``X[:, l] * fX[:, l + n]`` for n = 0..N."""
    fX = X if fX is None else fX
    L = X.shape[1]
    out = np.empty(N + 1)
    for n in range(N + 1):
        # np.sum uses pairwise summation along contiguous rows
        out[n] = np.sum(np.sum(X[:, :L - n] * fX[:, n:], axis=1))
    return out


def _apply_force(force, X):
    from .gle_sim import as_force  # local import: gle_sim depends on this module's types

    return as_force(force)(X)


def ensemble_corr(X, N, dt_obs, force=None, anchor="time"):
    """Correlation estimate averaged over members (and time).

    Parameters
    ----------
    X : array_like, shape (M, L) or (L,)
        Observed trajectories sharing length and time step.
    N : int
        Number of lags.
    dt_obs : float
        Observation time step.
    force : ForceSpec, callable or None
        If given, the force correlation ``phi_n`` is estimated as well.
    anchor : {"time", "origin"}
        ``"time"`` averages over every start index ``l``. ``"origin"`` pairs
        each member's later samples with its first sample only, which is the
        consistent choice for ensembles started out of equilibrium: memory
        and noise before a later start index are then correlated with
        ``v_l`` and the time average no longer satisfies the Volterra
        relation.
    """
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        raise ValidationError("empty ensemble")
    X = check_trajectories(X)
    M, L = X.shape
    _check_lags(N, L)
    if anchor == "time":
        counts = (L - np.arange(N + 1)) * M
        acf = _lag_products(X, N) / counts
        force_corr = None if force is None else _lag_products(X, N, _apply_force(force, X)) / counts
    elif anchor == "origin":
        counts = np.full(N + 1, M)
        head = X[:, :N + 1]
        acf = X[:, 0] @ head / M
        force_corr = None if force is None else X[:, 0] @ _apply_force(force, head) / M
    else:
        raise ValidationError(f"unknown anchor {anchor!r}")
    return CorrelationEstimate(float(dt_obs), acf[1:], force_corr, counts)


def temporal_acf(obs, N, dt_obs=1.0):
    """Time-averaged autocorrelation ``h_1..h_N`` of a single sequence."""
    obs = np.asarray(obs, float)
    if obs.ndim != 1:
        raise ValidationError("temporal_acf expects a single 1-d sequence")
    return ensemble_corr(obs[None, :], N, dt_obs)


def temporal_force_corr(obs, force, N):
    """``phi_n = 1/(L-n) sum_l v_l F(v_{l+n})`` for ``n = 0..N``."""
    obs = np.asarray(obs, float)
    if obs.ndim != 1:
        raise ValidationError("temporal_force_corr expects a single 1-d sequence")
    _check_lags(N, obs.size)
    X = obs[None, :]
    counts = obs.size - np.arange(N + 1)
    return _lag_products(X, N, _apply_force(force, X)) / counts


def write_correlation_csv(est, path):
    """Columns ``n, t, h_n, phi_n, count`` for lags 0..N (``h_0`` left blank)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["n", "t", "h_n", "phi_n", "count"])
        for n in range(est.n_lags + 1):
            acf = "" if n == 0 else repr(float(est.values_h[n - 1]))
            force_corr = "" if est.values_phi is None else repr(float(est.values_phi[n]))
            count = "" if est.n_terms is None else int(est.n_terms[n])
            w.writerow([n, repr(n * est.dt_obs), acf, force_corr, count])


def read_correlation_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or rows[0]["n"] != "0":
        raise ValidationError(f"{path}: expected rows for lags 0..N")
    dt = float(rows[1]["t"]) if len(rows) > 1 else 1.0
    acf = [float(r["h_n"]) for r in rows[1:]]
    force_corr = None if rows[0]["phi_n"] == "" else [float(r["phi_n"]) for r in rows]
    counts = None if rows[0]["count"] == "" else [int(r["count"]) for r in rows]
    return CorrelationEstimate(dt, acf, force_corr, counts)
