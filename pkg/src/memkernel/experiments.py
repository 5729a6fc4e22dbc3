"""Reproducible experiment scenarios and parameter sweeps.

A :class:`Scenario` bundles everything needed to go from a ground-truth
kernel to kernel estimates and oracle diagnostics. :data:`PRESETS` holds the
reference setups; :func:`run_sweep` varies one setting over a grid, reusing
data where the axis allows (one dataset for ``omega``, one latent trajectory
re-observed for ``sigma_obs``, nested member prefixes for ``ensemble_size``
and nested time prefixes for ``traj_length``).

Seeds: trial ``k`` of master seed ``s`` uses
``SeedSequence([s, k]).generate_state(1)[0]`` as its base seed, and member
``m`` within the trial uses ``base + m``.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .correlation import ensemble_corr
from .exceptions import MemKernelError, ValidationError
from .gle_sim import (
    DriftSpec,
    ForceSpec,
    KernelSpec,
    NoiseConfig,
    ObservationConfig,
    SimConfig,
    TrajectoryEnsemble,
    observe,
    simulate_ensemble,
)
from .prony import PronyConfig
from .prony_series import PronySeries
from .pipeline import evaluate, run_pipeline
from .sobolev import SplineBasis

log = logging.getLogger(__name__)

__all__ = [
    "FIVE_MODE_WEIGHTS",
    "FIVE_MODE_EXPONENTS",
    "five_mode_kernel",
    "Scenario",
    "PRESETS",
    "preset",
    "trial_seed",
    "simulate",
    "estimate",
    "run_trial",
    "run_sweep",
    "summarize",
    "loglog_slope",
    "SWEEP_AXES",
]

FIVE_MODE_WEIGHTS = (0.3488, 0.3488, 0.3615, 0.5300, 0.3045)
FIVE_MODE_EXPONENTS = (-0.1631 - 0.3211j, -0.1631 + 0.3211j, -0.8262, -0.9178, -0.3352)
SWEEP_AXES = ("omega", "sigma_obs", "ensemble_size", "traj_length")


def five_mode_kernel():
    """Reference five-mode exponential kernel (one conjugate pair, three real modes)."""
    return PronySeries(FIVE_MODE_WEIGHTS, FIVE_MODE_EXPONENTS)


@dataclass(frozen=True)
class Scenario:
    """Simulation, observation and estimation settings for one experiment.

    ``alpha=None`` derives the Sobolev weights from the ``h`` fit.
    ``anchor`` selects the correlation average (see ``ensemble_corr``).
    """

    kernel: KernelSpec
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    observation: ObservationConfig = field(default_factory=ObservationConfig)
    prony: PronyConfig = field(default_factory=PronyConfig)
    basis: SplineBasis = field(default_factory=SplineBasis)
    n_lags: int = 24
    omega: float = 0.05
    alpha: tuple = None
    alpha_convention: str = "balanced"
    anchor: str = "time"
    n_members: int = 1

    def __post_init__(self):
        if self.n_lags < 1:
            raise ValidationError("n_lags must be positive")
        if self.n_members < 1:
            raise ValidationError("n_members must be positive")
        if not self.omega > 0:
            raise ValidationError("omega must be positive")

    @property
    def force(self):
        return self.sim.force

    def with_length(self, n_steps):
        """Same scenario with ``n_steps`` latent steps and an uncapped observation."""
        return replace(self, sim=replace(self.sim, n_steps=int(n_steps)),
                       observation=replace(self.observation, length_cap=None))

    def to_dict(self):
        return {
            "kernel": self.kernel.to_dict(),
            "noise": {k: v for k, v in asdict(self.noise).items() if k != "seed"},
            "sim": {"dt": self.sim.dt, "n_steps": self.sim.n_steps, "v0_std": self.sim.v0_std,
                    "force": {"kind": self.sim.force.kind, "mu": self.sim.force.mu},
                    "drift": {"kind": self.sim.drift.kind},
                    "memory_horizon": self.sim.memory_horizon, "block": self.sim.block},
            "observation": {"ratio": self.observation.ratio, "sigma_obs": self.observation.sigma_obs,
                            "length_cap": self.observation.length_cap},
            "prony": {"p_prime": self.prony.p_prime, "sigma": self.prony.sigma,
                      "constrain_derivative_zero": self.prony.constrain_derivative_zero,
                      "clamp": self.prony.clamp, "penalty": self.prony.penalty,
                      "pinv_tol": self.prony.pinv_tol},
            "basis": {"T": self.basis.T, "n_knots": self.basis.n_knots},
            "n_lags": self.n_lags,
            "omega": self.omega,
            "alpha": None if self.alpha is None else list(self.alpha),
            "alpha_convention": self.alpha_convention,
            "anchor": self.anchor,
            "n_members": self.n_members,
        }


def _five_mode():
    # Observation keeps L / (2 r) samples of the latent path.
    n_steps, ratio = 2**16, 70
    return Scenario(
        kernel=KernelSpec.prony(five_mode_kernel()),
        noise=NoiseConfig(n_freq=10000),
        sim=SimConfig(dt=0.01, n_steps=n_steps),
        observation=ObservationConfig(ratio=ratio, sigma_obs=0.1, length_cap=n_steps // (2 * ratio)),
        n_lags=24,
        omega=0.05,
    )


def _fine(kernel, n_steps, n_members, force="zero", drift="zero", alpha=None):
    # n_freq = 8000 puts the noise grid on dt = 0.0125 with delta_freq = pi / 100
    return Scenario(
        kernel=kernel,
        noise=NoiseConfig(n_freq=8000),
        sim=SimConfig(dt=0.0125, n_steps=n_steps, force=ForceSpec(force), drift=DriftSpec(drift)),
        observation=ObservationConfig(ratio=10, sigma_obs=0.01),
        prony=PronyConfig(p_prime=10),
        basis=SplineBasis(30.0, 50),
        n_lags=30,
        omega=0.05,
        alpha=alpha,
        n_members=n_members,
    )


PRESETS = {
    "five_mode": _five_mode,
    "exponential_long": lambda: _fine(KernelSpec.exponential(), 2**16, 1),
    "exponential_ensemble": lambda: _fine(KernelSpec.exponential(), 2**12, 2000),
    "power_law_long": lambda: _fine(KernelSpec.power_law(), 2**16, 1),
    "power_law_ensemble": lambda: _fine(KernelSpec.power_law(), 2**12, 2000),
    "double_well_short": lambda: _fine(KernelSpec.power_law(), 2**12, 1, "double_well",
                                       alpha=(0.9725, 0.0275)),
    "double_well_long": lambda: _fine(KernelSpec.power_law(), 2**16, 1, "double_well",
                                      alpha=(0.9805, 0.0195)),
    "double_well_ensemble": lambda: _fine(KernelSpec.power_law(), 2**12, 2000, "double_well",
                                          alpha=(0.9999, 0.0001)),
    "duffing": lambda: _fine(KernelSpec.power_law(), 2**12, 2000, "double_well", "duffing",
                             alpha=(0.9999, 0.0001)),
}


def preset(name, **overrides):
    """A named reference scenario, optionally with top-level fields replaced."""
    try:
        sc = PRESETS[name]()
    except KeyError:
        raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return replace(sc, **overrides) if overrides else sc


def trial_seed(master, trial):
    """Base seed of a trial, derived from the master seed by a counter scheme."""
    return int(np.random.SeedSequence([int(master), int(trial)]).generate_state(1)[0])


def simulate(sc, seed, n_members=None, n_steps=None):
    """Latent ensemble (``n_members`` paths of ``n_steps``) for scenario ``sc``."""
    sim = sc.sim if n_steps is None else replace(sc.sim, n_steps=int(n_steps))
    with warnings.catch_warnings():
        # the antiperiodic noise extension is intended for long runs
        warnings.filterwarnings("ignore", message=".*period.*")
        return simulate_ensemble(sc.kernel, sc.noise, sim, n_members or sc.n_members, seed=seed)


def _observe(sc, latent, seed, sigma_obs=None):
    obs = replace(sc.observation, seed=int(seed))
    if sigma_obs is not None:
        obs = replace(obs, sigma_obs=float(sigma_obs))
    return observe(latent, obs)


def estimate(sc, observed, losses=("E", "E1", "E2"), omega=None, with_theta_L=True):
    """Run the estimation pipeline on observed data."""
    return run_pipeline(observed, sc.n_lags, sc.omega if omega is None else omega, prony_cfg=sc.prony,
                        basis=sc.basis, force=sc.force, losses=losses, alpha=sc.alpha,
                        alpha_convention=sc.alpha_convention, with_theta_L=with_theta_L,
                        anchor=sc.anchor)


def _diagnose(sc, res):
    beta = sc.noise.beta
    row = evaluate(res, sc.kernel, beta=beta)
    row["lambda_h"] = res.acf.meta.get("lambda_reg", np.nan)
    return row


def run_trial(sc, seed, losses=("E", "E1", "E2"), with_theta_L=True):
    """Simulate, observe and estimate once; returns the diagnostics dict."""
    latent = simulate(sc, seed)
    res = estimate(sc, _observe(sc, latent, seed), losses, with_theta_L=with_theta_L)
    return _diagnose(sc, res)


def _safe(fn, *args, **kw):
    try:
        return fn(*args, **kw)
    except MemKernelError as exc:
        log.warning("sweep point failed: %s", exc)
        return {"error": f"{type(exc).__name__}: {exc}"}


def run_sweep(sc, axis, grid, n_trials=1, seed=0, losses=("E", "E1", "E2"), with_theta_L=True):
    """Errors and bounds per grid point and trial.

    Parameters
    ----------
    sc : Scenario
    axis : {"omega", "sigma_obs", "ensemble_size", "traj_length"}
        ``traj_length`` counts latent steps; its observations keep every
        ``ratio``-th step without a length cap.
    grid : sequence
    n_trials : int
        Independent repetitions with seeds from :func:`trial_seed`.

    Returns
    -------
    list of dict
        One row per ``(trial, value)`` with ``axis``, ``value``, ``trial``,
        ``seed`` and the diagnostics of :func:`pipeline.evaluate`. Failed
        points carry an ``error`` entry instead.
    """
    if axis not in SWEEP_AXES:
        raise ValidationError(f"unknown sweep axis {axis!r}; choose from {SWEEP_AXES}")
    grid = [float(rhs) for rhs in grid] if axis in ("omega", "sigma_obs") else [int(rhs) for rhs in grid]
    if not grid:
        raise ValidationError("empty sweep grid")
    rows = []
    for trial in range(int(n_trials)):
        base = trial_seed(seed, trial)
        if axis == "ensemble_size":
            latent = simulate(sc, base, n_members=max(grid))
            observed = _observe(sc, latent, base)
        elif axis == "traj_length":
            long_sc = sc.with_length(max(grid))
            latent = simulate(long_sc, base)
            observed = None
        else:
            latent = simulate(sc, base)
            observed = _observe(sc, latent, base)
        if axis == "omega":
            corr = ensemble_corr(observed.data, sc.n_lags, observed.dt,
                                 None if sc.force.is_zero else sc.force, sc.anchor)
        for value in grid:
            if axis == "omega":
                out = _safe(lambda: _diagnose(sc, estimate(sc, corr, losses, omega=value,
                                                           with_theta_L=with_theta_L)))
            elif axis == "sigma_obs":
                out = _safe(lambda: _diagnose(sc, estimate(sc, _observe(sc, latent, base, value), losses,
                                                           with_theta_L=with_theta_L)))
            elif axis == "ensemble_size":
                out = _safe(lambda: _diagnose(sc, estimate(sc, observed.head(value), losses,
                                                           with_theta_L=with_theta_L)))
            else:
                part = TrajectoryEnsemble(latent.data[:, :value], latent.dt, latent.seeds)
                sub = long_sc.with_length(value)
                out = _safe(lambda: _diagnose(sub, estimate(sub, _observe(sub, part, base), losses,
                                                            with_theta_L=with_theta_L)))
            rows.append({"axis": axis, "value": value, "trial": trial, "seed": base, **out})
    return rows


def summarize(rows, key="err_E", quantiles=(0.1, 0.5, 0.9)):
    """Mean and quantiles of ``key`` per grid value (failed points skipped)."""
    values = sorted({r["value"] for r in rows})
    out = []
    for v in values:
        x = np.array([r[key] for r in rows if r["value"] == v and key in r], float)
        x = x[np.isfinite(x)]
        rec = {"value": v, "n": int(x.size), "mean": float(x.mean()) if x.size else np.nan}
        for q in quantiles:
            rec[f"q{int(round(100 * q))}"] = float(np.quantile(x, q)) if x.size else np.nan
        out.append(rec)
    return out


def loglog_slope(x, y):
    """Least-squares slope of ``log y`` against ``log x``."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    ok = (x > 0) & (y > 0) & np.isfinite(y)
    if ok.sum() < 2:
        raise ValidationError("need two positive points for a slope")
    return float(np.polyfit(np.log(x[ok]), np.log(y[ok]), 1)[0])
