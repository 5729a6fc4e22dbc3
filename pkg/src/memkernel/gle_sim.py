"""Simulation of the generalized Langevin equation with colored noise.

The noise is Gaussian with autocovariance ``gamma(tau) / beta`` and is drawn
by the spectral representation method (random-phase cosine sums, evaluated
with an FFT on the matching time grid). Trajectories follow the explicit
Euler scheme with a left-endpoint Riemann sum for the memory term::

    v[l+1] = v[l] + dt * (F(v[l]) - dt * sum_{j<=l} gamma(t[l-j]) v[j] + R[l] + G(t[l]))

Prony kernels use an exact O(p) per-step recursion for the memory sum; other
kernels use blocked FFT convolutions.

Random streams: a member seed ``s`` drives the noise phases through
``default_rng([s, 1])``, the initial condition through ``default_rng([s, 2])``
and the observation noise through ``default_rng([s, 3])``. Ensemble member
``m`` uses ``s = base_seed + m``, so smaller ensembles are prefixes of
larger ones.
"""

from __future__ import annotations

import logging
import struct
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import irfft, next_fast_len, rfft
from scipy.integrate import quad, trapezoid

from ._validation import check_positive
from .exceptions import DivergenceError, InvalidKernelError, ValidationError
from .prony_series import PronySeries

log = logging.getLogger(__name__)

__all__ = [
    "KernelSpec",
    "NoiseConfig",
    "SimConfig",
    "ForceSpec",
    "DriftSpec",
    "ObservationConfig",
    "TrajectoryEnsemble",
    "as_force",
    "spectral_density",
    "simulate_noise",
    "simulate_trajectory",
    "observe",
    "simulate_ensemble",
    "write_trajectory_csv",
    "read_trajectory_csv",
    "write_trajectory_binary",
    "read_trajectory_binary",
]

NOISE_STREAM, V0_STREAM, OBS_STREAM = 1, 2, 3
CLIP_WARN_RTOL = 1e-8


def power_law_kernel(t):
    """``(1 - 3 t^2) / (1 + t^2)^3``; integrates to zero over the half-line."""
    t2 = np.asarray(t, float) ** 2
    return (1 - 3 * t2) / (1 + t2) ** 3


# -- kernels -----------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class KernelSpec:
    """Ground-truth memory kernel.

    Use the constructors :meth:`prony`, :meth:`exponential`,
    :meth:`power_law` and :meth:`tabulated`. Tabulated kernels are linearly
    interpolated and vanish past the last grid time.
    """

    variant: str
    series: PronySeries = None
    times: np.ndarray = None
    values: np.ndarray = None

    def __post_init__(self):
        if self.variant in ("prony", "exponential"):
            if not isinstance(self.series, PronySeries):
                raise InvalidKernelError("a Prony kernel needs a PronySeries")
            if np.any(self.series.exponents.real >= 0):
                raise InvalidKernelError("Prony kernel exponents must have negative real part")
            if self.series.imag_ratio() > 1e-10:
                raise InvalidKernelError("Prony kernel is not real valued (missing conjugate pairs)")
        elif self.variant == "tabulated":
            t = np.asarray(self.times, float)
            v = np.asarray(self.values, float)
            if t.ndim != 1 or t.shape != v.shape or t.size < 2:
                raise InvalidKernelError("tabulated kernel needs matching 1-d times and values")
            if t[0] != 0 or np.any(np.diff(t) <= 0):
                raise InvalidKernelError("tabulated times must start at 0 and increase strictly")
            if not np.all(np.isfinite(v)):
                raise InvalidKernelError("tabulated values must be finite")
            object.__setattr__(self, "times", t)
            object.__setattr__(self, "values", v)
        elif self.variant != "power_law":
            raise InvalidKernelError(f"unknown kernel variant {self.variant!r}")

    @classmethod
    def prony(cls, series):
        return cls("prony", series=series)

    @classmethod
    def exponential(cls, weight=1.0, rate=1.0):
        return cls("exponential", series=PronySeries([weight], [-rate]))

    @classmethod
    def power_law(cls):
        return cls("power_law")

    @classmethod
    def tabulated(cls, times, values):
        return cls("tabulated", times=times, values=values)

    @property
    def is_prony(self):
        return self.series is not None

    def __call__(self, t):
        t = np.asarray(t, float)
        if self.is_prony:
            return self.series(t)
        if self.variant == "power_law":
            return power_law_kernel(t)
        return np.interp(t, self.times, self.values, right=0.0)

    def to_dict(self):
        if self.variant == "exponential":
            return {"type": "exponential", "weight": float(self.series.weights[0].real),
                    "rate": float(-self.series.exponents[0].real)}
        if self.variant == "prony":
            return self.series.to_dict()
        if self.variant == "power_law":
            return {"type": "power_law"}
        return {"type": "tabulated", "times": self.times.tolist(), "values": self.values.tolist()}

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        kind = d.pop("type", None)
        if kind == "prony":
            if "weights" in d:
                return cls.prony(PronySeries(_complex_list(d["weights"]), _complex_list(d["exponents"])))
            return cls.prony(PronySeries.from_dict({"type": "prony", **d}))
        if kind == "exponential":
            return cls.exponential(**d)
        if kind == "power_law":
            if d:
                raise ValidationError(f"power_law kernel takes no parameters, got {sorted(d)}")
            return cls.power_law()
        if kind == "tabulated":
            return cls.tabulated(d["times"], d["values"])
        raise ValidationError(f"unknown kernel type {kind!r}")


def _complex_list(x):
    """Numbers or ``[re, im]`` pairs to a complex array."""
    out = []
    for v in x:
        if isinstance(v, (list, tuple)):
            if len(v) != 2:
                raise ValidationError(f"complex entries must be [re, im], got {v}")
            out.append(complex(v[0], v[1]))
        elif isinstance(v, str):
            out.append(complex(v.replace(" ", "")))
        else:
            out.append(complex(v))
    return np.asarray(out, complex)


# -- configs -----------------------------------------------------------------
@dataclass(frozen=True)
class NoiseConfig:
    beta: float = 1.0
    n_freq: int = 10000
    delta_freq: float = np.pi / 100
    seed: int = 0

    def __post_init__(self):
        check_positive("beta", self.beta)
        check_positive("delta_freq", self.delta_freq)
        if int(self.n_freq) != self.n_freq or self.n_freq < 1:
            raise ValidationError("n_freq must be a positive integer")

    @property
    def grid_dt(self):
        """Time step on which the FFT evaluation applies."""
        return np.pi / (self.n_freq * self.delta_freq)

    @property
    def period(self):
        return 2 * np.pi / self.delta_freq

    @property
    def frequencies(self):
        return (np.arange(self.n_freq) + 0.5) * self.delta_freq


@dataclass(frozen=True)
class ForceSpec:
    """External force ``F(v)``.

    ``kind`` is one of ``zero``, ``linear`` (``F(v) = -mu v``), ``double_well``
    (``F(v) = -v (v^2 - 4)``) or ``custom`` with ``func``.
    """

    kind: str = "zero"
    mu: float = 1.0
    func: object = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("zero", "linear", "double_well", "custom"):
            raise ValidationError(f"unknown force kind {self.kind!r}")
        if self.kind == "custom" and not callable(self.func):
            raise ValidationError("custom force needs a callable")

    @property
    def is_zero(self):
        return self.kind == "zero"

    def __call__(self, v):
        v = np.asarray(v, float)
        if self.kind == "zero":
            return np.zeros_like(v)
        if self.kind == "linear":
            return -self.mu * v
        if self.kind == "double_well":
            return -v * (v * v - 4.0)
        return np.asarray(self.func(v), float)


@dataclass(frozen=True)
class DriftSpec:
    """Time-dependent drift ``G(t)``: ``zero``, ``duffing`` (``cos(t)/10``) or ``custom``."""

    kind: str = "zero"
    func: object = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("zero", "duffing", "custom"):
            raise ValidationError(f"unknown drift kind {self.kind!r}")
        if self.kind == "custom" and not callable(self.func):
            raise ValidationError("custom drift needs a callable")

    @property
    def is_zero(self):
        return self.kind == "zero"

    def __call__(self, t):
        t = np.asarray(t, float)
        if self.kind == "zero":
            return np.zeros_like(t)
        if self.kind == "duffing":
            return np.cos(t) / 10.0
        return np.asarray(self.func(t), float)


def as_force(force):
    if force is None:
        return ForceSpec()
    if isinstance(force, ForceSpec):
        return force
    if isinstance(force, str):
        return ForceSpec(force)
    if callable(force):
        return ForceSpec("custom", func=force)
    raise ValidationError(f"cannot interpret {force!r} as a force")


@dataclass(frozen=True)
class SimConfig:
    """Euler integration settings.

    ``memory_horizon`` truncates the memory sum to lags ``<= memory_horizon``
    (None keeps the full history). ``block`` is the step count per FFT block
    for non-Prony kernels.
    """

    dt: float = 0.01
    n_steps: int = 2**16
    v0_std: float = 1.0
    force: ForceSpec = field(default_factory=ForceSpec)
    drift: DriftSpec = field(default_factory=DriftSpec)
    memory_horizon: float = None
    block: int = 256

    def __post_init__(self):
        check_positive("dt", self.dt)
        check_positive("v0_std", self.v0_std, strict=False)
        if int(self.n_steps) != self.n_steps or self.n_steps < 2:
            raise ValidationError("n_steps must be an integer >= 2")
        if self.memory_horizon is not None:
            check_positive("memory_horizon", self.memory_horizon)
        if self.block < 1:
            raise ValidationError("block must be >= 1")


@dataclass(frozen=True)
class ObservationConfig:
    ratio: int = 1
    sigma_obs: float = 0.0
    length_cap: int = None
    seed: int = 0

    def __post_init__(self):
        if int(self.ratio) != self.ratio or self.ratio < 1:
            raise ValidationError("ratio must be a positive integer")
        check_positive("sigma_obs", self.sigma_obs, strict=False)
        if self.length_cap is not None and self.length_cap < 1:
            raise ValidationError("length_cap must be positive")


@dataclass(frozen=True, eq=False)
class TrajectoryEnsemble:
    """``M`` paths of equal length sampled every ``dt``."""

    data: np.ndarray
    dt: float
    seeds: tuple = ()

    def __post_init__(self):
        d = np.asarray(self.data, float)
        if d.ndim == 1:
            d = d[None, :]
        if d.ndim != 2 or d.shape[0] < 1:
            raise ValidationError("ensemble data must be (M, L) with M >= 1")
        check_positive("dt", self.dt)
        object.__setattr__(self, "data", d)
        object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))

    @property
    def n_members(self):
        return self.data.shape[0]

    @property
    def length(self):
        return self.data.shape[1]

    @property
    def times(self):
        return np.arange(self.length) * self.dt

    def head(self, n_members):
        return TrajectoryEnsemble(self.data[:n_members], self.dt, self.seeds[:n_members])


# -- spectral density and noise ---------------------------------------------
def _cosine_transform_piecewise_linear(t, y, w):
    """Exact ``int_0^T p(t) cos(w t) dt`` for the linear interpolant ``p``."""
    w = np.asarray(w, float)[:, None]
    t0, t1 = t[:-1], t[1:]
    y0, y1 = y[:-1], y[1:]
    slope = (y1 - y0) / (t1 - t0)
    with np.errstate(divide="ignore", invalid="ignore"):
        # antiderivative of (a + b t) cos(wt): (a + b t) sin(wt)/w + b cos(wt)/w^2
        F1 = y1 * np.sin(w * t1) / w + slope * np.cos(w * t1) / w**2
        F0 = y0 * np.sin(w * t0) / w + slope * np.cos(w * t0) / w**2
        out = np.sum(F1 - F0, axis=1)
    zero = w[:, 0] == 0
    if np.any(zero):
        out[zero] = trapezoid(y, t)
    return out


def spectral_density(kernel, beta, freq, return_clipped=False):
    """``S(w) = 1/(pi beta) int_0^inf gamma(t) cos(w t) dt``.

    Closed form for Prony kernels, Fourier-weighted adaptive quadrature over
    the half-line for the power law, and the exact transform of the linear
    interpolant for tabulated kernels. Negative values from round-off are
    clipped to zero; with ``return_clipped=True`` the number of clipped
    frequencies is returned as well. A warning is issued only if a clipped
    value exceeds ``CLIP_WARN_RTOL`` times the peak density.
    """
    check_positive("beta", beta)
    freq = np.asarray(freq, float)
    if np.any(freq < 0):
        raise ValidationError("frequencies must be nonnegative")
    w = np.atleast_1d(freq).ravel()
    if kernel.is_prony:
        kernel.series.check_stable()
        lam = kernel.series.exponents
        ct = np.real(np.sum(kernel.series.weights * (-lam) / (lam**2 + w[:, None] ** 2), axis=1))
    elif kernel.variant == "power_law":
        ct = np.empty(w.size)
        for i, wi in enumerate(w):
            if wi == 0:
                ct[i] = 0.0  # the power-law kernel has zero integral
            else:
                ct[i] = quad(power_law_kernel, 0, np.inf, weight="cos", wvar=wi, limlst=200)[0]
    else:
        ct = _cosine_transform_piecewise_linear(kernel.times, kernel.values, w)
    S = ct / (np.pi * beta)
    neg = S < 0
    n_clipped = int(np.sum(neg))
    if n_clipped:
        worst = float(-S[neg].min())
        msg = f"clipped {n_clipped} negative spectral density values to 0 (largest {worst:.2e})"
        # quadrature noise far in the tail is expected; only warn when it is visible
        if worst > CLIP_WARN_RTOL * max(float(S.max()), 0.0):
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
        else:
            log.debug(msg)
        S = np.where(neg, 0.0, S)
    S = S.reshape(freq.shape)
    return (S, n_clipped) if return_clipped else S


def noise_amplitudes(kernel, cfg):
    """Cosine amplitudes ``sqrt(2) sqrt(2 S(w_k) dw)`` on the frequency grid."""
    S = spectral_density(kernel, cfg.beta, cfg.frequencies)
    return np.sqrt(2.0) * np.sqrt(2.0 * S * cfg.delta_freq)


def simulate_noise(kernel, cfg, n_samples, dt, amplitudes=None):
    """Stationary Gaussian noise with autocovariance ``gamma / beta``.

    Parameters
    ----------
    kernel : KernelSpec
    cfg : NoiseConfig
    n_samples : int
    dt : float
        Sample spacing. When it equals ``cfg.grid_dt`` the cosine sum is
        evaluated with one FFT of length ``2 n_freq``; otherwise directly.
    amplitudes : ndarray, optional
        Precomputed :func:`noise_amplitudes` (saves work across members).

    Returns
    -------
    ndarray, shape (n_samples,)
    """
    if n_samples < 1:
        raise ValidationError("n_samples must be positive")
    check_positive("dt", dt)
    A = noise_amplitudes(kernel, cfg) if amplitudes is None else np.asarray(amplitudes, float)
    if n_samples * dt > cfg.period * (1 + 1e-12):
        warnings.warn(
            f"noise record {n_samples * dt:g} exceeds the artificial period {cfg.period:g}; "
            "the sequence repeats (with a sign flip)", RuntimeWarning, stacklevel=2)
    phases = np.random.default_rng([int(cfg.seed), NOISE_STREAM]).uniform(0, 2 * np.pi, cfg.n_freq)
    c = A * np.exp(1j * phases)
    n = cfg.n_freq
    if abs(dt - cfg.grid_dt) <= 1e-12 * cfg.grid_dt:
        # w_k t_l = pi (2k + 1) l / (2n): one inverse FFT of length 2n
        m = 2 * n
        base = np.fft.ifft(c, m) * m
        l = np.arange(m)
        period = np.real(np.exp(1j * np.pi * l / m) * base)
        # R(l + 2n) = -R(l)
        idx = np.arange(n_samples)
        sign = np.where((idx // m) % 2 == 0, 1.0, -1.0)
        return sign * period[idx % m]
    t = np.arange(n_samples) * dt
    out = np.empty(n_samples)
    w = cfg.frequencies
    chunk = max(1, 2**22 // n)
    for s in range(0, n_samples, chunk):
        ts = t[s:s + chunk]
        out[s:s + chunk] = np.cos(np.multiply.outer(ts, w) + phases) @ A
    return out


# -- trajectories --------------------------------------------------------------
def _initial_state(seeds, v0_std):
    return np.array([np.random.default_rng([int(s), V0_STREAM]).normal(0.0, v0_std) if v0_std > 0 else 0.0
                     for s in seeds])


def _check_state(v, l):
    if not np.all(np.isfinite(v)):
        raise DivergenceError(l, f"trajectory blew up at step {l}")


def _run_prony(series, sim, R, v0):
    M, L = R.shape[0], sim.n_steps
    dt = sim.dt
    u = series.weights
    decay = np.exp(series.exponents * dt)
    horizon = None if sim.memory_horizon is None else int(np.floor(sim.memory_horizon / dt))
    drop = None if horizon is None else decay ** (horizon + 1)
    G = sim.drift(np.arange(L) * dt) if not sim.drift.is_zero else None
    v = np.empty((M, L))
    v[:, 0] = v0
    z = np.zeros((M, u.size), complex)
    for l in range(L - 1):
        vl = v[:, l]
        z = z * decay + vl[:, None]
        if horizon is not None and l - horizon - 1 >= 0:
            z -= drop * v[:, l - horizon - 1, None]
        mem = dt * np.real(z @ u)
        rhs = -mem + R[:, l]
        if not sim.force.is_zero:
            rhs += sim.force(vl)
        if G is not None:
            rhs += G[l]
        v[:, l + 1] = vl + dt * rhs
        if l % 256 == 255:
            _check_state(v[:, l + 1], l + 1)
    _check_state(v[:, -1], L - 1)
    return v


def _run_general(kernel, sim, R, v0):
    M, L = R.shape[0], sim.n_steps
    dt = sim.dt
    gam = kernel(np.arange(L) * dt) * dt  # quadrature weight folded in
    if sim.memory_horizon is not None:
        gam[np.arange(L) * dt > sim.memory_horizon * (1 + 1e-12)] = 0.0
    G = sim.drift(np.arange(L) * dt) if not sim.drift.is_zero else None
    v = np.empty((M, L))
    v[:, 0] = v0
    B = sim.block
    for s in range(0, L - 1, B):
        e = min(s + B, L - 1)  # steps l = s..e-1 produce v[:, s+1..e]
        hist = np.zeros((M, e - s))
        if s > 0:
            n = next_fast_len(e + s)
            conv = irfft(rfft(v[:, :s], n, axis=1) * rfft(gam[:e], n), n, axis=1)
            hist = conv[:, s:e]
        for l in range(s, e):
            vl = v[:, l]
            mem = hist[:, l - s] + v[:, s:l + 1] @ gam[l - s::-1]
            rhs = -mem + R[:, l]
            if not sim.force.is_zero:
                rhs += sim.force(vl)
            if G is not None:
                rhs += G[l]
            v[:, l + 1] = vl + dt * rhs
        _check_state(v[:, e], e)
    return v


def simulate_trajectory(kernel, sim, noise, seed=0, v0=None):
    """Euler integration of the GLE.

    Parameters
    ----------
    kernel : KernelSpec
    sim : SimConfig
    noise : array_like, shape (n,) or (M, n) with n >= sim.n_steps
    seed : int or sequence of int
        Seed(s) of the initial condition ``v0 ~ N(0, v0_std^2)``, one per row.
    v0 : float or array_like, optional
        Explicit initial value(s), overriding the seeded draw.

    Returns
    -------
    ndarray, shape (n_steps,) or (M, n_steps)

    Raises
    ------
    DivergenceError
        If the state becomes non-finite; ``.step`` holds the step index.
    """
    R = np.asarray(noise, float)
    single = R.ndim == 1
    R = np.atleast_2d(R)
    if R.shape[1] < sim.n_steps:
        raise ValidationError(f"noise has {R.shape[1]} samples, need {sim.n_steps}")
    R = R[:, :sim.n_steps]
    M = R.shape[0]
    if v0 is None:
        seeds = np.atleast_1d(seed)
        if seeds.size == 1 and M > 1:
            seeds = int(seeds[0]) + np.arange(M)
        if seeds.size != M:
            raise ValidationError("need one seed per noise row")
        v0 = _initial_state(seeds, sim.v0_std)
    else:
        v0 = np.broadcast_to(np.asarray(v0, float), (M,)).copy()
    # blow-ups surface as DivergenceError, not as floating-point warnings
    with np.errstate(over="ignore", invalid="ignore"):
        if kernel.is_prony:
            v = _run_prony(kernel.series, sim, R, v0)
        else:
            v = _run_general(kernel, sim, R, v0)
    return v[0] if single else v


def observe(traj, obs):
    """Subsample every ``ratio`` steps and add Gaussian observation noise.

    Row ``m`` of a 2-d input draws its noise from ``obs.seed + m``. The
    observation step is ``ratio * dt``.
    """
    X = np.asarray(traj.data if isinstance(traj, TrajectoryEnsemble) else traj, float)
    single = X.ndim == 1
    X = np.atleast_2d(X)
    L = X.shape[1]
    cap = L // obs.ratio if obs.length_cap is None else int(obs.length_cap)
    if cap < 1 or obs.ratio * cap > L:
        raise ValidationError(f"ratio*length_cap = {obs.ratio * cap} exceeds trajectory length {L}")
    Y = X[:, :obs.ratio * cap:obs.ratio].copy()
    if obs.sigma_obs > 0:
        for m in range(Y.shape[0]):
            rng = np.random.default_rng([int(obs.seed) + m, OBS_STREAM])
            Y[m] += rng.normal(0.0, obs.sigma_obs, cap)
    if isinstance(traj, TrajectoryEnsemble):
        return TrajectoryEnsemble(Y, traj.dt * obs.ratio, traj.seeds)
    return Y[0] if single else Y


def simulate_ensemble(kernel, noise_cfg, sim, n_members=1, seed=0, chunk=256):
    """``n_members`` latent trajectories with member seeds ``seed + m``.

    Members are integrated in chunks of ``chunk`` rows to bound memory.
    """
    if n_members < 1:
        raise ValidationError("n_members must be >= 1")
    A = noise_amplitudes(kernel, noise_cfg)
    seeds = int(seed) + np.arange(n_members)
    out = np.empty((n_members, sim.n_steps))
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        for s in range(0, n_members, chunk):
            ss = seeds[s:s + chunk]
            R = np.stack([simulate_noise(kernel, _with_seed(noise_cfg, k), sim.n_steps, sim.dt, A)
                          for k in ss])
            out[s:s + chunk] = simulate_trajectory(kernel, sim, R, seed=ss)
    if caught:
        warnings.warn(str(caught[0].message), caught[0].category, stacklevel=2)
    return TrajectoryEnsemble(out, sim.dt, tuple(seeds))


def _with_seed(cfg, seed):
    return NoiseConfig(cfg.beta, cfg.n_freq, cfg.delta_freq, int(seed))


# -- I/O ------------------------------------------------------------------------
def write_trajectory_csv(v, dt, path):
    v = np.asarray(v, float)
    t = np.arange(v.size) * dt
    np.savetxt(path, np.column_stack([t, v]), delimiter=",", header="t,v", comments="", fmt="%.17g")


def read_trajectory_csv(path):
    """Return ``(v, dt)``."""
    d = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    if d.shape[1] != 2:
        raise ValidationError(f"{path}: expected columns t, v")
    dt = float(d[1, 0] - d[0, 0]) if d.shape[0] > 1 else 1.0
    return d[:, 1], dt


_HEADER = struct.Struct("<4sQdq")
_MAGIC = b"GLE1"


def write_trajectory_binary(v, dt, seed, path):
    """Header (magic, L, dt, seed) then ``L`` little-endian float64 values."""
    v = np.ascontiguousarray(v, dtype="<f8")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(_MAGIC, v.size, float(dt), int(seed)))
        fh.write(v.tobytes())


def read_trajectory_binary(path):
    """Return ``(v, dt, seed)``."""
    with open(path, "rb") as fh:
        magic, L, dt, seed = _HEADER.unpack(fh.read(_HEADER.size))
        if magic != _MAGIC:
            raise ValidationError(f"{path}: not a trajectory file")
        v = np.frombuffer(fh.read(8 * L), dtype="<f8")
    if v.size != L:
        raise ValidationError(f"{path}: truncated ({v.size} of {L} values)")
    return v.astype(float), dt, seed
