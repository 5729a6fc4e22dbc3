"""Experiment configuration files (YAML or JSON) with strict validation.

A configuration either starts from a named preset (``preset: five_mode``)
and overrides selected fields, or spells out the kernel itself. Unknown keys
anywhere are rejected. The canonical form (:meth:`ExperimentConfig.to_dict`)
is hashed with SHA-256 for manifests.

Example::

    preset: five_mode
    seed: 7
    sim: {n_steps: 8192}
    space: {omega: 0.25}
    sweep: {axis: sigma_obs, grid: [0.01, 0.1, 1.0], n_trials: 3}
"""

from __future__ import annotations

import copy
import hashlib
import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from .exceptions import ValidationError
from .experiments import PRESETS, SWEEP_AXES, Scenario
from .gle_sim import DriftSpec, ForceSpec, KernelSpec, NoiseConfig, ObservationConfig, SimConfig
from .prony import PronyConfig, default_lcurve_grid
from .sobolev import SplineBasis

__all__ = ["ExperimentConfig", "SweepSpec", "LOSSES"]

LOSSES = ("E", "E1", "E2")

# section -> allowed keys (None: free-form, validated by the owning type)
_SCHEMA = {
    "preset": None,
    "seed": None,
    "kernel": None,
    "noise": {"beta", "n_freq", "delta_freq"},
    "sim": {"dt", "n_steps", "v0_std", "force", "drift", "memory_horizon", "block"},
    "observation": {"ratio", "sigma_obs", "length_cap"},
    "prony": {"p_prime", "sigma", "constrain_derivative_zero", "clamp", "penalty", "pinv_tol",
              "lcurve_grid"},
    "basis": {"T", "n_knots"},
    "correlation": {"n_lags", "anchor"},
    "space": {"omega", "alpha", "alpha_convention"},
    "ensemble": {"n_members"},
    "estimate": {"losses", "theta_L"},
    "sweep": {"axis", "grid", "n_trials"},
    "output": {"dir", "format"},
}
_NESTED = {("sim", "force"): {"kind", "mu"}, ("sim", "drift"): {"kind"}}


@dataclass(frozen=True)
class SweepSpec:
    axis: str = "omega"
    grid: tuple = ()
    n_trials: int = 1

    def __post_init__(self):
        if self.axis not in SWEEP_AXES:
            raise ValidationError(f"sweep axis must be one of {SWEEP_AXES}, got {self.axis!r}")
        object.__setattr__(self, "grid", tuple(float(rhs) for rhs in self.grid))
        if int(self.n_trials) != self.n_trials or self.n_trials < 1:
            raise ValidationError("sweep n_trials must be a positive integer")


def _check_keys(raw):
    if not isinstance(raw, dict):
        raise ValidationError("configuration must be a mapping")
    unknown = set(raw) - set(_SCHEMA)
    if unknown:
        raise ValidationError(f"unknown configuration keys: {sorted(unknown)}")
    for sec, allowed in _SCHEMA.items():
        if allowed is None or sec not in raw:
            continue
        if not isinstance(raw[sec], dict):
            raise ValidationError(f"section {sec!r} must be a mapping")
        bad = set(raw[sec]) - allowed
        if bad:
            raise ValidationError(f"unknown keys in {sec!r}: {sorted(bad)}")
    for (sec, sub), allowed in _NESTED.items():
        val = raw.get(sec, {}).get(sub)
        if val is None:
            continue
        if not isinstance(val, dict):
            raise ValidationError(f"{sec}.{sub} must be a mapping")
        bad = set(val) - allowed
        if bad:
            raise ValidationError(f"unknown keys in {sec}.{sub}: {sorted(bad)}")


def _kernel(d):
    if not isinstance(d, dict):
        raise ValidationError("kernel must be a mapping with a 'type'")
    try:
        return KernelSpec.from_dict(d)
    except TypeError as exc:
        raise ValidationError(f"bad kernel parameters: {exc}") from None


def _build(tree):
    """Scenario from a fully populated canonical tree."""
    sim = tree["sim"]
    for key, kinds in (("force", ("zero", "linear", "double_well")), ("drift", ("zero", "duffing"))):
        if sim[key]["kind"] not in kinds:
            raise ValidationError(f"{key} kind must be one of {kinds} in a configuration file")
    space, prony = tree["space"], tree["prony"]
    grid = prony.get("lcurve_grid", "default")
    grid = default_lcurve_grid() if grid == "default" else (None if grid is None else np.asarray(grid, float))
    try:
        sc = Scenario(
            kernel=_kernel(tree["kernel"]),
            noise=NoiseConfig(**tree["noise"]),
            sim=SimConfig(dt=sim["dt"], n_steps=sim["n_steps"], v0_std=sim["v0_std"],
                          force=ForceSpec(**sim["force"]), drift=DriftSpec(**sim["drift"]),
                          memory_horizon=sim["memory_horizon"], block=sim["block"]),
            observation=ObservationConfig(**tree["observation"]),
            prony=PronyConfig(**{k: v for k, v in prony.items() if k != "lcurve_grid"},
                              lcurve_grid=grid).validate(),
            basis=SplineBasis(**tree["basis"]),
            n_lags=tree["correlation"]["n_lags"],
            omega=space["omega"],
            alpha=None if space["alpha"] is None else tuple(space["alpha"]),
            alpha_convention=space["alpha_convention"],
            anchor=tree["correlation"]["anchor"],
            n_members=tree["ensemble"]["n_members"],
        )
    except TypeError as exc:
        raise ValidationError(f"invalid configuration value: {exc}") from None
    if sc.anchor not in ("time", "origin"):
        raise ValidationError("correlation anchor must be 'time' or 'origin'")
    return sc


def _tree(sc):
    d = sc.to_dict()
    return {
        "kernel": d["kernel"],
        "noise": d["noise"],
        "sim": d["sim"],
        "observation": d["observation"],
        "prony": {**d["prony"], "lcurve_grid": "default"},
        "basis": d["basis"],
        "correlation": {"n_lags": d["n_lags"], "anchor": d["anchor"]},
        "space": {"omega": d["omega"], "alpha": d["alpha"], "alpha_convention": d["alpha_convention"]},
        "ensemble": {"n_members": d["n_members"]},
    }


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict) and k != "kernel":
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment configuration.

    Attributes
    ----------
    scenario : Scenario
    seed : int
        Master seed.
    losses : tuple of str
    theta_L : bool
        Whether to compute the inverse-Laplace estimate.
    sweep : SweepSpec or None
    out_dir : str
    output_format : {"csv", "binary"}
        Storage of simulated trajectories.
    preset : str or None
    """

    scenario: Scenario
    seed: int = 0
    losses: tuple = LOSSES
    theta_L: bool = True
    sweep: SweepSpec = None
    out_dir: str = "out"
    output_format: str = "csv"
    preset: str = None
    _lcurve: object = field(default="default", repr=False, compare=False)

    def __post_init__(self):
        if int(self.seed) != self.seed or self.seed < 0:
            raise ValidationError("seed must be a non-negative integer")
        bad = [x for x in self.losses if x not in LOSSES]
        if bad or not self.losses:
            raise ValidationError(f"losses must be a non-empty subset of {LOSSES}, got {self.losses}")
        if self.output_format not in ("csv", "binary"):
            raise ValidationError("output format must be 'csv' or 'binary'")

    @classmethod
    def from_mapping(cls, raw):
        _check_keys(raw)
        name = raw.get("preset")
        if name is not None:
            if name not in PRESETS:
                raise ValidationError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
            base = _tree(PRESETS[name]())
        else:
            if "kernel" not in raw:
                raise ValidationError("a configuration needs either 'preset' or 'kernel'")
            base = _tree(Scenario(kernel=_kernel(raw["kernel"])))
        over = {k: v for k, v in raw.items() if k in base}
        tree = _merge(base, over)
        scenario = _build(tree)
        est = raw.get("estimate", {})
        sweep = raw.get("sweep")
        out = raw.get("output", {})
        seed = raw.get("seed", 0)
        if not isinstance(seed, int) or isinstance(seed, bool):
            raise ValidationError("seed must be an integer")
        return cls(
            scenario=scenario,
            seed=seed,
            losses=tuple(est.get("losses", LOSSES)),
            theta_L=bool(est.get("theta_L", True)),
            sweep=None if sweep is None else SweepSpec(**sweep),
            out_dir=str(out.get("dir", "out")),
            output_format=out.get("format", "csv"),
            preset=name,
            _lcurve=tree["prony"].get("lcurve_grid", "default"),
        )

    @classmethod
    def load(cls, path):
        """Read a YAML or JSON file (JSON is a subset of YAML)."""
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read configuration {path}: {exc}") from None
        try:
            raw = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ValidationError(f"cannot parse configuration {path}: {exc}") from None
        return cls.from_mapping(raw or {})

    def with_overrides(self, seed=None, out_dir=None, losses=None, axis=None, grid=None):
        cfg = self
        if seed is not None:
            cfg = replace(cfg, seed=int(seed))
        if out_dir is not None:
            cfg = replace(cfg, out_dir=str(out_dir))
        if losses is not None:
            cfg = replace(cfg, losses=tuple(losses))
        if axis is not None or grid is not None:
            sw = cfg.sweep or SweepSpec()
            sw = SweepSpec(axis if axis is not None else sw.axis,
                           grid if grid is not None else sw.grid, sw.n_trials)
            cfg = replace(cfg, sweep=sw)
        return cfg

    def to_dict(self):
        """Canonical, fully expanded form (independent of the output directory)."""
        tree = _tree(self.scenario)
        lc = self._lcurve
        tree["prony"]["lcurve_grid"] = lc if isinstance(lc, str) or lc is None else [float(x) for x in lc]
        tree["seed"] = int(self.seed)
        tree["estimate"] = {"losses": list(self.losses), "theta_L": self.theta_L}
        if self.sweep is not None:
            tree["sweep"] = {"axis": self.sweep.axis, "grid": list(self.sweep.grid),
                             "n_trials": self.sweep.n_trials}
        tree["output"] = {"format": self.output_format}
        return tree

    def config_hash(self):
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(blob.encode()).hexdigest()
