"""Command-line interface: ``memkernel {simulate,correlate,prony,estimate,sweep}``.

Stages exchange files inside the output directory::

    simulate   -> latent.csv (or latent_XXXX.bin), manifest_simulate.json
    correlate  -> observed.csv, correlation.csv, manifest_correlate.json
    prony      -> prony.json, manifest_prony.json
    estimate   -> kernel_<loss>.csv/.json, theta_L.json, report.json,
                  coercivity_curve.csv, manifest_estimate.json
    sweep      -> sweep_<axis>.csv, sweep_<axis>_summary.csv, manifest_sweep.json

Each stage reads only what earlier stages wrote, so any stage can be rerun in
place. Exit codes: 0 success, 2 invalid input or configuration, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import hashlib
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from .analysis import coercivity_bounds
from .config import LOSSES, ExperimentConfig
from .correlation import ensemble_corr, read_correlation_csv, write_correlation_csv
from .exceptions import MemKernelError, NumericalError, ValidationError
from .experiments import run_sweep, simulate, summarize
from .gle_sim import TrajectoryEnsemble, observe, read_trajectory_binary, write_trajectory_binary
from .laplace_domain import theta_L
from .pipeline import PipelineResult, evaluate, fit_correlations, resolve_alpha
from .prony_series import PronySeries
from .sobolev import WeightedSpace, estimate_kernel

log = logging.getLogger("memkernel")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


# -- file helpers ----------------------------------------------------------------
def _atomic_write(path, data):
    """Write bytes or text to ``path`` through a temporary file and rename."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    mode = "wb" if isinstance(data, bytes) else "w"
    with open(tmp, mode, newline="" if mode == "w" else None) as fh:
        fh.write(data)
    os.replace(tmp, path)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return x


def _json_text(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_jsonable) + "\n"


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    if isinstance(x, complex):
        return [x.real, x.imag]
    raise TypeError(f"not JSON serializable: {type(x).__name__}")


def _sha256(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _version():
    from . import __version__

    return __version__


def _write_manifest(out, command, cfg, files, extra=None):
    manifest = {
        "command": command,
        "seed": cfg.seed,
        "config_hash": cfg.config_hash(),
        "config": cfg.to_dict(),
        "package_version": _version(),
        "created": _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"),
        "files": {Path(f).name: _sha256(f) for f in files},
    }
    if extra:
        manifest.update(extra)
    path = out / f"manifest_{command}.json"
    _atomic_write(path, _json_text(manifest))
    return path


def _require(path, stage):
    if not path.exists():
        raise ValidationError(f"{path} not found; run '{stage}' first")
    return path


# -- stages -----------------------------------------------------------------------
def cmd_simulate(cfg, out):
    sc = cfg.scenario
    ens = simulate(sc, cfg.seed)
    files = []
    if cfg.output_format == "csv":
        t = np.arange(ens.length) * ens.dt
        header = ["t"] + [f"v_{m:04d}" for m in range(ens.n_members)]
        rows = ([_fmt(ti)] + [_fmt(v) for v in col] for ti, col in zip(t, ens.data.T))
        path = out / "latent.csv"
        _atomic_write(path, _csv_text(header, rows))
        files.append(path)
    else:
        for m, (row, seed) in enumerate(zip(ens.data, ens.seeds)):
            path = out / f"latent_{m:04d}.bin"
            write_trajectory_binary(row, ens.dt, seed, path)
            files.append(path)
    _write_manifest(out, "simulate", cfg, files, {"member_seeds": [int(s) for s in ens.seeds]})
    return files


def _read_latent(out):
    path = out / "latent.csv"
    if path.exists():
        d = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if d.shape[1] < 2:
            raise ValidationError(f"{path}: expected a time column and at least one trajectory")
        dt = float(d[1, 0] - d[0, 0]) if d.shape[0] > 1 else 1.0
        return TrajectoryEnsemble(d[:, 1:].T.copy(), dt)
    bins = sorted(out.glob("latent_*.bin"))
    if not bins:
        raise ValidationError(f"no latent trajectories in {out}; run 'simulate' first")
    rows, seeds, dt = [], [], None
    for b in bins:
        v, dt, seed = read_trajectory_binary(b)
        rows.append(v)
        seeds.append(seed)
    return TrajectoryEnsemble(np.vstack(rows), dt, tuple(seeds))


def cmd_correlate(cfg, out):
    sc = cfg.scenario
    latent = _read_latent(out)
    obs = observe(latent, type(sc.observation)(sc.observation.ratio, sc.observation.sigma_obs,
                                               sc.observation.length_cap, cfg.seed))
    t = np.arange(obs.length) * obs.dt
    obs_path = out / "observed.csv"
    header = ["t"] + [f"v_{m:04d}" for m in range(obs.n_members)]
    _atomic_write(obs_path, _csv_text(header, ([_fmt(ti)] + [_fmt(v) for v in col]
                                               for ti, col in zip(t, obs.data.T))))
    force = None if sc.force.is_zero else sc.force
    corr = ensemble_corr(obs.data, sc.n_lags, obs.dt, force, sc.anchor)
    corr_path = out / "correlation.csv"
    tmp = corr_path.with_name(corr_path.name + ".tmp")
    write_correlation_csv(corr, tmp)
    os.replace(tmp, corr_path)
    _write_manifest(out, "correlate", cfg, [obs_path, corr_path])
    return [obs_path, corr_path]


def cmd_prony(cfg, out):
    sc = cfg.scenario
    corr = read_correlation_csv(_require(out / "correlation.csv", "correlate"))
    acf, force_corr, rhs = fit_correlations(corr, sc.prony, not sc.force.is_zero)
    doc = {"dt_obs": corr.dt_obs, "acf": acf.to_dict(), "rhs": rhs.to_dict(),
           "force_corr": None if force_corr is None else force_corr.to_dict(),
           "acf_meta": acf.meta, "force_corr_meta": None if force_corr is None else force_corr.meta}
    path = out / "prony.json"
    _atomic_write(path, _json_text(doc))
    _write_manifest(out, "prony", cfg, [path])
    return [path]


def _load_prony(out):
    doc = json.loads(_require(out / "prony.json", "prony").read_text())
    acf = PronySeries.from_dict(doc["acf"])
    rhs = PronySeries.from_dict(doc["rhs"])
    force_corr = None if doc["force_corr"] is None else PronySeries.from_dict(doc["force_corr"])
    return doc["dt_obs"], acf, force_corr, rhs


def cmd_estimate(cfg, out):
    sc = cfg.scenario
    dt_obs, acf, force_corr, rhs = _load_prony(out)
    corr = read_correlation_csv(_require(out / "correlation.csv", "correlate"))
    alpha = resolve_alpha(acf, sc.alpha, sc.alpha_convention)
    res = PipelineResult(corr, acf, force_corr, rhs, tuple(alpha), sc.omega)
    files = []
    for loss in cfg.losses:
        space = WeightedSpace.for_loss(sc.omega, loss, alpha)
        est = estimate_kernel(acf, rhs, sc.basis, space, loss)
        res.estimates[loss] = est
        csv_path, json_path = out / f"kernel_{loss}.csv", out / f"kernel_{loss}.json"
        est.write(csv_path, json_path)
        files += [csv_path, json_path]
    if cfg.theta_L:
        try:
            res.theta_L = theta_L(acf, force_corr, bandwidth=dt_obs)
            path = out / "theta_L.json"
            _atomic_write(path, _json_text(res.theta_L.to_dict()))
            files.append(path)
        except MemKernelError as exc:
            log.warning("inverse-Laplace estimate failed: %s", exc)
            res.errors["theta_L"] = str(exc)
    rep = coercivity_bounds(acf, sc.omega, alpha)
    curve_path = out / "coercivity_curve.csv"
    rep.write_curve(curve_path)
    files.append(curve_path)
    report = {"alpha": list(alpha), "omega": sc.omega, "coercivity": rep.to_dict(),
              "stage_errors": res.errors}
    report["diagnostics"] = evaluate(res, sc.kernel, beta=sc.noise.beta)
    path = out / "report.json"
    _atomic_write(path, _json_text(report))
    files.append(path)
    _write_manifest(out, "estimate", cfg, files)
    return files


def cmd_sweep(cfg, out):
    if cfg.sweep is None or not cfg.sweep.grid:
        raise ValidationError("sweep needs an axis and a grid (config 'sweep' or --axis/--grid)")
    sw = cfg.sweep
    rows = run_sweep(cfg.scenario, sw.axis, sw.grid, sw.n_trials, cfg.seed, cfg.losses, cfg.theta_L)
    keys = ["axis", "value", "trial", "seed"]
    extra = sorted({k for r in rows for k in r} - set(keys))
    path = out / f"sweep_{sw.axis}.csv"
    _atomic_write(path, _csv_text(keys + extra, ([_fmt(r.get(k, "")) for k in keys + extra] for r in rows)))
    summ = []
    for key in [k for k in extra if k.startswith(("err_", "rel_err_")) or k == "bound"]:
        for rec in summarize(rows, key):
            summ.append([key] + [_fmt(rec[c]) for c in ("value", "n", "mean", "q10", "q50", "q90")])
    spath = out / f"sweep_{sw.axis}_summary.csv"
    _atomic_write(spath, _csv_text(["metric", "value", "n", "mean", "q10", "q50", "q90"], summ))
    seeds = sorted({int(r["seed"]) for r in rows})
    _write_manifest(out, "sweep", cfg, [path, spath], {"trial_seeds": seeds})
    return [path, spath]


COMMANDS = {"simulate": cmd_simulate, "correlate": cmd_correlate, "prony": cmd_prony,
            "estimate": cmd_estimate, "sweep": cmd_sweep}


def _parse_grid(text):
    try:
        return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be comma-separated numbers, got {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="memkernel", description="Memory-kernel estimation for the GLE.")
    p.add_argument("command", choices=sorted(COMMANDS))
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", type=Path, help="YAML or JSON experiment configuration")
    src.add_argument("--preset", help="start from a named preset instead of a file")
    p.add_argument("--seed", type=int, help="master seed (overrides the configuration)")
    p.add_argument("--out", type=Path, help="output directory (overrides the configuration)")
    p.add_argument("--loss", choices=[*LOSSES, "all"], help="loss(es) to estimate with")
    p.add_argument("--axis", choices=["omega", "sigma_obs", "ensemble_size", "traj_length"])
    p.add_argument("--grid", type=_parse_grid, help="comma-separated sweep values")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = (ExperimentConfig.load(args.config) if args.config is not None
               else ExperimentConfig.from_mapping({"preset": args.preset}))
        losses = None if args.loss is None else (LOSSES if args.loss == "all" else (args.loss,))
        cfg = cfg.with_overrides(args.seed, args.out, losses, args.axis, args.grid)
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = COMMANDS[args.command](cfg, out)
    except (ValidationError, OSError) as exc:
        print(f"memkernel {args.command}: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NumericalError, MemKernelError) as exc:
        print(f"memkernel {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for f in files:
        print(f)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
