import json
import subprocess
import sys

import numpy as np
import pytest
import yaml

from memkernel import ValidationError
from memkernel.cli import main
from memkernel.config import ExperimentConfig

SMALL = {
    "preset": "five_mode",
    "seed": 5,
    "sim": {"n_steps": 8192},
    "observation": {"length_cap": None},
}


def _write(path, doc):
    path.write_text(yaml.safe_dump(doc))
    return path


# -- configuration ----------------------------------------------------------------
def test_preset_with_overrides():
    cfg = ExperimentConfig.from_mapping({**SMALL, "space": {"omega": 0.25}, "prony": {"p_prime": 8}})
    sc = cfg.scenario
    assert sc.sim.n_steps == 8192 and sc.sim.dt == 0.01
    assert sc.omega == 0.25 and sc.prony.p_prime == 8
    assert sc.observation.ratio == 70 and sc.observation.length_cap is None


def test_explicit_kernel_config():
    cfg = ExperimentConfig.from_mapping({"kernel": {"type": "exponential", "weight": 2.0, "rate": 0.5}})
    assert cfg.scenario.kernel(0.0) == pytest.approx(2.0)


@pytest.mark.parametrize("doc", [
    {**SMALL, "bogus": 1},
    {**SMALL, "sim": {"n_stepz": 10}},
    {**SMALL, "sim": {"force": {"kind": "double_well", "k": 2}}},
    {"preset": "nope"},
    {"seed": 3},
    {**SMALL, "seed": -1},
    {**SMALL, "estimate": {"losses": ["E4"]}},
    {**SMALL, "sweep": {"axis": "temperature", "grid": [1]}},
    {**SMALL, "correlation": {"anchor": "middle"}},
    {**SMALL, "space": {"omega": -1.0}},
    {**SMALL, "observation": {"ratio": 0}},
])
def test_invalid_configs_rejected(doc):
    with pytest.raises(ValidationError):
        ExperimentConfig.from_mapping(doc)


def test_config_hash_is_stable_and_sensitive():
    a = ExperimentConfig.from_mapping(SMALL)
    b = ExperimentConfig.from_mapping(dict(SMALL))
    assert a.config_hash() == b.config_hash()
    assert a.with_overrides(out_dir="elsewhere").config_hash() == a.config_hash()
    assert a.with_overrides(seed=6).config_hash() != a.config_hash()


def test_canonical_form_reloads_to_same_hash(tmp_path):
    a = ExperimentConfig.from_mapping({**SMALL, "sweep": {"axis": "omega", "grid": [0.1, 1.0]}})
    path = _write(tmp_path / "c.yaml", a.to_dict())
    b = ExperimentConfig.load(path)
    assert b.config_hash() == a.config_hash()


def test_unreadable_config(tmp_path):
    with pytest.raises(ValidationError):
        ExperimentConfig.load(tmp_path / "missing.yaml")
    (tmp_path / "bad.yaml").write_text("a: [1, 2")
    with pytest.raises(ValidationError):
        ExperimentConfig.load(tmp_path / "bad.yaml")


# -- command line -----------------------------------------------------------------------
STAGES = ("simulate", "correlate", "prony", "estimate")


def _run_all(cfg_path, out, extra=()):
    for cmd in STAGES:
        assert main([cmd, "--config", str(cfg_path), "--out", str(out), *extra]) == 0, cmd


@pytest.fixture(scope="module")
def pipeline_dirs(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    cfg = _write(root / "cfg.yaml", SMALL)
    a, b = root / "a", root / "b"
    _run_all(cfg, a, ["--loss", "all"])
    _run_all(cfg, b, ["--loss", "all"])
    return root, a, b


def test_stage_outputs(pipeline_dirs):
    _, a, _ = pipeline_dirs
    names = {p.name for p in a.iterdir()}
    for f in ("latent.csv", "observed.csv", "correlation.csv", "prony.json", "kernel_E.csv", "kernel_E1.json",
              "kernel_E2.csv", "theta_L.json", "report.json", "coercivity_curve.csv",
              "manifest_simulate.json", "manifest_estimate.json"):
        assert f in names
    latent = np.loadtxt(a / "latent.csv", delimiter=",", skiprows=1)
    assert latent.shape == (8192, 2)
    report = json.loads((a / "report.json").read_text())
    for key in ("err_E", "err_E1", "err_E2", "bound", "m_h", "h_err_sq", "g_err_sq"):
        assert key in report["diagnostics"]


def test_rerun_is_byte_identical(pipeline_dirs):
    _, a, b = pipeline_dirs
    for f in a.iterdir():
        if f.name.startswith("manifest_"):
            ma, mb = json.loads(f.read_text()), json.loads((b / f.name).read_text())
            assert ma["config_hash"] == mb["config_hash"]
            assert ma["files"] == mb["files"]
        else:
            assert f.read_bytes() == (b / f.name).read_bytes(), f.name


def test_manifest_records_seed_and_hashes(pipeline_dirs):
    _, a, _ = pipeline_dirs
    m = json.loads((a / "manifest_simulate.json").read_text())
    assert m["seed"] == 5 and m["member_seeds"] == [5]
    assert m["package_version"] == "0.1.0"
    assert m["config_hash"] == ExperimentConfig.from_mapping(SMALL).config_hash()


def test_stage_rerun_in_place(pipeline_dirs):
    root, a, _ = pipeline_dirs
    before = (a / "kernel_E.csv").read_bytes()
    assert main(["estimate", "--config", str(root / "cfg.yaml"), "--out", str(a), "--loss", "E"]) == 0
    assert (a / "kernel_E.csv").read_bytes() == before


def test_seed_override_changes_data(pipeline_dirs, tmp_path):
    root, a, _ = pipeline_dirs
    assert main(["simulate", "--config", str(root / "cfg.yaml"), "--out", str(tmp_path), "--seed", "6"]) == 0
    assert (tmp_path / "latent.csv").read_bytes() != (a / "latent.csv").read_bytes()


def test_binary_trajectory_output(tmp_path):
    cfg = _write(tmp_path / "c.yaml", {**SMALL, "ensemble": {"n_members": 2}, "output": {"format": "binary"}})
    _run_all(cfg, tmp_path / "o")
    assert sorted(p.name for p in (tmp_path / "o").glob("latent_*.bin")) == ["latent_0000.bin", "latent_0001.bin"]


def test_sweep_command(tmp_path):
    cfg = _write(tmp_path / "c.yaml", SMALL)
    rc = main(["sweep", "--config", str(cfg), "--out", str(tmp_path), "--axis", "omega", "--grid", "0.05,0.5",
               "--loss", "E"])
    assert rc == 0
    lines = (tmp_path / "sweep_omega.csv").read_text().splitlines()
    assert len(lines) == 3 and lines[0].startswith("axis,value,trial,seed")
    assert "err_E" in (tmp_path / "sweep_omega_summary.csv").read_text()


def test_exit_code_for_invalid_config(tmp_path):
    cfg = _write(tmp_path / "c.yaml", {**SMALL, "bogus": True})
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_exit_code_for_missing_stage(tmp_path):
    cfg = _write(tmp_path / "c.yaml", SMALL)
    assert main(["estimate", "--config", str(cfg), "--out", str(tmp_path / "empty")]) == 2


def test_exit_code_for_bad_arguments(tmp_path):
    assert main(["simulate"]) == 2
    assert main(["fly", "--preset", "five_mode"]) == 2
    assert main(["sweep", "--preset", "five_mode", "--grid", "a,b"]) == 2


def test_exit_code_for_numerical_failure(tmp_path):
    doc = {"preset": "exponential_long", "noise": {"n_freq": 100, "delta_freq": float(np.pi / 100)},
           "sim": {"dt": 1.0, "n_steps": 200, "v0_std": 5.0, "force": {"kind": "double_well"}}}
    cfg = _write(tmp_path / "c.yaml", doc)
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 3


def test_console_script_help():
    out = subprocess.run([sys.executable, "-m", "memkernel.cli", "--help"], capture_output=True, text=True)
    assert out.returncode == 0
    for cmd in STAGES + ("sweep",):
        assert cmd in out.stdout
