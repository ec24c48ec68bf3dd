"""Config parsing, validation errors, CLI exit codes and artifact determinism."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

import satspread as ss
from satspread.cli import main

BASE = """
[model]
kind = singular
dt = 0.05
t_end = 1.0

[kernel]
kind = indicator_ball
ell = 1.0
dim = 1
dx = 0.05

[growth]
kind = linear
rate = 1.0

[domain]
box_radius = 4.0
initial = ball_plateau
height = 1.0
radius = 1.0
ramp = 0.5

[output]
snapshot_interval = 0.5
"""


def write_config(tmp_path: Path, text: str, name: str = "run.ini") -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def read_csv_columns(path: Path) -> dict[str, np.ndarray]:
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    header = lines[0].split(",")
    data = np.array([[float(tok) for tok in ln.split(",")] for ln in lines[1:]])
    return {name: data[:, i] for i, name in enumerate(header)}


class TestLoadConfig:
    def test_round_trip(self, tmp_path):
        cfg = ss.load_config(write_config(tmp_path, BASE))
        assert cfg.model.model == "singular"
        assert cfg.model.dt == 0.05
        assert cfg.kernel.radius == 1.0
        assert cfg.growth.kind == "linear"
        assert cfg.box_radius == 4.0
        assert cfg.initial_spec["kind"] == "ball_plateau"
        assert cfg.snapshot_interval == 0.5
        assert cfg.warnings == []

    def test_unknown_key_named(self, tmp_path):
        bad = BASE.replace("rate = 1.0", "rate = 1.0\nrtae = 2.0")
        with pytest.raises(ss.ConfigError, match="rtae"):
            ss.load_config(write_config(tmp_path, bad))

    def test_unknown_section_rejected(self, tmp_path):
        with pytest.raises(ss.ConfigError, match="extras"):
            ss.load_config(write_config(tmp_path, BASE + "\n[extras]\nfoo = 1\n"))

    def test_missing_section_rejected(self, tmp_path):
        bad = BASE.replace("[growth]\nkind = linear\nrate = 1.0\n", "")
        with pytest.raises(ss.ConfigError, match="growth"):
            ss.load_config(write_config(tmp_path, bad))

    def test_bad_float_names_key(self, tmp_path):
        bad = BASE.replace("dt = 0.05", "dt = fast")
        with pytest.raises(ss.ConfigError, match="dt"):
            ss.load_config(write_config(tmp_path, bad))

    def test_duplicate_key_rejected(self, tmp_path):
        bad = BASE.replace("dt = 0.05", "dt = 0.05\ndt = 0.01")
        with pytest.raises(ss.ConfigError, match="parse"):
            ss.load_config(write_config(tmp_path, bad))

    def test_dt_above_stability_cap_names_dt(self, tmp_path):
        bad = BASE.replace("kind = singular", "kind = gamma\ngamma = 64")
        with pytest.raises(ss.ConfigError, match="dt"):
            ss.load_config(write_config(tmp_path, bad))

    def test_truncation_warning_for_small_box(self, tmp_path):
        bad = BASE.replace("t_end = 1.0", "t_end = 10.0")
        cfg = ss.load_config(write_config(tmp_path, bad))
        assert any("truncate" in w for w in cfg.warnings)

    def test_domain_high_only_for_compare(self, tmp_path):
        extra = BASE + "\n[domain_high]\ninitial = constant\nvalue = 0.8\n"
        with pytest.raises(ss.ConfigError, match="domain_high"):
            ss.load_config(write_config(tmp_path, extra), "simulate")
        cfg = ss.load_config(write_config(tmp_path, extra), "compare")
        assert cfg.initial_high_spec == {"kind": "constant", "value": 0.8}
        with pytest.raises(ss.ConfigError, match="domain_high"):
            ss.load_config(write_config(tmp_path, BASE), "compare")

    def test_initial_presets_resolve(self, tmp_path):
        gauss = BASE.replace(
            "initial = ball_plateau\nheight = 1.0\nradius = 1.0\nramp = 0.5",
            "initial = gaussian_bump\nheight = 0.8\nsigma = 0.5\ncutoff = 2.0")
        cfg = ss.load_config(write_config(tmp_path, gauss))
        u0 = ss.build_initial_field(cfg)
        assert u0.values.max() <= 0.8
        assert u0.values[0] == 0.0  # compactly supported

    def test_generalized_model_needs_gain(self, tmp_path):
        bad = BASE.replace("kind = singular", "kind = generalized_singular")
        with pytest.raises(ss.ConfigError, match="gain"):
            ss.load_config(write_config(tmp_path, bad))
        good = bad.replace("rate = 1.0", "rate = 1.0\ngain_kind = constant\ngain_value = 0.5")
        cfg = ss.load_config(write_config(tmp_path, good))
        assert cfg.growth.gain is not None


class TestSimulateCommand:
    def test_constant_one_is_stationary(self, tmp_path):
        text = BASE.replace(
            "initial = ball_plateau\nheight = 1.0\nradius = 1.0\nramp = 0.5",
            "initial = constant\nvalue = 1.0")
        cfg_path = write_config(tmp_path, text)
        out = tmp_path / "out"
        assert main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
        first = read_csv_columns(out / "snapshot_0000.csv")
        last = sorted(out.glob("snapshot_*.csv"))[-1]
        final = read_csv_columns(last)
        assert np.array_equal(first["u"], final["u"])
        summary = json.loads((out / "summary.json").read_text())
        assert summary["schema_version"] == 1
        assert summary["monitors"]["time_monotonicity_gap"] == 0.0
        assert "config" in summary

    def test_dt_above_cap_exits_2(self, tmp_path, capsys):
        bad = BASE.replace("kind = singular", "kind = gamma\ngamma = 64")
        cfg_path = write_config(tmp_path, bad)
        assert main(["simulate", "--config", str(cfg_path),
                     "--out", str(tmp_path / "o")]) == 2
        assert "dt" in capsys.readouterr().err

    def test_missing_config_exits_3(self, tmp_path):
        assert main(["simulate", "--config", str(tmp_path / "absent.ini"),
                     "--out", str(tmp_path / "o")]) == 3

    def test_artifacts_are_byte_identical_across_runs(self, tmp_path):
        cfg_path = write_config(tmp_path, BASE)
        out1, out2 = tmp_path / "a", tmp_path / "b"
        assert main(["simulate", "--config", str(cfg_path), "--out", str(out1)]) == 0
        assert main(["simulate", "--config", str(cfg_path), "--out", str(out2)]) == 0
        for f1 in sorted(out1.iterdir()):
            f2 = out2 / f1.name
            assert f1.read_bytes() == f2.read_bytes()

    def test_two_dimensional_snapshots_have_sidecars(self, tmp_path):
        text = BASE.replace("dim = 1", "dim = 2").replace(
            "box_radius = 4.0", "box_radius = 2.0").replace(
            "dx = 0.05", "dx = 0.125").replace("t_end = 1.0", "t_end = 0.2")
        cfg_path = write_config(tmp_path, text)
        out = tmp_path / "out2d"
        assert main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
        sidecar = json.loads((out / "snapshot_0000.csv.json").read_text())
        assert sidecar["shape"] == [33, 33]
        assert sidecar["order"] == "row-major"


class TestWaveCommand:
    def test_minimal_speed_artifacts(self, tmp_path):
        cfg_path = write_config(tmp_path, BASE)
        out = tmp_path / "wave"
        assert main(["wave", "--config", str(cfg_path), "--out", str(out)]) == 0
        payload = json.loads((out / "minimal_speed.json").read_text())
        assert 0.25 <= payload["c_star"] <= 1.0
        assert payload["analytic_bounds"] == [0.25, 1.0]
        cols = read_csv_columns(out / "profile_cstar.csv")
        positive = cols["s"][cols["phi"] > 0.0]
        assert positive.max() <= 1.0 + 1e-9
        assert (out / "profile_1p5cstar.csv").exists()
        assert (out / "profile_2cstar.csv").exists()

    def test_uncapped_growth_exits_2(self, tmp_path):
        bad = BASE.replace("kind = linear\nrate = 1.0",
                           "kind = logistic\nrate = 1.0\ncapacity = 1.2")
        cfg_path = write_config(tmp_path, bad)
        assert main(["wave", "--config", str(cfg_path),
                     "--out", str(tmp_path / "w")]) == 2


class TestStudyCommands:
    def test_compare_equal_data_passes(self, tmp_path):
        text = BASE + "\n[domain_high]\ninitial = ball_plateau\nheight = 1.0\nradius = 1.0\nramp = 0.5\n"
        cfg_path = write_config(tmp_path, text)
        out = tmp_path / "cmp"
        assert main(["compare", "--config", str(cfg_path), "--out", str(out)]) == 0
        payload = json.loads((out / "compare_report.json").read_text())
        assert payload["max_violation"] == 0.0

    def test_compare_unordered_data_exits_2(self, tmp_path):
        text = BASE + "\n[domain_high]\ninitial = constant\nvalue = 0.2\n"
        cfg_path = write_config(tmp_path, text)
        assert main(["compare", "--config", str(cfg_path),
                     "--out", str(tmp_path / "c2")]) == 2

    def test_converge_study_passes(self, tmp_path):
        text = BASE.replace("t_end = 1.0", "t_end = 2.0").replace(
            "dx = 0.05", "dx = 0.125")
        text += "\n[study]\ngamma_list = 4,16\nthreshold = 0.2\n"
        cfg_path = write_config(tmp_path, text)
        out = tmp_path / "conv"
        assert main(["converge", "--config", str(cfg_path), "--out", str(out),
                     "--threads", "2"]) == 0
        payload = json.loads((out / "converge_report.json").read_text())
        assert payload["strictly_decreasing"] is True
        cols = read_csv_columns(out / "gamma_distances.csv")
        assert list(cols["gamma"]) == [4.0, 16.0]

    def test_speed_study_smoke(self, tmp_path):
        text = BASE.replace("box_radius = 4.0", "box_radius = 14.0").replace(
            "t_end = 1.0", "t_end = 12.0").replace("dx = 0.05", "dx = 0.05")
        text += "\n[study]\ntolerance = 0.08\n"
        cfg_path = write_config(tmp_path, text)
        out = tmp_path / "speed"
        assert main(["speed", "--config", str(cfg_path), "--out", str(out)]) == 0
        payload = json.loads((out / "speed_report.json").read_text())
        assert payload["passed"] is True
        assert abs(payload["speed_ratio"] - 1.0) <= 0.08

    def test_wave_envelope_initial_data(self, tmp_path):
        text = BASE.replace(
            "initial = ball_plateau\nheight = 1.0\nradius = 1.0\nramp = 0.5",
            "initial = wave_envelope\nspeed_factor = 1.0\noffset = -1.0").replace(
            "t_end = 1.0", "t_end = 0.2")
        cfg_path = write_config(tmp_path, text)
        out = tmp_path / "env"
        assert main(["simulate", "--config", str(cfg_path), "--out", str(out)]) == 0
        cols = read_csv_columns(out / "snapshot_0000.csv")
        # profile starts saturated behind the offset and vanishes past ell
        assert cols["u"][cols["x"] <= -1.0].min() == 1.0
        assert np.all(cols["u"][cols["x"] >= 0.0] == 0.0)

    def test_seed_and_threads_flags_accepted(self, tmp_path):
        cfg_path = write_config(tmp_path, BASE)
        assert main(["simulate", "--config", str(cfg_path),
                     "--out", str(tmp_path / "s"), "--threads", "2",
                     "--seed", "7"]) == 0
