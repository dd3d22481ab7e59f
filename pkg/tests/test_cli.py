"""Exit codes, output files, and determinism of the command-line interface."""

import json
import shutil
import subprocess

import pytest

from cascade_sensor.cli import main

SENSOR_CONFIG = {
    "n_phases": 1,
    "transmissions": [],
    "sensing_phases": [0.4],
    "reference_phases": [1.1],
    "pulses": [
        {"side": "left", "time_bin": 0, "alpha": 2.0, "theta": 0.0, "r": 0.0, "chi": 0.0},
        {"side": "right", "time_bin": 0, "alpha": 2.0, "theta": 0.0, "r": 0.0, "chi": 0.0},
    ],
    "k_max": 7,
}

DEGENERATE_CONFIG = {
    "n_phases": 2,
    "transmissions": [1.0],
    "sensing_phases": [0.4, 0.7],
    "reference_phases": [0.0, 0.0],
    "pulses": SENSOR_CONFIG["pulses"],
    "k_max": 7,
}


def sweep_spec(out):
    return {
        "mode": "transmission_sweep",
        "output": str(out),
        "alpha": 2.0,
        "n_phases": 1,
        "transmissions": [0.5],
        "variants": [
            {"sides": "two", "r": 0.0},
            {"sides": "two", "r": 1.0},
        ],
        "de": {"population_size": 12, "max_generations": 12, "seed": 5},
    }


def write_json(path, data):
    path.write_text(json.dumps(data, indent=1))
    return str(path)


class TestValidate:
    def test_valid_file_exits_zero(self, tmp_path, capsys):
        path = write_json(tmp_path / "cfg.json", SENSOR_CONFIG)
        assert main(["validate", "--config", path]) == 0
        assert capsys.readouterr().out.strip().endswith("ok")

    def test_invalid_file_exits_one(self, tmp_path, capsys):
        bad = dict(SENSOR_CONFIG, transmissions=[0.5])  # wrong count for one phase
        path = write_json(tmp_path / "cfg.json", bad)
        assert main(["validate", "--config", path]) == 1
        assert "transmission" in capsys.readouterr().err

    def test_missing_file_exits_one(self, tmp_path, capsys):
        assert main(["validate", "--config", str(tmp_path / "absent.json")]) == 1


class TestArgumentErrors:
    def test_unknown_subcommand_exits_one(self, capsys):
        assert main(["plot"]) == 1

    def test_missing_required_flag_exits_one(self, capsys):
        assert main(["validate"]) == 1
        assert "--config" in capsys.readouterr().err


class TestFisher:
    def test_result_json_on_stdout(self, tmp_path, capsys):
        path = write_json(tmp_path / "cfg.json", SENSOR_CONFIG)
        assert main(["fisher", "--config", path]) == 0
        data = json.loads(capsys.readouterr().out)
        assert set(data) == {"matrix", "crb_variances", "total_variance", "condition_number"}
        # two pulses of alpha=2 on one segment: F = 4 alpha^2 = 16
        assert data["matrix"][0][0] == pytest.approx(16.0, rel=1e-8)
        assert data["crb_variances"][0] == pytest.approx(1.0 / 16.0, rel=1e-8)

    def test_out_flag_writes_file(self, tmp_path, capsys):
        path = write_json(tmp_path / "cfg.json", SENSOR_CONFIG)
        out = tmp_path / "fisher.json"
        assert main(["fisher", "--config", path, "--out", str(out)]) == 0
        assert "wrote" in capsys.readouterr().out
        assert json.loads(out.read_text())["total_variance"] > 0

    def test_config_error_exits_one(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["fisher", "--config", str(path)]) == 1
        assert "config error" in capsys.readouterr().err

    def test_degenerate_sensor_exits_two(self, tmp_path, capsys):
        path = write_json(tmp_path / "cfg.json", DEGENERATE_CONFIG)
        assert main(["fisher", "--config", str(path)]) == 2
        assert "indistinguishable" in capsys.readouterr().err


class TestSweepCommand:
    def test_sweep_reports_row_counts(self, tmp_path, capsys):
        spec = write_json(tmp_path / "spec.json", sweep_spec(tmp_path / "out.csv"))
        assert main(["sweep", "--config", spec, "--no-header-timestamp"]) == 0
        assert "wrote 2 rows (2 ok, 0 divergent)" in capsys.readouterr().out
        assert (tmp_path / "out.csv").exists()
        assert (tmp_path / "out.csv.meta.json").exists()

    def test_out_flag_overrides_spec(self, tmp_path, capsys):
        spec = write_json(tmp_path / "spec.json", sweep_spec(tmp_path / "ignored.csv"))
        target = tmp_path / "actual.csv"
        assert main(
            ["sweep", "--config", spec, "--out", str(target), "--no-header-timestamp"]
        ) == 0
        assert target.exists()
        assert not (tmp_path / "ignored.csv").exists()

    def test_seed_flag_overrides_spec(self, tmp_path, capsys):
        spec = write_json(tmp_path / "spec.json", sweep_spec(tmp_path / "out.csv"))
        main(["sweep", "--config", spec, "--seed", "99", "--no-header-timestamp"])
        sidecar = json.loads((tmp_path / "out.csv.meta.json").read_text())
        assert sidecar["root_seed"] == 99

    def test_mode_mismatch_exits_one(self, tmp_path, capsys):
        spec = write_json(
            tmp_path / "spec.json",
            {"mode": "scaling_study", "output": str(tmp_path / "x.csv"), "alpha": 2.0,
             "n_list": [1, 2]},
        )
        assert main(["sweep", "--config", spec]) == 1
        assert "mode" in capsys.readouterr().err

    def test_zero_budget_exits_two(self, tmp_path, capsys):
        spec = write_json(tmp_path / "spec.json", sweep_spec(tmp_path / "out.csv"))
        assert main(["sweep", "--config", spec, "--max-minutes", "0"]) == 2
        assert "aborted" in capsys.readouterr().err

    def test_identical_seed_identical_bytes(self, tmp_path, capsys):
        spec = write_json(tmp_path / "spec.json", sweep_spec(tmp_path / "out.csv"))
        argv = ["sweep", "--config", spec, "--no-header-timestamp"]
        assert main(argv) == 0
        first = (tmp_path / "out.csv").read_bytes()
        first_meta = (tmp_path / "out.csv.meta.json").read_bytes()
        assert main(argv + ["--threads", "4"]) == 0
        assert (tmp_path / "out.csv").read_bytes() == first
        assert (tmp_path / "out.csv.meta.json").read_bytes() == first_meta


def test_console_script_is_installed(tmp_path):
    """The packaged entry point runs end to end in a real subprocess."""
    exe = shutil.which("cascade-sensor")
    if exe is None:
        pytest.skip("console script not on PATH")
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(SENSOR_CONFIG))
    done = subprocess.run(
        [exe, "validate", "--config", str(path)], capture_output=True, text=True
    )
    assert done.returncode == 0
    assert "ok" in done.stdout
