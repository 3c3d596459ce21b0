"""
Tests for the bmo management command.

This module tests:
- run / batch / sweep / placements / image / rpm outputs
- oracle, validate, list-scenarios and metrics
- Exit codes and the JSON error report on stderr, usage errors included
"""

import json
from io import StringIO

import pytest
from django.core.management import call_command, execute_from_command_line

from harness.exceptions import CommandUsageError
from landscapes.imaging import synthetic_blob_image, write_pgm
from simulation.models import ExperimentRun


# Fixtures

SMALL = {
    "name": "small",
    "landscape": {"kind": "three_peaks", "params": {}},
    "params": {"step_size": 2.0, "n_agents": 5, "max_iters": 30, "jitter": 1.0},
    "capture_radius": 5.0,
    "seeds": [1, 2],
}


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(SMALL))
    return str(path)


def bmo(*args):
    """Run the command; returns (stdout, stderr)."""
    out, err = StringIO(), StringIO()
    call_command("bmo", *args, stdout=out, stderr=err)
    return out.getvalue(), err.getvalue()


def bmo_fails(*args):
    """Run a failing command; returns (exit code, decoded stderr report)."""
    out, err = StringIO(), StringIO()
    with pytest.raises(SystemExit) as excinfo:
        call_command("bmo", *args, stdout=out, stderr=err)
    return excinfo.value.code, json.loads(err.getvalue())


# Run Tests

class TestRunCommand:
    """bmo run"""

    def test_writes_trace_and_summary(self, small_config, tmp_path):
        out_dir = tmp_path / "out"
        stdout, _ = bmo("run", "--config", small_config, "--out", str(out_dir))
        trace = (out_dir / "trace.csv").read_text().splitlines()
        assert trace[0] == "iter,agent_id,x,y,uv,fitness,lmate_id"
        assert len(trace) == 1 + 31 * 5
        summary = json.loads((out_dir / "summary.json").read_text())
        assert summary["scenario"] == "small"
        assert summary["seed"] == 1
        assert summary["config"]["params"]["rng_seed"] == 1
        assert "small seed 1" in stdout

    def test_runs_are_byte_identical(self, small_config, tmp_path):
        for name in ("a", "b"):
            bmo("run", "--config", small_config, "--seed", "9", "--out", str(tmp_path / name), "--quiet")
        for file_name in ("trace.csv", "summary.json"):
            assert (tmp_path / "a" / file_name).read_bytes() == (tmp_path / "b" / file_name).read_bytes()

    def test_default_output_dir(self, small_config, output_dir):
        bmo("run", "--config", small_config, "--quiet")
        assert (output_dir / "small" / "trace.csv").is_file()

    def test_quiet_prints_nothing(self, small_config, output_dir):
        stdout, _ = bmo("run", "--config", small_config, "--quiet")
        assert stdout == ""

    @pytest.mark.django_db
    def test_record(self, small_config, output_dir):
        bmo("run", "--config", small_config, "--seed", "2", "--record", "--quiet")
        stored = ExperimentRun.objects.get()
        assert stored.scenario_name == "small"
        assert stored.seed_value == 2

    def test_output_path_is_a_file(self, small_config, tmp_path):
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        code, report = bmo_fails("run", "--config", small_config, "--out", str(blocker))
        assert code == 4
        assert report["error"] == "OutputPathError"
        assert report["exit_code"] == 4

    def test_invalid_config_exit_code(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({**SMALL, "params": {"b2": 0.5}}))
        code, report = bmo_fails("run", "--config", str(path))
        assert code == 3
        assert report["error"] == "ScenarioConfigError"
        assert report["message"].startswith("params: ")

    def test_unknown_scenario_exit_code(self):
        code, report = bmo_fails("validate", "--config", "no_such_scenario")
        assert code == 3
        assert report["message"].startswith("--config: ")

    def test_unexpected_error_exit_code(self, small_config, tmp_path, mocker):
        mocker.patch(
            "harness.management.commands.bmo.run_experiment",
            side_effect=RuntimeError("boom"),
        )
        code, report = bmo_fails("run", "--config", small_config, "--out", str(tmp_path / "out"))
        assert code == 1
        assert report == {"error": "RuntimeError", "message": "boom", "exit_code": 1}


# Batch, Sweep and Placement Tests

class TestBatchCommand:
    """bmo batch, bmo sweep and bmo placements"""

    def test_batch_files(self, small_config, tmp_path):
        bmo("batch", "--config", small_config, "--out", str(tmp_path), "--quiet")
        assert json.loads((tmp_path / "seed_1.json").read_text())["seed"] == 1
        assert json.loads((tmp_path / "seed_2.json").read_text())["seed"] == 2
        aggregate = json.loads((tmp_path / "aggregate.json").read_text())
        assert aggregate["seeds"] == [1, 2]
        assert aggregate["aggregate"]["replicates"] == 2

    @pytest.mark.django_db
    def test_batch_seeds_and_record(self, small_config, tmp_path):
        bmo("batch", "--config", small_config, "--seeds", "7", "3", "--record", "--label", "cli",
            "--out", str(tmp_path), "--quiet")
        assert (tmp_path / "seed_3.json").is_file()
        assert sorted(r.seed_value for r in ExperimentRun.objects.filter(batch_label="cli")) == [3, 7]

    def test_sweep(self, small_config, tmp_path):
        stdout, _ = bmo("sweep", "--config", small_config, "--steps", "1", "4", "--seeds", "1",
                        "--out", str(tmp_path))
        rows = json.loads((tmp_path / "sweep.json").read_text())["rows"]
        assert [row["step_size"] for row in rows] == [1.0, 4.0]
        assert "success" in stdout

    def test_placements(self, small_config, tmp_path):
        stdout, _ = bmo("placements", "--config", small_config, "--seeds", "1", "--out", str(tmp_path))
        data = json.loads((tmp_path / "placements.json").read_text())
        assert [row["layout"] for row in data["rows"]] == ["quadrant", "uniform", "clustered"]
        clustered = data["rows"][2]["placement"]["positions"]
        assert len(clustered) == 5
        assert clustered[0] == [48.0, 48.0]
        assert all(len(row["mean_agents_nearest_peak"]) == 3 for row in data["rows"])
        assert "clustered" in stdout

    def test_placements_custom_cluster(self, small_config, tmp_path):
        bmo("placements", "--config", small_config, "--seeds", "1", "--cluster", "20", "70",
            "--spacing", "1", "--out", str(tmp_path), "--quiet")
        data = json.loads((tmp_path / "placements.json").read_text())
        assert data["rows"][2]["placement"]["positions"][4] == [20.0, 70.0]

    def test_placements_bad_spacing(self, small_config):
        code, report = bmo_fails("placements", "--config", small_config, "--spacing", "0")
        assert code == 3
        assert report["message"].startswith("--spacing: ")

    def test_placements_need_a_plane(self):
        code, report = bmo_fails("placements", "--config", "sphere")
        assert code == 3
        assert report["message"].startswith("landscape.kind: ")


# Oracle, Validate and Listing Tests

class TestInspectionCommands:
    """bmo oracle, validate, list-scenarios"""

    def test_oracle_three_peaks(self, tmp_path):
        stdout, _ = bmo("oracle", "--config", "three_peaks", "--out", str(tmp_path))
        lines = stdout.splitlines()
        assert lines[0] == "x,y,fitness"
        assert len(lines) == 4
        x, y, _ = (float(v) for v in lines[1].split(","))
        assert abs(x - 25.0) <= 0.25 and abs(y - 30.0) <= 0.25
        assert (tmp_path / "oracle.csv").read_text() == stdout

    def test_oracle_rejects_sphere(self):
        code, report = bmo_fails("oracle", "--config", "sphere")
        assert code == 5
        assert report["error"] == "UnsupportedLandscapeError"

    def test_oracle_rejects_coarse_grid(self):
        code, _ = bmo_fails("oracle", "--config", "three_peaks", "--resolution", "50")
        assert code == 3

    def test_validate(self):
        stdout, _ = bmo("validate", "--config", "dual_source")
        assert stdout.strip() == "OK dual_source"

    def test_list_scenarios(self):
        stdout, _ = bmo("list-scenarios")
        lines = stdout.splitlines()
        assert len(lines) == 13
        assert lines[0].startswith("chasing_sources")


# Metrics Tests

class TestMetricsCommand:
    """bmo metrics"""

    def test_matches_run_summary(self, small_config, tmp_path):
        bmo("run", "--config", small_config, "--out", str(tmp_path), "--quiet")
        summary = json.loads((tmp_path / "summary.json").read_text())["metrics"]
        stdout, _ = bmo("metrics", "--config", small_config, "--trace", str(tmp_path / "trace.csv"))
        report = json.loads(stdout)
        assert report["rows"] == 31 * 5
        assert report["iterations"] == 31
        assert report["capture_iteration"] == summary["capture_iteration"]
        assert report["all_captured_iteration"] == summary["all_captured_iteration"]

    def test_bad_trace_exit_code(self, small_config, tmp_path):
        trace = tmp_path / "trace.csv"
        trace.write_text("iter,agent,x,y,uv,fitness,lmate_id\n")
        code, report = bmo_fails("metrics", "--config", small_config, "--trace", str(trace))
        assert code == 6
        assert report["error"] == "TraceFormatError"


# Image and RPM Tests

class TestImageAndRpmCommands:
    """bmo image and bmo rpm"""

    def test_image_from_file(self, tmp_path):
        image = tmp_path / "blob.pgm"
        write_pgm(image, synthetic_blob_image((48, 64), [(40, 20, 6, 1.0)]))
        out_dir = tmp_path / "out"
        bmo("image", "--image", str(image), "--agents", "6", "--iters", "60", "--seed", "1",
            "--out", str(out_dir), "--quiet")
        coordinates = (out_dir / "converged.csv").read_text().splitlines()
        assert coordinates[0] == "agent_id,x,y"
        assert len(coordinates) == 7
        summary = json.loads((out_dir / "image_summary.json").read_text())
        assert len(summary["bright_regions"]) == 1
        assert len(summary["fraction_inside_region"]) == 1
        assert summary["config"]["params"]["n_agents"] == 6
        assert summary["config"]["params"]["jitter"] == 0.0
        assert summary["config"]["params"]["movement"] == "fixed"

    def test_image_needs_a_source(self):
        code, report = bmo_fails("image")
        assert code == 3
        assert report["message"].startswith("--image: ")

    def test_image_rejects_other_landscapes(self):
        code, _ = bmo_fails("image", "--config", "three_peaks")
        assert code == 3

    def test_missing_image_file(self, tmp_path):
        code, _ = bmo_fails("image", "--image", str(tmp_path / "absent.pgm"))
        assert code == 3

    def test_rpm_profile(self, tmp_path):
        bmo("rpm", "--config", "single_source", "--rpms", "0", "15", "--iters", "8", "--out", str(tmp_path))
        data = json.loads((tmp_path / "rpm.json").read_text())
        assert data["probe"] == [115.0, 90.0]
        assert [row["rpm"] for row in data["rows"]] == [0.0, 15.0]
        assert data["rows"][1]["period"] == 4

    def test_rpm_needs_light(self):
        code, _ = bmo_fails("rpm", "--config", "three_peaks", "--rpms", "1")
        assert code == 3


# Usage Error Tests

class TestUsageErrors:
    """Command-line parse failures"""

    def run_from_command_line(self, capsys, *args):
        with pytest.raises(SystemExit) as excinfo:
            execute_from_command_line(["manage.py", "bmo", *args])
        return excinfo.value.code, json.loads(capsys.readouterr().err)

    def test_unknown_flag(self, capsys):
        code, report = self.run_from_command_line(capsys, "run", "--config", "three_peaks", "--bogus")
        assert code == 2
        assert report["error"] == "CommandUsageError"
        assert report["exit_code"] == 2
        assert "--bogus" in report["message"]

    def test_missing_subcommand(self, capsys):
        code, report = self.run_from_command_line(capsys)
        assert code == 2
        assert report["error"] == "CommandUsageError"
        assert "subcommand" in report["message"]

    def test_bad_value_in_subcommand(self, capsys):
        code, report = self.run_from_command_line(capsys, "run", "--config", "three_peaks", "--seed", "abc")
        assert code == 2
        assert "--seed" in report["message"]

    def test_call_command_raises(self):
        with pytest.raises(CommandUsageError):
            call_command("bmo", "run", "--config", "three_peaks", "--bogus")
