import hashlib
import json
import subprocess
import sys
from pathlib import Path

import pytest

import coolsim.scenarios
from coolsim.cli import main
from coolsim.scenarios import SCENARIOS, Scenario


SMALL_ORACLE = {
    "scenario": "oracle-crosscheck",
    "seed": 5,
    "params": {"n_gamma": 3, "n_t_m": 3, "n_iterations": 20},
}


def write_json(path: Path, payload) -> Path:
    path.write_text(json.dumps(payload), encoding="utf-8")
    return path


class TestList:
    def test_lists_all_scenarios(self, capsys):
        assert main(["list"]) == 0
        out = capsys.readouterr().out
        for name in SCENARIOS:
            assert name in out
        assert len(SCENARIOS) == 6

    def test_json_listing(self, capsys):
        assert main(["list", "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert sorted(entry["name"] for entry in payload) == sorted(SCENARIOS)
        assert all("defaults" in entry for entry in payload)

    def test_unknown_flag_usage_error(self, capsys):
        assert main(["list", "--bogus"]) == 1


class TestRun:
    def test_run_and_manifest(self, tmp_path, capsys):
        cfg = write_json(tmp_path / "cfg.json", SMALL_ORACLE)
        out_dir = tmp_path / "out"
        assert main(["run", str(cfg), "--out", str(out_dir)]) == 0
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["scenario"] == "oracle-crosscheck"
        assert manifest["status"] == "complete"
        assert manifest["seed"] == 5
        assert manifest["config"]["n_gamma"] == 3
        for name, digest in manifest["outputs"].items():
            actual = hashlib.sha256((out_dir / name).read_bytes()).hexdigest()
            assert actual == digest

    def test_byte_identical_reruns(self, tmp_path):
        cfg = write_json(tmp_path / "cfg.json", SMALL_ORACLE)
        a, b = tmp_path / "a", tmp_path / "b"
        assert main(["run", str(cfg), "--out", str(a)]) == 0
        assert main(["run", str(cfg), "--out", str(b)]) == 0
        csv_a = (a / "oracle_crosscheck.csv").read_bytes()
        csv_b = (b / "oracle_crosscheck.csv").read_bytes()
        assert csv_a == csv_b

    def test_toml_config(self, tmp_path):
        cfg = tmp_path / "cfg.toml"
        cfg.write_text(
            'scenario = "fig3b-rwa-ratio"\nseed = 2\n\n[params]\nn_t_m = 10\n',
            encoding="utf-8")
        out_dir = tmp_path / "out"
        assert main(["run", str(cfg), "--out", str(out_dir)]) == 0
        header = (out_dir / "fig3b_rwa_ratio.csv").read_text().splitlines()[0]
        assert header == "t_m,energy,ratio_counter_co"

    def test_seed_override(self, tmp_path):
        cfg = write_json(tmp_path / "cfg.json", SMALL_ORACLE)
        out_dir = tmp_path / "out"
        assert main(["run", str(cfg), "--out", str(out_dir), "--seed", "77"]) == 0
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["seed"] == 77

    def test_missing_config_exits_one(self, tmp_path, capsys):
        assert main(["run", str(tmp_path / "nope.toml"), "--out", str(tmp_path)]) == 1
        assert "not found" in capsys.readouterr().err

    def test_unknown_scenario_exits_one(self, tmp_path, capsys):
        cfg = write_json(tmp_path / "cfg.json", {"scenario": "nope"})
        assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 1

    def test_unknown_param_exits_one(self, tmp_path, capsys):
        cfg = write_json(tmp_path / "cfg.json",
                         {"scenario": "fig3b-rwa-ratio", "params": {"bogus": 1}})
        assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 1
        assert "bogus" in capsys.readouterr().err

    def test_numerical_failure_exits_two(self, tmp_path, monkeypatch, capsys):
        # a runner blowing up mid-run must exit 2 and leave a failed manifest
        def broken_runner(params, out_dir, jobs, seed):
            (out_dir / "partial.csv").write_text("a,b\n1,2\n", encoding="utf-8")
            raise RuntimeError("solver blew up")

        broken = Scenario("fig3b-rwa-ratio", "broken", {}, broken_runner)
        monkeypatch.setitem(coolsim.scenarios.SCENARIOS, "fig3b-rwa-ratio", broken)
        cfg = write_json(tmp_path / "cfg.json", {"scenario": "fig3b-rwa-ratio"})
        out_dir = tmp_path / "out"
        assert main(["run", str(cfg), "--out", str(out_dir)]) == 2
        assert "solver blew up" in capsys.readouterr().err
        assert (out_dir / "partial.csv").exists()  # partial results preserved
        manifest = json.loads((out_dir / "manifest.json").read_text())
        assert manifest["status"] == "failed"

    def test_jobs_env_fallback(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv("COOLSIM_JOBS", "not-a-number")
        cfg = write_json(tmp_path / "cfg.json", SMALL_ORACLE)
        assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 1
        monkeypatch.setenv("COOLSIM_JOBS", "2")
        assert main(["run", str(cfg), "--out", str(tmp_path / "o")]) == 0


def test_console_entry_point(tmp_path):
    result = subprocess.run([sys.executable, "-m", "coolsim.cli", "list"],
                            capture_output=True, text=True)
    assert result.returncode == 0
    assert "fig2-qubit-sweep" in result.stdout
