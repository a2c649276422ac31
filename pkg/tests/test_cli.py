"""End-to-end checks of the slice-sim command line."""

import csv
import json
import os
import subprocess
import sys

import pytest

from slicesim.cli import main
from slicesim.experiments import EPISODE_FIELDS, TRAINING_LOG_FIELDS

TINY = [
    "--set", "sim.episode_steps=40",
    "--set", "sim.warmup_steps=10",
    "--set", "eval.episodes=2",
    "--set", "train.episodes=2",
    "--set", "sac.hidden=16,16",
    "--set", "sac.batch=8",
    "--set", "sac.warmup_factor=2",
    "--set", "sac.update_every=10",
]


def read_bytes(path):
    with open(path, "rb") as f:
        return f.read()


def read_rows(path):
    with open(path, newline="") as f:
        return list(csv.DictReader(f))


class TestEval:
    def test_equal_agent_end_to_end(self, tmp_path):
        out = str(tmp_path / "run")
        rc = main(
            ["eval", "--agent", "equal", "--densities", "2", "--seed", "9",
             "--out", out, *TINY]
        )
        assert rc == 0
        cell = os.path.join(out, "equal", "n2")
        for name in ("episodes.csv", "layout.csv"):
            assert os.path.exists(os.path.join(cell, name))
        for name in (
            "manifest.json",
            "satisfaction.csv",
            "cdf_sync.csv",
            "embb_throughput.csv",
            "summary.csv",
        ):
            assert os.path.exists(os.path.join(out, name))

        rows = read_rows(os.path.join(cell, "episodes.csv"))
        assert list(rows[0]) == EPISODE_FIELDS
        # 2 episodes x (2 xr + 5 embb)
        assert len(rows) == 2 * 7
        assert {r["slice"] for r in rows} == {"xr", "embb"}

        with open(os.path.join(out, "manifest.json")) as f:
            manifest = json.load(f)
        assert manifest["command"] == "eval"
        assert manifest["master_seed"] == 9
        assert manifest["config"]["sim.episode_steps"] == 40
        assert "seed_scheme" in manifest
        assert manifest["cells"]

    def test_same_seed_runs_byte_identical(self, tmp_path):
        args = ["eval", "--agent", "demand", "--densities", "3", "--seed", "5",
                *TINY]
        outs = []
        for name in ("a", "b"):
            out = str(tmp_path / name)
            assert main(args + ["--out", out]) == 0
            outs.append(out)
        for rel in (
            os.path.join("demand", "n3", "episodes.csv"),
            os.path.join("demand", "n3", "layout.csv"),
            "satisfaction.csv",
            "cdf_sync.csv",
            "embb_throughput.csv",
            "summary.csv",
        ):
            a = read_bytes(os.path.join(outs[0], rel))
            b = read_bytes(os.path.join(outs[1], rel))
            assert a == b, rel

    def test_missing_policy_is_checkpoint_error(self, tmp_path):
        rc = main(
            ["eval", "--agent", "sac", "--densities", "2", "--out",
             str(tmp_path / "x"), *TINY]
        )
        assert rc == 4


class TestSweep:
    def test_baseline_grid(self, tmp_path):
        out = str(tmp_path / "grid")
        rc = main(
            ["sweep", "--agents", "equal,demand", "--densities", "2,3",
             "--seed", "1", "--out", out, *TINY]
        )
        assert rc == 0
        sat = read_rows(os.path.join(out, "satisfaction.csv"))
        assert len(sat) == 4
        assert {(r["agent"], r["density"]) for r in sat} == {
            ("equal", "2"), ("equal", "3"), ("demand", "2"), ("demand", "3"),
        }
        for r in sat:
            assert 0.0 <= float(r["ratio"]) <= 1.0
            assert float(r["wilson_lo"]) <= float(r["ratio"]) <= float(r["wilson_hi"])
        # no sac cell, so the comparison table is just a header
        assert read_rows(os.path.join(out, "summary.csv")) == []

    def test_learned_agent_writes_policy_and_log(self, tmp_path):
        out = str(tmp_path / "sac")
        rc = main(
            ["sweep", "--agents", "sac", "--densities", "2", "--seed", "3",
             "--out", out, *TINY]
        )
        assert rc == 0
        cell = os.path.join(out, "sac", "n2")
        assert os.path.exists(os.path.join(cell, "policy.bin"))
        log = read_rows(os.path.join(cell, "training_log.csv"))
        assert list(log[0]) == TRAINING_LOG_FIELDS
        assert len(log) == 2
        for row in log:
            assert float(row["lambda"]) > 0.0

    def test_resume_skips_complete_cells(self, tmp_path, capsys):
        out = str(tmp_path / "resume")
        args = ["sweep", "--agents", "equal", "--densities", "2", "--seed", "2",
                "--out", out, *TINY]
        assert main(args) == 0
        ep_path = os.path.join(out, "equal", "n2", "episodes.csv")
        before = read_bytes(ep_path)
        mtime = os.path.getmtime(ep_path)
        capsys.readouterr()
        assert main(args) == 0
        assert "skipping" in capsys.readouterr().out
        assert read_bytes(ep_path) == before
        assert os.path.getmtime(ep_path) == mtime

    def test_parallel_workers_match_sequential(self, tmp_path):
        grid = ["sweep", "--agents", "equal,demand", "--densities", "2,3",
                "--seed", "6", *TINY]
        seq = str(tmp_path / "seq")
        par = str(tmp_path / "par")
        assert main(grid + ["--out", seq]) == 0
        assert main(grid + ["--out", par, "--workers", "2"]) == 0
        for rel in (
            os.path.join("equal", "n2", "episodes.csv"),
            os.path.join("equal", "n3", "episodes.csv"),
            os.path.join("demand", "n2", "episodes.csv"),
            os.path.join("demand", "n3", "episodes.csv"),
            "satisfaction.csv",
            "cdf_sync.csv",
        ):
            assert read_bytes(os.path.join(seq, rel)) == read_bytes(
                os.path.join(par, rel)
            ), rel

    def test_bad_worker_count(self, tmp_path):
        rc = main(
            ["sweep", "--agents", "equal", "--workers", "0",
             "--out", str(tmp_path / "x"), *TINY]
        )
        assert rc == 2

    def test_report_rebuild_is_identical(self, tmp_path):
        out = str(tmp_path / "rep")
        assert main(
            ["sweep", "--agents", "equal,demand", "--densities", "2",
             "--seed", "4", "--out", out, *TINY]
        ) == 0
        sat_path = os.path.join(out, "satisfaction.csv")
        before = read_bytes(sat_path)
        os.remove(sat_path)
        assert main(["report", "--out", out]) == 0
        assert read_bytes(sat_path) == before


class TestErrors:
    def test_unknown_override_key(self, tmp_path):
        rc = main(
            ["eval", "--agent", "equal", "--set", "sim.nope=1",
             "--out", str(tmp_path / "x")]
        )
        assert rc == 2

    def test_malformed_override(self, tmp_path):
        rc = main(
            ["eval", "--agent", "equal", "--set", "sim.episode_steps",
             "--out", str(tmp_path / "x")]
        )
        assert rc == 2

    def test_train_rejects_heuristic_agent(self, tmp_path):
        rc = main(
            ["train", "--agent", "equal", "--out", str(tmp_path / "x"), *TINY]
        )
        assert rc == 2

    def test_unknown_preset(self, tmp_path):
        # rejected by the argument parser itself, still exit status 2
        with pytest.raises(SystemExit) as exc:
            main(
                ["eval", "--agent", "equal", "--preset", "galaxy",
                 "--out", str(tmp_path / "x")]
            )
        assert exc.value.code == 2

    def test_report_needs_records(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        assert main(["report", "--out", str(empty)]) == 2

    def test_unknown_agent_in_sweep(self, tmp_path):
        rc = main(
            ["sweep", "--agents", "equal,zorp", "--out", str(tmp_path / "x"),
             *TINY]
        )
        assert rc == 2


class TestConsoleScript:
    def test_installed_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "slicesim.cli", "--help"],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0
        assert "slice-sim" in proc.stdout
        for sub in ("train", "eval", "sweep", "report"):
            assert sub in proc.stdout

    def test_config_file_plus_override(self, tmp_path):
        cfg = tmp_path / "c.cfg"
        cfg.write_text(
            "# tiny run\n"
            "sim.episode_steps = 30\n"
            "sim.warmup_steps = 5\n"
            "eval.episodes = 1\n"
        )
        out = str(tmp_path / "run")
        rc = main(
            ["eval", "--agent", "equal", "--config", str(cfg),
             "--densities", "2", "--set", "eval.episodes=2", "--out", out]
        )
        assert rc == 0
        with open(os.path.join(out, "manifest.json")) as f:
            manifest = json.load(f)
        assert manifest["config"]["sim.episode_steps"] == 30
        assert manifest["config"]["eval.episodes"] == 2
        rows = read_rows(os.path.join(out, "equal", "n2", "episodes.csv"))
        assert {r["episode"] for r in rows} == {"0", "1"}
