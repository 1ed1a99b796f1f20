"""CLI: config parsing, experiment runs, manifests, determinism, exit codes."""

import json
from pathlib import Path

import pytest

from aclab.cli import main, run
from aclab.config import RunConfig, load_config
from aclab.errors import ParseError, ValidationError


def write_config(tmp_path, text):
    p = tmp_path / "run.cfg"
    p.write_text(text)
    return p


class TestConfig:
    def test_minimal_file(self, tmp_path):
        p = write_config(tmp_path, "n = 3\nR_minus_a = 3\ngrid_N = 513\nepsilon = 0.3\n")
        cfg = load_config(p)
        assert cfg.n == 3 and cfg.r == 3.0 and cfg.grid_N == 513 and cfg.epsilon == 0.3

    def test_comments_and_blank_lines(self, tmp_path):
        p = write_config(tmp_path, "# comment\n\nn = 4\n")
        assert load_config(p).n == 4

    def test_even_grid_rejected(self, tmp_path):
        p = write_config(tmp_path, "grid_N = 512\n")
        with pytest.raises(ValidationError) as err:
            load_config(p)
        assert err.value.field == "grid_N"

    def test_schedule_parses(self, tmp_path):
        p = write_config(tmp_path, "epsilon_schedule = 1.2,0.6,0.3\n")
        assert load_config(p).epsilon_schedule == (1.2, 0.6, 0.3)

    def test_increasing_schedule_rejected(self, tmp_path):
        p = write_config(tmp_path, "epsilon_schedule = 0.3,0.6\n")
        with pytest.raises(ValidationError):
            load_config(p)

    def test_unknown_key(self, tmp_path):
        p = write_config(tmp_path, "banana = 1\n")
        with pytest.raises(ValidationError):
            load_config(p)

    def test_parse_error_carries_line(self, tmp_path):
        p = write_config(tmp_path, "n = 3\nnot a pair\n")
        with pytest.raises(ParseError) as err:
            load_config(p)
        assert err.value.line == 2

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_config(tmp_path / "nope.cfg")

    def test_dimension_validated(self):
        with pytest.raises(ValidationError):
            RunConfig(n=2).validate()


class TestMainExitCodes:
    def test_unknown_subcommand_exits_2(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == 2

    def test_bad_flag_value_returns_2(self, tmp_path):
        assert main(["metric", "--grid", "64", "--out", str(tmp_path)]) == 2

    def test_metric_run_passes(self, tmp_path):
        assert main(["metric", "--grid", "129", "--out", str(tmp_path)]) == 0
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        names = [f["name"] for f in manifest["files"]]
        assert "warp.csv" in names and "curvature.csv" in names
        assert manifest["all_passed"]

    def test_cap_compare_records_min(self, tmp_path):
        assert main(["cap-compare", "--out", str(tmp_path)]) == 0
        manifest = json.loads((tmp_path / "manifest.json").read_text())
        by_name = {c["name"]: c for c in manifest["checks"]}
        assert by_name["cap_min_f"]["measured"] >= -1e-12
        assert by_name["cap_min_f"]["passed"]


class TestRun:
    def test_determinism(self, tmp_path):
        cfg_a = RunConfig(grid_N=129, out_dir=str(tmp_path / "a"), experiment="metric")
        cfg_b = RunConfig(grid_N=129, out_dir=str(tmp_path / "b"), experiment="metric")
        ma = run("metric", cfg_a)
        mb = run("metric", cfg_b)
        assert [f["sha256"] for f in ma.files] == [f["sha256"] for f in mb.files]

    def test_solve_outputs(self, tmp_path):
        cfg = RunConfig(
            grid_N=129, out_dir=str(tmp_path), epsilon_schedule=(1.2, 0.6), experiment="solve"
        )
        manifest = run("solve", cfg)
        assert manifest.all_passed
        sols = json.loads((tmp_path / "solutions.json").read_text())
        assert len(sols) == 2
        for entry in sols:
            assert (tmp_path / entry["profile_csv"]).exists()

    def test_profile_csv_roundtrip(self, tmp_path):
        from aclab.exports import read_profile_csv

        cfg = RunConfig(grid_N=129, out_dir=str(tmp_path), epsilon=0.9, experiment="solve")
        run("solve", cfg)
        meta, s, u = read_profile_csv(tmp_path / "solution_eps0.9.csv")
        assert meta["well"] == "quartic"
        assert int(meta["N"]) == 129 == len(s) == len(u)

    def test_config_file_plus_flag_override(self, tmp_path, capsys):
        p = tmp_path / "run.cfg"
        p.write_text("grid_N = 513\nepsilon = 0.9\nout_dir = ignored\n")
        out = tmp_path / "out"
        code = main(
            ["metric", "--config", str(p), "--grid", "129", "--out", str(out)]
        )
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["config"]["grid_N"] == 129
        assert manifest["config"]["epsilon"] == 0.9
