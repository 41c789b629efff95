import csv
import json
import math

import numpy as np
import pytest

from raceway.cli import run
from raceway.config import build_config, load_config
from raceway.errors import ParseError, ValidationError


class TestConfig:
    def test_defaults(self):
        cfg = build_config()
        assert cfg.env.Q0 == 0.04
        assert cfg.env.a0 == 0.4
        assert cfg.env.eps == pytest.approx(math.log(10.0) / 0.4)
        assert cfg.han.kr == 6.8e-3
        assert cfg.settings.rho == 1e3

    def test_empty_file_gives_defaults(self, tmp_path):
        path = tmp_path / "empty.cfg"
        path.write_text("# nothing but a comment\n\n")
        cfg = load_config(path)
        assert cfg.raw == build_config().raw

    def test_overrides_and_comments(self, tmp_path):
        path = tmp_path / "run.cfg"
        path.write_text("Q0 = 0.05  # stronger pump\nNz = 12\n")
        cfg = load_config(path)
        assert cfg.env.Q0 == 0.05
        assert cfg.settings.Nz == 12
        assert cfg.env.L == 10.0

    @pytest.mark.parametrize("text", [
        "frobnicate = 1\n",
        "Q0 = 0.04\nQ0 = 0.05\n",
        "Q0 = fast\n",
        "just words\n",
    ])
    def test_parse_errors(self, tmp_path, text):
        path = tmp_path / "bad.cfg"
        path.write_text(text)
        with pytest.raises(ParseError):
            load_config(path)

    def test_parse_error_carries_location(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("L = 10\nbogus = 3\n")
        with pytest.raises(ParseError, match=r"bad\.cfg:2"):
            load_config(path)

    @pytest.mark.parametrize("overrides", [
        {"Q0": -1.0},
        {"a0": 0.05},            # below the critical height
        {"bottom_light_fraction": 1.5},
        {"Nz": 0},
        {"N": -1},
    ])
    def test_validation_errors(self, overrides):
        with pytest.raises(ValidationError):
            build_config(overrides)


class TestCli:
    def test_simulate_writes_traces(self, tmp_path, capsys):
        code = run(["simulate", "--layers", "3", "--output-dir", str(tmp_path)])
        assert code == 0
        files = sorted(p.name for p in tmp_path.glob("trace_layer_*.csv"))
        assert files == ["trace_layer_001.csv", "trace_layer_002.csv", "trace_layer_003.csv"]
        assert "mu_bar=" in capsys.readouterr().out

    def test_optimize_outputs_round_trip(self, tmp_path):
        cfg = tmp_path / "run.cfg"
        cfg.write_text("N = 1\nNz = 3\nmax_iter = 5\ndt = 0.2\n")
        code = run(["optimize", "--config", str(cfg), "--output-dir", str(tmp_path)])
        assert code == 0

        with open(tmp_path / "report.json", encoding="utf-8") as fh:
            report = json.load(fh)
        with open(tmp_path / "a_star.csv", newline="", encoding="utf-8") as fh:
            coeffs = [float(row["a"]) for row in csv.DictReader(fh)]
        # CSV floats are written in round-trippable form
        assert coeffs == report["a_star"]
        assert (tmp_path / "mu_history.csv").exists()
        assert (tmp_path / "topography.csv").exists()
        assert report["config"]["N"] == 1

    def test_grad_check(self, tmp_path, capsys):
        code = run(["grad-check", "--layers", "2", "--order", "2",
                    "--coeffs", "0.02,-0.01", "--output-dir", str(tmp_path)])
        assert code == 0
        out = capsys.readouterr().out
        assert "max relative error" in out
        assert (tmp_path / "grad_check.csv").exists()

    def test_dump_topography(self, tmp_path):
        code = run(["dump-topography", "--coeffs", "0.05", "--samples", "11",
                    "--output-dir", str(tmp_path)])
        assert code == 0
        with open(tmp_path / "topography.csv", newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 11
        h = np.array([float(r["h"]) for r in rows])
        assert np.all(h > 0)

    def test_computation_error_exit_code(self, tmp_path, capsys):
        code = run(["dump-topography", "--coeffs", "-0.39",
                    "--output-dir", str(tmp_path)])
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_usage_error_exit_code(self):
        with pytest.raises(SystemExit) as exc:
            run(["no-such-command"])
        assert exc.value.code == 2

    def test_nz_sweep(self, tmp_path):
        code = run(["nz-sweep", "--nz-list", "1,4", "--samples", "2",
                    "--order", "2", "--output-dir", str(tmp_path)])
        assert code == 0
        with open(tmp_path / "nz_sweep.csv", newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        assert [r["Nz"] for r in rows] == ["1", "4"]
