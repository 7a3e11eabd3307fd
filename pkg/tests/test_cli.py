import json
import math

import pytest

from radial_toeplitz.cli import JobConfig, load_config, main


def run_cli(args, capsys):
    rc = main(args)
    out = capsys.readouterr()
    return rc, out.out, out.err


SPECTRUM_ARGS = ["spectrum", "--space", "BergmanComplex", "--d", "1", "--R", "1",
                 "--symbol", "chi(0,0.5)", "--kmax", "5", "--tol", "1e-10"]


class TestConfig:
    def test_flags_parse(self):
        cfg = load_config(SPECTRUM_ARGS)
        assert cfg.command == "spectrum"
        assert cfg.space == "BergmanComplex"
        assert cfg.kmax == 5

    def test_config_file_with_flag_override(self, tmp_path):
        path = tmp_path / "job.json"
        path.write_text(json.dumps({"space": "BergmanComplex", "d": 1, "R": 1.0,
                                    "symbol": "chi(0,0.5)", "kmax": 3, "tol": 1e-9}))
        cfg = load_config(["spectrum", "--config", str(path), "--kmax", "7"])
        assert cfg.kmax == 7          # flag wins
        assert cfg.tol == 1e-9        # file value kept

    def test_unknown_config_key(self, tmp_path):
        path = tmp_path / "job.json"
        path.write_text(json.dumps({"spacee": "BergmanComplex"}))
        with pytest.raises(ValueError):
            load_config(["spectrum", "--config", str(path)])

    @pytest.mark.parametrize("bad", [
        {"tol": 1e-15},
        {"tol": 0.5},
        {"lambda_min_log10": -5.0, "lambda_max_log10": -10.0},
        {"grid_points": 1},
        {"format": "xml"},
    ])
    def test_validation(self, bad):
        cfg = JobConfig(command="spectrum", space="BergmanComplex", d=1, R=1.0,
                        symbol="chi(0,0.5)")
        for key, val in bad.items():
            setattr(cfg, key, val)
        with pytest.raises(ValueError):
            cfg.validate()


class TestExitCodes:
    def test_config_error_is_one(self, capsys):
        rc, _, err = run_cli(["spectrum", "--space", "BergmanComplex", "--d", "1",
                              "--R", "1", "--symbol", "chi(0,0.5)", "--tol", "1"], capsys)
        assert rc == 1
        assert "config error" in err

    def test_symbol_error_is_one(self, capsys):
        rc, _, err = run_cli(["spectrum", "--space", "BergmanComplex", "--d", "1",
                              "--R", "1", "--symbol", "chii(0,0.5)"], capsys)
        assert rc == 1

    def test_insufficient_kmax_is_two(self, capsys):
        # chi(0,0.5) at kmax=5 leaves the |V| tail at 0.5^12, far above 1e-40
        rc, _, err = run_cli(["counting", "--space", "BergmanComplex", "--d", "1",
                              "--R", "1", "--symbol", "chi(0,0.5)", "--kmax", "5"], capsys)
        assert rc == 2
        assert "lambda=1e-40" in err and "k=" in err

    def test_experiment_assertion_failure_is_three(self, capsys):
        # at kmax=20 the fit window is far from asymptotic: slopes fall
        # outside their windows and the run reports failure
        rc, out, err = run_cli(["counterexample", "--kmax", "20", "--tol", "1e-8",
                                "--format", "json"], capsys)
        assert rc == 3
        assert "assertions failed" in err
        doc = json.loads(out)
        assert doc["passed"] is False


class TestOutputs:
    def test_spectrum_csv_matches_geometric_law(self, capsys):
        rc, out, _ = run_cli(SPECTRUM_ARGS, capsys)
        assert rc == 0
        lines = out.strip().split("\n")
        assert lines[0] == "# version=0.1.0"
        assert lines[1].startswith("# config=")
        assert lines[2] == "k,sign,log_abs,multiplicity"
        for row in lines[3:]:
            k, sign, log_abs, mult = row.split(",")
            want = (2 * int(k) + 2) * math.log(0.5)
            assert float(log_abs) == pytest.approx(want, abs=1e-9)
            assert (sign, mult) == ("1", "1")

    def test_config_echo_parses_back(self, capsys):
        _, out, _ = run_cli(SPECTRUM_ARGS, capsys)
        echo = json.loads(out.split("\n")[1].removeprefix("# config="))
        cfg = JobConfig(**echo)
        cfg.validate()
        assert cfg.symbol == "chi(0,0.5)"
        assert cfg.kmax == 5

    def test_deterministic_reruns(self, capsys):
        _, out1, _ = run_cli(SPECTRUM_ARGS, capsys)
        _, out2, _ = run_cli(SPECTRUM_ARGS, capsys)
        assert out1 == out2

    def test_counting_monotone(self, capsys):
        rc, out, _ = run_cli(["counting", "--space", "BergmanComplex", "--d", "1",
                              "--R", "1", "--symbol", "chi(0,0.5)", "--kmax", "80",
                              "--grid-points", "9"], capsys)
        assert rc == 0
        rows = [line.split(",") for line in out.strip().split("\n")[3:]]
        ns = [int(r[1]) for r in rows]
        lams = [float(r[0]) for r in rows]
        assert lams == sorted(lams)
        assert ns == sorted(ns, reverse=True)
        assert all(int(r[1]) == int(r[2]) + int(r[3]) for r in rows)

    def test_counting_json(self, capsys):
        rc, out, _ = run_cli(["counting", "--space", "BergmanComplex", "--d", "1",
                              "--R", "1", "--symbol", "chi(0,0.5)", "--kmax", "80",
                              "--grid-points", "4", "--format", "json"], capsys)
        assert rc == 0
        doc = json.loads(out)
        assert doc["version"] == "0.1.0"
        assert doc["config"]["symbol"] == "chi(0,0.5)"
        assert all({"lambda", "n", "n_plus", "n_minus"} == set(r) for r in doc["rows"])

    def test_compare_reports_law_and_ratios(self, capsys):
        rc, out, _ = run_cli(["compare", "--space", "BergmanComplex", "--d", "1",
                              "--R", "1", "--symbol", "chi(0,0.5)", "--kmax", "80",
                              "--grid-points", "5", "--format", "json"], capsys)
        assert rc == 0
        doc = json.loads(out)
        assert doc["law"]["log_power"] == 1
        assert 0.8 <= doc["final_ratio"] <= 1.2

    def test_periphery_json(self, capsys):
        rc, out, _ = run_cli(["periphery", "--space", "BergmanComplex", "--d", "1",
                              "--R", "1", "--symbol", "chi(0.4,0.8)-5*chi(0,0.3)",
                              "--kmax", "210", "--format", "json"], capsys)
        assert rc == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        assert doc["exact_support_radius"] == 0.8

    def test_counterexample_csv_rows(self, capsys):
        rc, out, _ = run_cli(["counterexample", "--kmax", "20", "--tol", "1e-8"], capsys)
        assert rc == 3  # slopes are far from asymptotic at kmax=20
        lines = out.strip().split("\n")
        assert any(line.startswith("# report=") for line in lines)
        header_idx = lines.index("k,sign_v,log_abs_v,sign_abs,log_abs_abs")
        assert len(lines) - header_idx - 1 == 21

    def test_output_file(self, tmp_path, capsys):
        target = tmp_path / "spec.csv"
        rc, out, _ = run_cli(SPECTRUM_ARGS[:1] + ["--out", str(target)] + SPECTRUM_ARGS[1:],
                             capsys)
        assert rc == 0
        assert out == ""
        assert target.read_text().startswith("# version=")
