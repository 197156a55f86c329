"""Command-line behaviour: formats, exit codes, determinism, schemas."""

import csv
import importlib.resources
import io
import json

import jsonschema
import numpy as np
import pytest

from qshare import cli, entanglement, noise, witness


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def load_schema(name):
    ref = importlib.resources.files("qshare") / "schemas" / name
    return json.loads(ref.read_text())


class TestParseRange:
    def test_single_value(self):
        assert cli.parse_range("0.8", integer=False) == [0.8]
        assert cli.parse_range("4", integer=True) == [4]

    def test_comma_list(self):
        assert cli.parse_range("2,5,3", integer=True) == [2, 5, 3]

    def test_integer_span(self):
        assert cli.parse_range("2:6", integer=True) == [2, 3, 4, 5, 6]

    def test_float_span_hits_endpoint(self):
        vals = cli.parse_range("0.6:1.0:0.05", integer=False)
        assert len(vals) == 9
        assert vals[0] == 0.6
        assert vals[-1] == 1.0

    def test_rejects_bad_step(self):
        with pytest.raises(ValueError):
            cli.parse_range("1:5:0", integer=False)

    def test_rejects_non_integer(self):
        with pytest.raises(ValueError):
            cli.parse_range("2.5", integer=True)

    def test_rejects_malformed(self):
        with pytest.raises(ValueError):
            cli.parse_range("1:2:3:4", integer=False)


class TestFormatting:
    def test_twelve_significant_digits(self):
        assert cli.fmt12(1.0 / 3.0) == "0.333333333333"
        assert cli.fmt12(2.0) == "2"
        assert cli.fmt12(4.0 / 9.0) == "0.444444444444"


class TestMaxent:
    def test_csv_table(self, capsys):
        code, out, _ = run_cli(capsys, "maxent", "--r", "2:3", "--k", "2:3")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["r", "k", "ci_max"]
        # pairs with r <= k only: (2,2), (2,3), (3,3)
        assert len(rows) == 4
        assert rows[2][:2] == ["2", "3"]
        assert float(rows[2][2]) == pytest.approx(np.sqrt(3) / 2, abs=1e-11)

    def test_json_matches_closed_form(self, capsys):
        code, out, _ = run_cli(capsys, "maxent", "--r", "2:6", "--k", "6", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert len(payload) == 5
        for row in payload:
            ref = entanglement.max_i_concurrence(row["r"], row["k"])
            assert row["ci_max"] == pytest.approx(ref, abs=1e-11)

    def test_domain_error_exit(self, capsys, caplog):
        code, _, _ = run_cli(capsys, "maxent", "--r", "1:3", "--k", "4")
        assert code == 2
        assert "r=1" in caplog.text

    def test_empty_intersection_is_domain_error(self, capsys):
        code, _, _ = run_cli(capsys, "maxent", "--r", "5:6", "--k", "3")
        assert code == 2

    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "table.csv"
        code, out, _ = run_cli(capsys, "maxent", "--r", "2", "--k", "2", "--out", str(target))
        assert code == 0
        assert out == ""
        assert target.read_text().startswith("r,k,ci_max")


class TestThreshold:
    def test_default_grid(self, capsys):
        code, out, _ = run_cli(capsys, "threshold")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["c", "c_critical", "Q", "R"]
        assert len(rows) == 10  # header + 9 grid points
        assert rows[1][0] == "0.6"
        assert rows[-1][0] == "1"

    def test_out_of_domain_rows_skipped_but_run_continues(self, capsys, caplog):
        code, out, _ = run_cli(capsys, "threshold", "--c", "0.5,0.8")
        assert code == 0
        assert "0.5" in caplog.text
        rows = list(csv.reader(io.StringIO(out)))
        assert len(rows) == 2
        assert rows[1][0] == "0.8"

    def test_all_out_of_domain_is_error(self, capsys):
        code, _, _ = run_cli(capsys, "threshold", "--c", "0.1,0.2")
        assert code == 2

    def test_values_match_library(self, capsys):
        code, out, _ = run_cli(capsys, "threshold", "--c", "0.9", "--format", "json")
        assert code == 0
        row = json.loads(out)[0]
        assert row["c_critical"] == pytest.approx(witness.critical_concurrence(0.9), abs=1e-11)
        coef = noise.channel_coefficients(noise.params_from_c(0.9, k=2))
        assert row["Q"] == pytest.approx(coef.Q, abs=1e-11)
        assert row["R"] == pytest.approx(coef.R, abs=1e-11)


class TestState:
    def test_text_report(self, capsys):
        code, out, _ = run_cli(capsys, "state", "--lambda1", "0.5", "--c", "0.9")
        assert code == 0
        assert "local output:" in out
        assert "nonlocal output:" in out
        assert "verdict: entangled" in out
        assert "verdict: separable" in out

    def test_json_matrix_matches_library(self, capsys):
        code, out, _ = run_cli(
            capsys, "state", "--lambda1", "0.3", "--c", "0.8", "--format", "json"
        )
        assert code == 0
        payload = json.loads(out)
        s = entanglement.PureBipartiteState(k=2, lambdas=[0.3, 0.7])
        ref = noise.nonlocal_output(s, noise.params_from_c(0.8, k=2)).matrix
        got = np.array(
            [[complex(re, im) for re, im in row] for row in payload["nonlocal"]["matrix"]]
        )
        np.testing.assert_allclose(got, ref, atol=1e-11)
        assert payload["nonlocal"]["ppt_entangled"] == payload["nonlocal"]["witness_detects"]

    def test_csv_row(self, capsys):
        code, out, _ = run_cli(
            capsys, "state", "--lambda1", "0.5", "--c", "0.9", "--format", "csv"
        )
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert len(rows) == 2
        assert rows[0][0] == "lambda1"
        assert rows[1][4] == "separable"
        assert rows[1][7] == "entangled"

    def test_domain_error(self, capsys):
        code, _, _ = run_cli(capsys, "state", "--lambda1", "1.5", "--c", "0.9")
        assert code == 2

    def test_c_out_of_range(self, capsys):
        code, _, _ = run_cli(capsys, "state", "--lambda1", "0.5", "--c", "1.5")
        assert code == 2


class TestSimulate:
    def test_summary_matches_schema(self, capsys):
        code, out, _ = run_cli(capsys, "simulate", "--rounds", "2000", "--c", "0.8")
        assert code == 0
        summary = json.loads(out)
        jsonschema.validate(summary, load_schema("summary.schema.json"))
        assert summary["n"] == 2000

    def test_transcript_matches_schema(self, capsys, tmp_path):
        path = tmp_path / "rounds.jsonl"
        code, _, _ = run_cli(
            capsys, "simulate", "--rounds", "60", "--c", "0.8", "--out", str(path)
        )
        assert code == 0
        schema = load_schema("transcript_round.schema.json")
        lines = path.read_text().splitlines()
        assert len(lines) == 60
        for line in lines:
            jsonschema.validate(json.loads(line), schema)

    def test_reruns_are_byte_identical(self, capsys):
        _, out1, _ = run_cli(capsys, "simulate", "--rounds", "3000", "--c", "0.7")
        _, out2, _ = run_cli(capsys, "simulate", "--rounds", "3000", "--c", "0.7")
        assert out1 == out2

    def test_explicit_seed_changes_output(self, capsys):
        _, out1, _ = run_cli(capsys, "simulate", "--rounds", "3000", "--c", "0.7")
        _, out2, _ = run_cli(
            capsys, "simulate", "--rounds", "3000", "--c", "0.7", "--seed", "43"
        )
        assert json.loads(out1)["success_rate"] != json.loads(out2)["success_rate"]

    def test_env_seed_default(self, capsys, monkeypatch):
        monkeypatch.setenv(cli.ENV_SEED, "77")
        _, out_env, _ = run_cli(capsys, "simulate", "--rounds", "2000", "--c", "0.7")
        monkeypatch.delenv(cli.ENV_SEED)
        _, out_explicit, _ = run_cli(
            capsys, "simulate", "--rounds", "2000", "--c", "0.7", "--seed", "77"
        )
        assert out_env == out_explicit

    def test_bad_env_seed(self, capsys, monkeypatch):
        monkeypatch.setenv(cli.ENV_SEED, "not-a-number")
        code, _, _ = run_cli(capsys, "simulate", "--rounds", "10", "--c", "0.7")
        assert code == 2

    def test_csv_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "simulate", "--rounds", "500", "--c", "0.8", "--format", "csv"
        )
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0][0] == "n"
        assert rows[1][0] == "500"

    def test_io_error_exit(self, capsys, caplog):
        code, _, _ = run_cli(
            capsys,
            "simulate",
            "--rounds",
            "10",
            "--c",
            "0.8",
            "--out",
            "/nonexistent-dir/x.jsonl",
        )
        assert code == 3
        assert "I/O" in caplog.text

    def test_rounds_domain_error(self, capsys):
        code, _, _ = run_cli(capsys, "simulate", "--rounds", "0", "--c", "0.8")
        assert code == 2

    def test_logs_do_not_pollute_stdout(self, capsys, caplog, tmp_path):
        caplog.set_level("INFO")
        path = tmp_path / "t.jsonl"
        code, out, _ = run_cli(
            capsys, "simulate", "--rounds", "50", "--c", "0.8", "--out", str(path)
        )
        assert code == 0
        json.loads(out)  # stdout is pure JSON
        assert "transcript written" in caplog.text
        assert "transcript written" not in out
