"""End-to-end tests of the command-line interface and its exit-code contract."""

import json
from fractions import Fraction

import numpy as np
import pytest

from artifact.arith import parse_rational
from artifact.cli import build_parser, main
from artifact.coeffs import alpha, beta


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestCoeffCommand:
    def test_alpha_one_one(self, capsys):
        code, out, _ = run(capsys, "coeff", "--kind", "alpha", "--n", "1", "--p", "1")
        assert code == 0
        assert out.splitlines() == ["1/8", "0.125"]

    def test_alpha_five_zero(self, capsys):
        code, out, _ = run(capsys, "coeff", "--kind", "alpha", "--n", "5", "--p", "0")
        assert code == 0
        assert out.splitlines()[0] == "1/32"

    def test_beta_below_diagonal(self, capsys):
        code, out, _ = run(capsys, "coeff", "--kind", "beta", "--n", "3", "--p", "2")
        assert code == 0
        assert out.splitlines()[0] == "0"

    def test_json_format(self, capsys):
        code, out, _ = run(
            capsys, "coeff", "--n", "1", "--p", "1", "--format", "json"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc == {
            "kind": "alpha", "n": 1, "p": 1, "value": "0.125", "float": 0.125
        }

    def test_default_kind_is_alpha(self, capsys):
        code, out, _ = run(capsys, "coeff", "--n", "2", "--p", "2")
        assert code == 0
        assert out.splitlines()[0] == "5/64"


class TestTableCommand:
    def test_csv_round_trips_to_exact_rationals(self, capsys):
        code, out, _ = run(capsys, "table", "--n-max", "4", "--p-max", "6")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,p,value"
        assert len(lines) == 1 + 4 * 7
        for line in lines[1:]:
            n_s, p_s, val = line.split(",")
            assert parse_rational(val) == alpha(int(n_s), int(p_s))

    def test_beta_table(self, capsys):
        code, out, _ = run(
            capsys, "table", "--kind", "beta", "--n-max", "3", "--p-max", "5"
        )
        assert code == 0
        for line in out.strip().splitlines()[1:]:
            n_s, p_s, val = line.split(",")
            assert parse_rational(val) == beta(int(n_s), int(p_s))

    def test_out_flag_writes_file(self, capsys, tmp_path):
        path = tmp_path / "table.csv"
        code, out, _ = run(
            capsys, "table", "--n-max", "2", "--p-max", "2", "--out", str(path)
        )
        assert code == 0
        assert out == ""
        assert path.read_text().splitlines()[0] == "n,p,value"

    def test_json_format(self, capsys):
        code, out, _ = run(
            capsys, "table", "--n-max", "2", "--p-max", "1", "--format", "json"
        )
        doc = json.loads(out)
        assert doc["kind"] == "alpha"
        assert {"n": 1, "p": 1, "value": "0.125"} in doc["entries"]


class TestFigureCommand:
    def test_fig1_columns_and_threshold_marker(self, capsys):
        code, out, _ = run(capsys, "figure", "fig1", "--n", "10", "--p-max", "40")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,p,diff"
        markers = [l for l in lines if l.endswith(",K")]
        assert len(markers) == 1
        k_value = float(markers[0].split(",")[1])
        assert k_value == pytest.approx(float(Fraction(6600, 1296)), rel=1e-12)

    def test_fig1_no_marker_for_n1(self, capsys):
        code, out, _ = run(capsys, "figure", "fig1", "--n", "1", "--p-max", "10")
        assert code == 0
        assert not any(l.endswith(",K") for l in out.splitlines())

    def test_fig1_diff_values_are_exact_floats(self, capsys):
        code, out, _ = run(capsys, "figure", "fig1", "--n", "2", "--p-max", "4")
        rows = [l.split(",") for l in out.strip().splitlines()[1:] if not l.endswith(",K")]
        for n_s, p_s, diff_s in rows:
            expected = float(alpha(int(n_s), int(p_s)) - alpha(int(n_s) + 1, int(p_s)))
            assert float(diff_s) == expected

    def test_fig2_header_and_value(self, capsys):
        code, out, _ = run(capsys, "figure", "fig2", "--n", "1", "--points", "8")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,x,absdiff"
        n_s, x_s, v_s = lines[1].split(",")
        assert (n_s, float(x_s)) == ("1", 0.0)
        assert float(v_s) == pytest.approx(0.25)  # |1/2 - 1/4| at x = 0

    def test_fig3_default_grid_avoids_x_equal_one(self, capsys):
        code, out, _ = run(capsys, "figure", "fig3", "--n", "40", "--points", "64")
        assert code == 0
        xs = [float(l.split(",")[1]) for l in out.strip().splitlines()[1:]]
        assert max(xs) == pytest.approx(0.9999)

    def test_default_n_lists(self, capsys):
        code, out, _ = run(capsys, "figure", "fig1", "--p-max", "5")
        assert code == 0
        ns = {l.split(",")[0] for l in out.strip().splitlines()[1:]}
        assert ns == {"10", "20"}

    def test_determinism(self, capsys):
        _, out1, _ = run(capsys, "figure", "fig1", "--n", "10", "--p-max", "30")
        _, out2, _ = run(capsys, "figure", "fig1", "--n", "10", "--p-max", "30")
        assert out1 == out2


class TestVerifyCommand:
    def test_pass_exit_zero(self, capsys):
        code, out, _ = run(
            capsys, "verify", "oracle", "--n-max", "5", "--p-max", "10"
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        assert doc["failures"] == []
        assert doc["checks"] > 0

    def test_unknown_suite_exit_two(self, capsys):
        code, out, err = run(capsys, "verify", "bogus")
        assert code == 2
        assert "unknown suite" in err
        assert out == ""

    def test_hyphenated_suite_name(self, capsys):
        code, out, _ = run(
            capsys, "verify", "sum-bound", "--n-max", "2", "--P-tail", "400"
        )
        assert code == 0
        assert json.loads(out)["suite"] == "sum_bound"

    def test_rectangle_flags_forwarded(self, capsys):
        code, out, _ = run(
            capsys, "verify", "technical", "--N-max", "20"
        )
        assert code == 0
        assert json.loads(out)["rectangle"] == {"N_max": 20}

    def test_out_file(self, capsys, tmp_path):
        path = tmp_path / "report.json"
        code, _, _ = run(
            capsys, "verify", "alpha0", "--n-max", "6", "--out", str(path)
        )
        assert code == 0
        assert json.loads(path.read_text())["suite"] == "alpha0"


class TestOperatorCommand:
    def write(self, tmp_path, rows):
        path = tmp_path / "m.json"
        path.write_text(json.dumps({"dim": len(rows), "rows": rows}))
        return str(path)

    def test_brunel_power_identity_tight(self, capsys, tmp_path):
        path = self.write(tmp_path, [[1.0, 0.0], [0.0, 1.0]])
        code, out, _ = run(
            capsys, "operator", "brunel-power", "--matrix", path,
            "--n", "1", "--eps", "1e-10",
        )
        assert code == 0
        doc = json.loads(out)
        assert doc["tail_bound"] <= 1e-10
        assert np.allclose(doc["matrix"]["rows"], np.eye(2), atol=0)
        assert doc["norm"] == "opinf"

    def test_cesaro(self, capsys, tmp_path):
        path = self.write(tmp_path, [[-1.0, 2.0], [0.0, -1.0]])
        code, out, _ = run(capsys, "operator", "cesaro", "--matrix", path, "--N", "2")
        assert code == 0
        assert json.loads(out)["rows"] == [[0.0, 1.0], [0.0, 0.0]]

    def test_appendix_demo(self, capsys):
        code, out, _ = run(capsys, "operator", "appendix-demo", "--n", "3")
        assert code == 0
        doc = json.loads(out)
        assert doc["n"] == 3
        assert doc["max_abs_difference"] < 1e-8

    def test_random_stochastic_deterministic(self, capsys):
        code, out1, _ = run(
            capsys, "operator", "random-stochastic", "--dim", "3", "--seed", "7"
        )
        assert code == 0
        _, out2, _ = run(
            capsys, "operator", "random-stochastic", "--dim", "3", "--seed", "7"
        )
        assert out1 == out2
        rows = json.loads(out1)["rows"]
        for row in rows:
            assert sum(row) == pytest.approx(1.0, abs=1e-12)

    def test_check_power_bound(self, capsys, tmp_path):
        path = self.write(tmp_path, [[0.0, -1.0], [1.0, 0.0]])
        code, out, _ = run(
            capsys, "operator", "check-power-bound", "--matrix", path, "--n-max", "6"
        )
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_check_mean_bound_defaults_to_worked_example(self, capsys):
        code, out, _ = run(capsys, "operator", "check-mean-bound", "--n-max", "5")
        assert code == 0
        doc = json.loads(out)
        assert doc["passed"] is True
        assert doc["suite"] == "mean_bound"

    def test_check_domination(self, capsys, tmp_path):
        path = self.write(
            tmp_path, [[0.5, 0.5, 0.0], [0.2, 0.3, 0.5], [0.1, 0.1, 0.8]]
        )
        code, out, _ = run(
            capsys, "operator", "check-domination", "--matrix", path, "--N-max", "30"
        )
        assert code == 0
        assert json.loads(out)["passed"] is True

    def test_matrix_required(self, capsys):
        code, _, err = run(capsys, "operator", "brunel-power", "--n", "1")
        assert code == 2
        assert "--matrix" in err

    def test_spectral_explosion_structured_error(self, capsys, tmp_path):
        path = self.write(tmp_path, [[2.0]])
        code, out, _ = run(
            capsys, "operator", "brunel-power", "--matrix", path, "--n", "1"
        )
        assert code == 1
        doc = json.loads(out)
        assert doc["error"] == "SpectralExplosionError"
        assert "cutoff" in doc["message"]

    def test_non_convergence_structured_error(self, capsys, tmp_path):
        path = self.write(tmp_path, [[0.0, -1.0], [1.0, 0.0]])
        code, out, _ = run(
            capsys, "operator", "brunel-power", "--matrix", path,
            "--n", "1", "--eps", "1e-10",
        )
        assert code == 1
        assert json.loads(out)["error"] == "NonConvergenceError"

    def test_malformed_matrix_file(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        code, out, _ = run(
            capsys, "operator", "brunel-power", "--matrix", str(path), "--n", "1"
        )
        assert code == 1
        assert json.loads(out)["error"] == "JSONDecodeError"

    def test_missing_matrix_file(self, capsys, tmp_path):
        code, out, _ = run(
            capsys, "operator", "brunel-power",
            "--matrix", str(tmp_path / "absent.json"), "--n", "1",
        )
        assert code == 1
        assert json.loads(out)["error"] == "FileNotFoundError"

    def test_norm_flag(self, capsys, tmp_path):
        path = self.write(tmp_path, [[0.5]])
        code, out, _ = run(
            capsys, "operator", "brunel-power", "--matrix", path,
            "--n", "1", "--norm", "fro",
        )
        assert code == 0
        assert json.loads(out)["norm"] == "fro"


class TestParser:
    def test_subcommand_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_figure_id_choices(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["figure", "fig9"])

    def test_prog_name(self):
        assert build_parser().prog == "artifact"
