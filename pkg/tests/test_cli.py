"""CLI behavior: outputs, determinism, exit codes."""

import json

import pytest

from normbridge.cli import main, parse_index
from normbridge.density import INF
from normbridge.errors import UsageError


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


@pytest.fixture
def product_weights(tmp_path):
    path = tmp_path / "w.json"
    path.write_text(json.dumps(
        {"kind": "product", "d": 2, "gammas": ["1/2", "1/8"]}))
    return str(path)


@pytest.fixture
def bad_weights(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(
        {"kind": "explicit", "d": 2, "values": {"3": "1/2", "0": 1}}))
    return str(path)


def test_parse_index():
    assert parse_index("inf") == INF
    assert parse_index("1.5") == 1.5
    assert parse_index("4/3") == pytest.approx(4.0 / 3.0)
    with pytest.raises(UsageError):
        parse_index("fast")


class TestDensityCommand:
    def test_uniform_known_scalars(self, capsys):
        code, out, _ = run(capsys, "density", "--family", "uniform",
                           "--p", "1")
        assert code == 0
        data = json.loads(out)
        assert data["m"] == 0.5
        assert data["kappa"] == 1.0
        assert data["eq2"] is True

    def test_pareto_condition_failure(self, capsys):
        code, out, _ = run(capsys, "density", "--family", "pareto",
                           "--alpha", "3", "--p", "1.5")
        assert code == 0
        assert json.loads(out)["eq2"] is False

    def test_exp_condition_failure(self, capsys):
        code, out, _ = run(capsys, "density", "--family", "exp",
                           "--a", "0.5", "--b", "1", "--p", "1")
        assert code == 0
        assert json.loads(out)["eq2"] is False

    def test_missing_parameter_is_usage_error(self, capsys):
        code, _, err = run(capsys, "density", "--family", "beta",
                           "--p", "2")
        assert code == 2
        assert "alpha" in err


class TestConstantsCommand:
    def test_exact_corner_with_verification(self, capsys, product_weights):
        code, out, _ = run(capsys, "constants", "--weights-file",
                           product_weights, "--density", "uniform",
                           "--p", "1", "--q", "1", "--verify")
        assert code == 0
        data = json.loads(out)
        assert data["mode"] == "exact"
        assert data["exact"] == "27/16"
        assert data["oracle_agrees"] is True

    def test_float_bracket_off_corner(self, capsys, product_weights):
        code, out, _ = run(capsys, "constants", "--weights-file",
                           product_weights, "--density", "uniform",
                           "--p", "2", "--q", "2", "--verify")
        assert code == 0
        data = json.loads(out)
        assert data["mode"] == "float"
        assert data["lower"] <= data["upper"]
        assert data["scan_below_upper"] is True

    def test_non_monotone_exits_3(self, capsys, bad_weights):
        code, _, err = run(capsys, "constants", "--weights-file",
                           bad_weights, "--density", "uniform",
                           "--p", "1", "--q", "1")
        assert code == 3
        assert "downward closed" in err

    def test_infeasible_density_exits_3(self, capsys, product_weights):
        code, _, _ = run(capsys, "constants", "--weights-file",
                         product_weights, "--density", "pareto",
                         "--alpha", "3", "--p", "1", "--q", "1")
        assert code == 3

    def test_deterministic_output(self, capsys, product_weights):
        argv = ("constants", "--weights-file", product_weights,
                "--density", "uniform", "--p", "2", "--q", "2")
        _, out1, _ = run(capsys, *argv)
        _, out2, _ = run(capsys, *argv)
        assert out1 == out2


class TestGrowthCommand:
    def test_csv_and_figure_outputs(self, capsys, tmp_path):
        csv_path = tmp_path / "series.csv"
        png_path = tmp_path / "series.png"
        code, out, _ = run(capsys, "growth", "--family", "finite-order",
                           "--omega", "1", "--r", "2", "--p", "1",
                           "--q", "inf", "--d-max", "512",
                           "--out", str(csv_path), "--plot", str(png_path))
        assert code == 0
        data = json.loads(out)
        assert data["classification"] == "polynomial"
        lines = csv_path.read_text().splitlines()
        assert lines[0] == "d,lower,upper,exact"
        assert len(lines) > 10
        assert png_path.stat().st_size > 0

    def test_product_uniform(self, capsys):
        code, out, _ = run(capsys, "growth", "--family", "product",
                           "--gamma-seq", "2^-j", "--p", "1", "--q", "1",
                           "--d-max", "2000")
        assert code == 0
        assert json.loads(out)["classification"] == "uniform"

    def test_capacity_exit_code(self, capsys):
        code, _, err = run(capsys, "growth", "--family", "pod",
                           "--beta1", "1", "--beta2", "2", "--c", "1",
                           "--p", "1", "--q", "inf", "--d-max", "100")
        assert code == 4
        assert "capacity" in err

    def test_missing_family_params(self, capsys):
        code, _, _ = run(capsys, "growth", "--family", "finite-order",
                         "--p", "1", "--q", "1", "--d-max", "64")
        assert code == 2


class TestWitnessCommand:
    def test_exact_case_has_zero_gap(self, capsys, product_weights):
        code, out, _ = run(capsys, "witness", "--case", "infinf",
                           "--n", "1,5", "--weights-file", product_weights,
                           "--density", "uniform")
        assert code == 0
        data = json.loads(out)
        for row in data["rows"]:
            assert row["gap"] == 0.0

    def test_level_set_case_converges(self, capsys, product_weights):
        code, out, _ = run(capsys, "witness", "--case", "11",
                           "--n", "1,10,100", "--weights-file",
                           product_weights, "--density", "uniform")
        assert code == 0
        data = json.loads(out)
        gaps = [row["gap"] for row in data["rows"]]
        assert gaps == sorted(gaps, reverse=True)
        assert gaps[-1] < 0.01 * data["target"]

    def test_unknown_case_is_usage_error(self, capsys, product_weights):
        code, _, _ = run(capsys, "witness", "--case", "22",
                         "--n", "1", "--weights-file", product_weights,
                         "--density", "uniform")
        assert code == 2

    def test_bad_n_list_is_usage_error(self, capsys, product_weights):
        code, _, _ = run(capsys, "witness", "--case", "11",
                         "--n", "one", "--weights-file", product_weights,
                         "--density", "uniform")
        assert code == 2


def test_missing_weights_file_is_usage_error(capsys):
    code, _, _ = run(capsys, "constants", "--weights-file",
                     "/nonexistent/w.json", "--density", "uniform",
                     "--p", "1", "--q", "1")
    assert code == 2
