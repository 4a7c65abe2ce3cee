import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from critical_halfspace.cli.main import cli
from critical_halfspace.experiments import get_experiment, list_experiments

SMALL_SWEEP = [
    "--sigma-radius", "10", "--lambda-min", "-4", "--lambda-max", "4", "--lambda-count", "17",
]
CONFIGS = Path(__file__).resolve().parents[1] / "configs" / "experiments"


@pytest.fixture
def runner():
    return CliRunner()


def _report(tmp_path, subcommand):
    return json.loads((tmp_path / subcommand / "report.json").read_text())


class TestCommands:
    def test_verify_bubble_passes(self, runner, tmp_path):
        result = runner.invoke(cli, ["verify-bubble", "--output-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        report = _report(tmp_path, "verify-bubble")
        assert report["pass"] is True
        assert report["metrics"]["max_interior_residual"] < 1e-9
        assert report["config"]["n"] == 3
        assert (tmp_path / "verify-bubble" / "metadata.json").exists()

    def test_printed_exponent_fails(self, runner, tmp_path):
        result = runner.invoke(
            cli, ["verify-bubble", "--n", "3", "--q-exponent", "6", "--output-dir", str(tmp_path)]
        )
        assert result.exit_code == 1
        assert "proportionality_defect" in _report(tmp_path, "verify-bubble")["failures"]

    def test_harmonic_family(self, runner, tmp_path):
        result = runner.invoke(
            cli, ["verify-bubble", "--family", "harmonic", "--c", "2", "--output-dir", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output

    def test_kelvin_check(self, runner, tmp_path):
        result = runner.invoke(cli, ["kelvin-check", "--output-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert _report(tmp_path, "kelvin-check")["metrics"]["boundary_weight_is_one"] is True

    def test_kelvin_check_with_explicit_critical_exponent(self, runner, tmp_path):
        result = runner.invoke(
            cli, ["kelvin-check", "--p-exponent", "3", "--output-dir", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        assert _report(tmp_path, "kelvin-check")["metrics"]["boundary_residual_gap"] < 1e-14

    def test_moving_plane_matches_fitted_center(self, runner, tmp_path):
        result = runner.invoke(
            cli, ["moving-plane", "--y-prime", "3,0", *SMALL_SWEEP, "--output-dir", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        metrics = _report(tmp_path, "moving-plane")["metrics"]
        # image of y = (3, 0, −√3) under inversion at 0: y / (1 + 9 + 3)
        assert abs(metrics["lambda0_estimate"] - 3 / 13) < 1e-5
        assert abs(metrics["fitted_axis"] - metrics["lambda0_estimate"]) < 1e-5

    def test_detect_axis_with_config_file(self, runner, tmp_path):
        config = tmp_path / "axis.yaml"
        config.write_text("n: 3\ny_prime: [1.0, -0.5]\nsigma_radius: 10.0\n")
        result = runner.invoke(
            cli,
            ["detect-axis", "--config", str(config), "--lambda-min", "-4", "--lambda-max", "4",
             "--lambda-count", "17", "--output-dir", str(tmp_path)],
        )
        assert result.exit_code == 0, result.output

    def test_decay(self, runner, tmp_path):
        result = runner.invoke(cli, ["decay", "--output-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        metrics = _report(tmp_path, "decay")["metrics"]
        assert abs(metrics["mu_estimate"] - 3**0.25) < 1e-4

    def test_find_scale(self, runner, tmp_path):
        result = runner.invoke(cli, ["find-scale", *SMALL_SWEEP, "--output-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        metrics = _report(tmp_path, "find-scale")["metrics"]
        assert abs(metrics["s_star"] - 2.0) < 1e-8
        assert abs(metrics["gprime_numeric"]) < 1e-6

    def test_shoot_ode(self, runner, tmp_path):
        result = runner.invoke(cli, ["shoot-ode", "--c", "1", "--output-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert _report(tmp_path, "shoot-ode")["metrics"]["zero_crossing_t"] < 1.0

    def test_boundary_profile(self, runner, tmp_path):
        result = runner.invoke(cli, ["boundary-profile", "--output-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        metrics = _report(tmp_path, "boundary-profile")["metrics"]
        assert abs(metrics["boundary_scale_squared"] - 4.0) < 1e-8

    def test_convergence(self, runner, tmp_path):
        result = runner.invoke(cli, ["convergence", "--output-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        metrics = _report(tmp_path, "convergence")["metrics"]
        assert abs(metrics["observed_order"] - 2.0) <= 0.2
        assert metrics["unresolved_grids"] == []

    def test_convergence_five_dimensions(self, runner, tmp_path):
        config = CONFIGS / "convergence_n5.yaml"
        result = runner.invoke(
            cli, ["convergence", "--config", str(config), "--output-dir", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        assert _report(tmp_path, "convergence")["config"]["n"] == 5

    def test_solve_manufactured(self, runner, tmp_path):
        runner.invoke(cli, ["solve", "--cells", "128", "--output-dir", str(tmp_path)])
        metrics = _report(tmp_path, "solve")["metrics"]
        assert metrics["converged"] is True
        assert metrics["fit_lambda_error"] < 0.02


class TestRunBehaviour:
    def test_invalid_dimension_is_usage_error(self, runner, tmp_path):
        result = runner.invoke(cli, ["verify-bubble", "--n", "2", "--output-dir", str(tmp_path)])
        assert result.exit_code == 2

    def test_unknown_config_key_is_usage_error(self, runner, tmp_path):
        config = tmp_path / "bad.yaml"
        config.write_text("bogus: 1\n")
        result = runner.invoke(cli, ["decay", "--config", str(config)])
        assert result.exit_code == 2
        assert "bogus" in result.output

    def test_reports_are_deterministic(self, runner, tmp_path):
        args = ["verify-bubble", "--seed", "3", "--output-dir", str(tmp_path)]
        runner.invoke(cli, args)
        first = (tmp_path / "verify-bubble" / "report.json").read_bytes()
        runner.invoke(cli, args)
        assert (tmp_path / "verify-bubble" / "report.json").read_bytes() == first

    def test_csv_dump(self, runner, tmp_path):
        result = runner.invoke(
            cli, ["verify-bubble", "--dump-csv", "--samples", "20", "--output-dir", str(tmp_path)]
        )
        assert result.exit_code == 0, result.output
        lines = (tmp_path / "verify-bubble" / "interior_samples.csv").read_text().splitlines()
        assert lines[0] == "x1,x2,x3,value"
        assert len(lines) == 21

    def test_verbose_writes_debug_log(self, runner, tmp_path):
        result = runner.invoke(cli, ["decay", "-v", "--output-dir", str(tmp_path)])
        assert result.exit_code == 0, result.output
        assert "decay report" in (tmp_path / "decay" / "debug.log").read_text()

    def test_show_defaults(self, runner):
        result = runner.invoke(cli, ["--show-defaults"])
        assert result.exit_code == 0
        assert "sigma_radius" in result.output


def test_every_experiment_is_listed(runner):
    """The registry backs both the subcommands and list-experiments."""
    result = runner.invoke(cli, ["list-experiments"])
    assert result.exit_code == 0
    names = list_experiments()
    assert len(names) == 10
    for name in names:
        assert name in result.output
        assert get_experiment(name).description
    with pytest.raises(ValueError, match="Unknown experiment"):
        get_experiment("nope")
