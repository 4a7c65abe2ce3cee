import pytest
from pydantic import ValidationError

from critical_halfspace.config.loader import RunConfig, build_run_config, load_config_file


class TestBuildRunConfig:
    def test_defaults_resolve_critical_exponents(self):
        config = build_run_config("verify-bubble")
        assert config.n == 3
        assert config.q is None
        assert config.interior_q == 5.0
        assert config.boundary_p == 3.0

    def test_flags_override_file(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("n: 4\nlam: 2.0\n")
        config = build_run_config("decay", path, {"n": 5, "lam": None})
        assert config.n == 5
        assert config.lam == 2.0

    def test_file_overrides_defaults(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("sigma_radius: 10.0\nradii: [10.0, 20.0, 40.0]\n")
        config = build_run_config("moving-plane", path)
        assert config.sigma_radius == 10.0
        assert config.radii == [10.0, 20.0, 40.0]

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("n: 3\nbogus: 1\n")
        with pytest.raises(ValidationError, match="bogus"):
            build_run_config("verify-bubble", path)

    def test_subcommand_not_allowed_in_file(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("subcommand: solve\n")
        with pytest.raises(ValueError, match="command line"):
            build_run_config("verify-bubble", path)

    def test_empty_file(self, tmp_path):
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert build_run_config("decay", path).n == 3


class TestValidation:
    def test_dimension(self):
        with pytest.raises(ValidationError):
            RunConfig(subcommand="decay", n=2)

    def test_y_prime_too_long(self):
        with pytest.raises(ValidationError, match="at most n-1"):
            RunConfig(subcommand="verify-bubble", n=3, y_prime=[1.0, 2.0, 3.0])

    def test_radii_must_increase(self):
        with pytest.raises(ValidationError, match="increasing"):
            RunConfig(subcommand="decay", radii=[1e3, 1e2])

    def test_lambda_range(self):
        with pytest.raises(ValidationError, match="lambda_max"):
            RunConfig(subcommand="moving-plane", lambda_min=1.0, lambda_max=-1.0)

    def test_config_is_frozen(self):
        config = RunConfig(subcommand="decay")
        with pytest.raises(ValidationError):
            config.n = 4

    def test_padding(self):
        config = RunConfig(subcommand="detect-axis", n=5, y_prime=[1.0], kelvin_center=[0.5, 0.5])
        assert config.tangential == [1.0, 0.0, 0.0, 0.0]
        assert config.inversion_center == (0.5, 0.5, 0.0, 0.0, 0.0)


def test_nested_yaml_rejected(tmp_path):
    path = tmp_path / "nested.yaml"
    path.write_text("solver:\n  cells: 32\n")
    with pytest.raises(ValueError, match="flat"):
        load_config_file(path)
