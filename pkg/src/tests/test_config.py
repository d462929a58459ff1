"""
Tests for scenario files and runtime settings.
"""

from pathlib import Path

import pytest

from models.errors import ConfigurationError
from models.schemas import Scheme
from utils.config import create_default_config, load_scenario, load_settings, validate_config

VALID = """\
[scenario]
name = "se-ee"
seed = 3

[modem]
scheme = "HYBRID-ACO"
alpha = [0, 8]

[[baseline]]
scheme = "ACO-IM"
m1 = 256
kappa = 8
"""


class TestValidateConfig:
    """Test cases for scenario file diagnostics."""

    def write(self, tmp_path, text):
        path = tmp_path / "scenario.toml"
        path.write_text(text, encoding="utf-8")
        return path

    def test_valid_file(self, tmp_path):
        """A well-formed file has no problems."""
        assert validate_config(self.write(tmp_path, VALID)) == []

    def test_kappa_above_omega(self, tmp_path):
        """kappa > omega is reported on the kappa line."""
        path = self.write(tmp_path, '[scenario]\nname = "se-ee"\n\n[modem]\nscheme = "HYBRID-ACO"\nkappa = 9\n')
        problems = validate_config(path)
        assert len(problems) == 1
        assert problems[0].startswith(f"{path}:6: modem.kappa: ")
        assert "kappa must lie in [1, 8]" in problems[0]

    def test_alpha_above_half_n(self, tmp_path):
        """alpha > N/2 is reported on the alpha line."""
        path = self.write(tmp_path, '[scenario]\nname = "se-ee"\n\n[modem]\nalpha = [0, 32]\n')
        problems = validate_config(path)
        assert len(problems) == 1
        assert problems[0].startswith(f"{path}:5: modem.alpha: ")

    def test_n_not_power_of_two(self, tmp_path):
        """N must be a power of two."""
        path = self.write(tmp_path, '[scenario]\nname = "se-sweep"\n\n[modem]\nn = 30\n')
        problems = validate_config(path)
        assert problems == [f"{path}:5: modem.n: N must be a power of two >= 8, got 30"]

    def test_unknown_key(self, tmp_path):
        """Unknown keys are rejected where they appear."""
        path = self.write(tmp_path, '[scenario]\nname = "se-sweep"\n\n[modem]\nn = 32\nfoo = 1\n')
        problems = validate_config(path)
        assert len(problems) == 1
        assert problems[0].startswith(f"{path}:6: modem.foo: ")

    def test_toml_syntax_error(self, tmp_path):
        """Parse errors carry their line number."""
        path = self.write(tmp_path, '[scenario]\nname =\n')
        problems = validate_config(path)
        assert len(problems) == 1
        assert problems[0].startswith(f"{path}:2: toml: ")

    def test_baseline_error(self, tmp_path):
        """Baseline problems name their table index."""
        text = '[scenario]\nname = "se-ee"\n\n[[baseline]]\nscheme = "ACO-IM"\nkappa = 9\n'
        problems = validate_config(self.write(tmp_path, text))
        assert len(problems) == 1
        assert ":6: baseline[0].kappa: " in problems[0]

    def test_unknown_scenario(self, tmp_path):
        """The scenario name must be one of the four runs."""
        problems = validate_config(self.write(tmp_path, '[scenario]\nname = "sweep-all"\n'))
        assert len(problems) == 1
        assert ":2: scenario.name: " in problems[0]


class TestLoadScenario:
    """Test cases for loading scenario files."""

    def test_shipped_configs(self):
        """Every scenario file in configs/ is valid."""
        shipped = sorted((Path(__file__).parents[2] / "configs").glob("*.toml"))
        assert len(shipped) == 5
        for path in shipped:
            assert validate_config(path) == [], path

    def test_load_valid(self, tmp_path):
        """A valid file expands into its configurations."""
        path = tmp_path / "scenario.toml"
        path.write_text(VALID, encoding="utf-8")
        config = load_scenario(path)
        assert config.scenario.seed == 3
        assert [c.alpha for c in config.modem_configs()] == [0, 8]
        assert config.baseline_configs()[0].scheme is Scheme.ACO_IM
        assert len(config.all_configs()) == 3

    def test_load_invalid(self, tmp_path):
        """Invalid files raise ConfigurationError listing the problems."""
        path = tmp_path / "scenario.toml"
        path.write_text('[scenario]\nname = "se-ee"\n\n[modem]\nkappa = 9\n', encoding="utf-8")
        with pytest.raises(ConfigurationError, match="modem.kappa"):
            load_scenario(path)

    def test_default_config_is_valid(self, tmp_path):
        """The generated default file passes validation."""
        path = tmp_path / "configs" / "default.toml"
        assert create_default_config(str(path))
        assert validate_config(path) == []
        assert load_scenario(path).scenario.name == "se-ee"


class TestLoadSettings:
    """Test cases for environment settings."""

    def test_defaults(self, monkeypatch, tmp_path):
        """Unset variables fall back to defaults."""
        for name in ("OWSIM_JOBS", "OWSIM_MAX_BITS", "OWSIM_MIN_ERRORS", "OWSIM_OUTPUT_DIR"):
            monkeypatch.delenv(name, raising=False)
        env_file = tmp_path / ".env"
        env_file.write_text("", encoding="utf-8")
        settings = load_settings(str(env_file))
        assert settings["jobs"] == 1
        assert settings["min_errors"] == 200
        assert settings["max_bits"] == 10_000_000
        assert settings["output_dir"] == "results"

    def test_environment_and_env_file(self, monkeypatch, tmp_path):
        """Variables come from the environment and the .env file."""
        monkeypatch.setenv("OWSIM_JOBS", "4")
        monkeypatch.setenv("OWSIM_OUTPUT_DIR", "placeholder")
        monkeypatch.delenv("OWSIM_OUTPUT_DIR")
        env_file = tmp_path / ".env"
        env_file.write_text("OWSIM_OUTPUT_DIR=from-dotenv\n", encoding="utf-8")
        settings = load_settings(str(env_file))
        assert settings["jobs"] == 4
        assert settings["output_dir"] == "from-dotenv"
