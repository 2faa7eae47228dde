"""Tests for experiment configuration loading and layering."""

import json

import pytest

from app.problems.exceptions import UnknownProblemError
from app.shared import (
    DEFAULT_SETTINGS,
    SEED_ENV_VAR,
    ConfigError,
    ExperimentConfig,
    load_settings,
    resolve_config,
)


class TestLoadSettings:
    """Test suite for load_settings."""

    def test_toml_sections_are_flattened(self, tmp_path):
        path = tmp_path / "exp.toml"
        path.write_text(
            'problem = "poisson_two_peaks"\n'
            "[partition]\nnx = 2\nny = 4\n"
            "[adapt]\nK = 2\nc2 = 10.0\n",
            encoding="utf-8",
        )
        settings = load_settings(str(path))
        assert settings == {"problem": "poisson_two_peaks", "nx": 2, "ny": 4, "K": 2, "c2": 10.0}

    def test_duplicate_keys_across_sections(self, tmp_path):
        path = tmp_path / "dup.toml"
        path.write_text("[a]\nnx = 2\n[b]\nnx = 3\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_settings(str(path))

    def test_json(self, tmp_path):
        path = tmp_path / "exp.json"
        path.write_text(json.dumps({"problem": "burgers", "solver": {"K": 1}}), encoding="utf-8")
        assert load_settings(str(path)) == {"problem": "burgers", "K": 1}

    def test_unknown_extension(self, tmp_path):
        path = tmp_path / "exp.yaml"
        path.write_text("K: 1\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_settings(str(path))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_settings(str(tmp_path / "absent.toml"))

    def test_malformed_toml(self, tmp_path):
        path = tmp_path / "bad.toml"
        path.write_text("nx = = 2\n", encoding="utf-8")
        with pytest.raises(ConfigError) as excinfo:
            load_settings(str(path))
        assert excinfo.value.__cause__ is not None

    def test_top_level_must_be_a_table(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_settings(str(path))


class TestResolveConfig:
    """Test suite for resolve_config."""

    def test_defaults(self):
        config = resolve_config(environ={})
        assert config.problem == DEFAULT_SETTINGS["problem"]
        assert (config.nx, config.ny, config.J_n, config.qx, config.qy) == (3, 3, 1500, 79, 79)
        assert config.K == 4
        assert config.c1 == 0.01
        assert config.c2 == 50.0
        assert config.gamma_grid[0] == 0.2 and config.gamma_grid[-1] == 8.0
        assert len(config.gamma_grid) == 40

    def test_interior_budget_defaults_to_grid_interior(self):
        config = resolve_config(overrides={"qx": 10, "qy": 6, "m": 10_000}, environ={})
        assert config.I_n == 8 * 4

    def test_layering_order(self):
        """Test defaults < problem defaults < file < environment seed < overrides."""
        raw = {"problem": "poisson_line_sharp", "ny": 2, "seed": 5}
        config = resolve_config(raw, environ={SEED_ENV_VAR: "17"})
        assert config.nx == 9
        assert config.ny == 2
        assert config.seed == 17
        overridden = resolve_config(raw, overrides={"seed": 3, "ny": None}, environ={SEED_ENV_VAR: "17"})
        assert overridden.seed == 3
        assert overridden.ny == 2

    def test_problem_override_wins_over_file(self):
        config = resolve_config({"problem": "poisson_line"}, overrides={"problem": "burgers"}, environ={})
        assert config.problem == "burgers"
        assert config.m == 90_000

    def test_bad_seed_environment(self):
        with pytest.raises(ConfigError):
            resolve_config(environ={SEED_ENV_VAR: "abc"})

    def test_unknown_problem(self):
        with pytest.raises(UnknownProblemError):
            resolve_config({"problem": "wave"}, environ={})

    def test_unknown_key_is_rejected(self):
        with pytest.raises(ConfigError) as excinfo:
            resolve_config({"typo_key": 1}, environ={})
        assert excinfo.value.details["errors"]

    @pytest.mark.parametrize("raw", [{"nx": 0}, {"qx": 1}, {"tau": 1.5}, {"gamma_grid": [1.0, -2.0]},
                                     {"picard_relaxation": 0.0}, {"K": -1}])
    def test_invalid_values(self, raw):
        with pytest.raises(ConfigError):
            resolve_config(raw, environ={})

    def test_monitor_budget(self):
        """Test that m must cover the feature and interior budgets when adapting."""
        with pytest.raises(ConfigError):
            resolve_config({"nx": 1, "ny": 1, "J_n": 10, "qx": 5, "qy": 5, "m": 18}, environ={})
        config = resolve_config({"nx": 1, "ny": 1, "J_n": 10, "qx": 5, "qy": 5, "m": 19}, environ={})
        assert config.m == 19
        no_adapt = resolve_config({"nx": 1, "ny": 1, "J_n": 10, "qx": 5, "qy": 5, "m": 1, "K": 0}, environ={})
        assert no_adapt.K == 0

    def test_round_trip_through_dict(self):
        config = resolve_config(environ={})
        assert ExperimentConfig(**config.to_dict()) == config
