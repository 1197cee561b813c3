"""Tests for formalcurves.config module."""

import json

import pytest

from formalcurves.artin import ArtinSpec
from formalcurves.config import (
    RING_ENV_VAR,
    CheckConfig,
    Config,
    CorollaBounds,
    OutputConfig,
    RingConfig,
    create_default_config,
    find_config_file,
    load_config,
    parse_ring,
    resolve_ring,
    save_config,
)
from formalcurves.errors import RingFlagError


class TestRingConfig:
    """Tests for RingConfig."""

    def test_defaults(self):
        """Test the default ring is Q[e1]/(e1^4)."""
        config = RingConfig()
        assert config.num_vars == 1
        assert config.trunc_order == 3
        assert config.to_spec() == ArtinSpec(1, 3)

    def test_rejects_zero_order(self):
        """Test truncation order must be positive."""
        with pytest.raises(ValueError):
            RingConfig(trunc_order=0)


class TestCheckConfig:
    """Tests for CheckConfig."""

    def test_defaults(self):
        """Test default suite settings."""
        config = CheckConfig()
        assert config.seed == 0
        assert config.trials == 1000
        assert config.trials_for("witt") == 1000
        assert config.trials_for("annuli") == 500
        assert config.trials_for("fld") == 500
        assert config.spec() == ArtinSpec(2, 3)
        assert config.mutation_threshold == 0.95
        assert config.corolla == CorollaBounds()
        assert (config.corolla.max_vertices, config.corolla.max_genus, config.corolla.max_edges) == (3, 2, 4)

    def test_suite_trials_override(self):
        """Test per-suite counts fall back to trials."""
        config = CheckConfig(trials=7, suite_trials={"fld": 3})
        assert config.trials_for("fld") == 3
        assert config.trials_for("comm") == 7

    def test_threshold_range(self):
        """Test the mutation threshold is a rate."""
        with pytest.raises(ValueError):
            CheckConfig(mutation_threshold=1.5)


class TestConfig:
    """Tests for main Config."""

    def test_defaults(self):
        """Test default config has all sections."""
        config = Config()
        assert isinstance(config.ring, RingConfig)
        assert isinstance(config.checks, CheckConfig)
        assert isinstance(config.output, OutputConfig)
        assert config.output.pretty is False
        assert config.log_level == "WARNING"

    def test_json_roundtrip(self, sample_config_data):
        """Test config can be serialized and deserialized."""
        config = Config.model_validate(sample_config_data)

        loaded = Config.model_validate(json.loads(json.dumps(config.model_dump())))

        assert loaded == config
        assert loaded.checks.corolla.max_vertices == 1
        assert loaded.output.indent == 4


class TestParseRing:
    """Tests for the --ring flag syntax."""

    def test_parses(self):
        """Test m and N are read."""
        assert parse_ring("m=2,N=5") == ArtinSpec(2, 5)

    def test_allows_spaces(self):
        """Test whitespace around the parts is accepted."""
        assert parse_ring(" m = 1 , N = 3 ") == ArtinSpec(1, 3)

    @pytest.mark.parametrize("text", ["", "m=1", "N=3,m=1", "m=a,N=2", "m=1;N=2"])
    def test_malformed(self, text):
        """Test malformed flags raise RingFlagError."""
        with pytest.raises(RingFlagError):
            parse_ring(text)

    def test_zero_order(self):
        """Test N=0 is rejected."""
        with pytest.raises(RingFlagError):
            parse_ring("m=1,N=0")


class TestResolveRing:
    """Tests for ring resolution order."""

    def test_flag_wins(self, monkeypatch):
        """Test an explicit flag beats the environment."""
        monkeypatch.setenv(RING_ENV_VAR, "m=3,N=3")
        assert resolve_ring("m=1,N=2") == ArtinSpec(1, 2)

    def test_environment(self, monkeypatch):
        """Test the environment variable is used without a flag."""
        monkeypatch.setenv(RING_ENV_VAR, "m=3,N=1")
        assert resolve_ring(None) == ArtinSpec(3, 1)

    def test_config_fallback(self, monkeypatch, sample_config_data):
        """Test the config's ring is the last resort."""
        monkeypatch.delenv(RING_ENV_VAR, raising=False)
        config = Config.model_validate(sample_config_data)
        assert resolve_ring(None, config) == ArtinSpec(2, 4)


class TestLoadConfig:
    """Tests for load_config function."""

    def test_returns_defaults_when_no_file(self, tmp_path):
        """Test returns defaults when no config file exists."""
        config = load_config(str(tmp_path / "nonexistent.json"))
        assert isinstance(config, Config)

    def test_loads_from_file(self, config_file):
        """Test loads config from file."""
        config = load_config(str(config_file))
        assert config.ring.num_vars == 2
        assert config.checks.seed == 7
        assert config.output.pretty is True

    def test_handles_invalid_json(self, tmp_path):
        """Test handles invalid JSON gracefully."""
        bad = tmp_path / "bad.json"
        bad.write_text("not valid json {")

        config = load_config(str(bad))
        assert config == Config()

    def test_handles_invalid_values(self, tmp_path):
        """Test out-of-range values fall back to defaults."""
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"ring": {"trunc_order": -1}}))

        assert load_config(str(bad)) == Config()


class TestSaveConfig:
    """Tests for save_config function."""

    def test_saves_to_file(self, tmp_path):
        """Test saves config to file."""
        config = Config(checks=CheckConfig(seed=42))
        path = save_config(config, str(tmp_path / "out.json"))

        with open(path) as f:
            data = json.load(f)
        assert data["checks"]["seed"] == 42

    def test_creates_parent_directories(self, tmp_path):
        """Test creates parent directories."""
        path = tmp_path / "subdir" / "deep" / "config.json"
        save_config(create_default_config(), str(path))
        assert path.exists()


class TestFindConfigFile:
    """Tests for find_config_file function."""

    def test_finds_explicit_path(self, tmp_path):
        """Test finds explicit path when it exists."""
        config_file = tmp_path / "my_config.json"
        config_file.write_text("{}")

        assert find_config_file(str(config_file)) == config_file

    def test_returns_none_for_nonexistent(self, tmp_path, monkeypatch):
        """Test returns None when nothing exists."""
        monkeypatch.chdir(tmp_path)
        assert find_config_file(str(tmp_path / "nonexistent.json")) is None
