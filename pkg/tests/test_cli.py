"""Tests for formalcurves.cli module."""

import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from formalcurves import __version__
from formalcurves.checks import SUITES, Property, Suite, expect
from formalcurves.cli import app


runner = CliRunner()


GOLDEN = json.loads((Path(__file__).parent / "fixtures" / "golden.json").read_text())


@pytest.fixture(autouse=True)
def no_ring_env(monkeypatch):
    monkeypatch.delenv("FORMALCURVES_RING", raising=False)


class TestVersionCommand:
    """Tests for version option."""

    def test_version_flag(self):
        """Test --version flag."""
        result = runner.invoke(app, ["--version"])
        assert result.exit_code == 0
        assert __version__ in result.stdout

    def test_version_short_flag(self):
        """Test -v flag."""
        result = runner.invoke(app, ["-v"])
        assert result.exit_code == 0
        assert "formalcurves version" in result.stdout


class TestRunCommand:
    """Tests for run command."""

    def test_expr(self):
        """Test --expr evaluates and prints compact JSON."""
        result = runner.invoke(app, ["run", "--ring", "m=1,N=2", "--expr", "(rpow (radd 1 e1) 2)"])
        assert result.exit_code == 0
        assert "\n" not in result.stdout.strip()
        assert json.loads(result.stdout)["text"] == "1 + 2*e1 + e1^2"

    def test_stdin(self):
        """Test - reads the program from stdin."""
        result = runner.invoke(app, ["run", "-", "--ring", "m=1,N=1"], input="(radd 1 e1)\n")
        assert result.exit_code == 0
        assert json.loads(result.stdout)["text"] == "1 + e1"

    def test_file(self, tmp_path):
        """Test programs are read from a file."""
        program = tmp_path / "prog.fc"
        program.write_text("; a comment\n(def a (radd 1 e1))\n(rmul a a)\n")
        result = runner.invoke(app, ["run", str(program), "--ring", "m=1,N=3"])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["text"] == "1 + 2*e1 + e1^2"

    def test_missing_file(self, tmp_path):
        """Test a missing program file is a usage error."""
        result = runner.invoke(app, ["run", str(tmp_path / "nope.fc"), "--ring", "m=1,N=1"])
        assert result.exit_code == 2

    def test_bad_ring_flag(self):
        """Test a malformed --ring is a usage error."""
        result = runner.invoke(app, ["run", "--ring", "m=x", "--expr", "1"])
        assert result.exit_code == 2
        assert json.loads(result.stdout)["error"]["code"] == "RingFlagError"

    def test_deeply_nested_program(self):
        """Test runaway nesting exits with a syntax error document."""
        result = runner.invoke(app, ["run", "--ring", "m=1,N=1", "--expr", "(" * 5000])
        assert result.exit_code == 2
        assert json.loads(result.stdout)["error"]["code"] == "SyntaxError"

    def test_ring_from_environment(self, monkeypatch):
        """Test FORMALCURVES_RING is used without --ring."""
        monkeypatch.setenv("FORMALCURVES_RING", "m=2,N=1")
        result = runner.invoke(app, ["run", "--expr", "(radd e1 e2)"])
        assert result.exit_code == 0
        assert json.loads(result.stdout)["ring"] == {"vars": 2, "order": 1}

    def test_pretty(self):
        """Test --pretty indents the document."""
        result = runner.invoke(app, ["run", "--ring", "m=1,N=1", "--expr", "(radd 1 e1)", "--pretty"])
        assert result.exit_code == 0
        assert result.stdout.startswith('{\n  "kind"')

    def test_pretty_from_config(self, config_file):
        """Test the output section of the config file applies."""
        result = runner.invoke(app, ["run", "--ring", "m=1,N=1", "--expr", "1", "--config", str(config_file)])
        assert result.exit_code == 0
        assert result.stdout.startswith('{\n    "kind"')


class TestGolden:
    """Golden programs with their exit codes and documents."""

    @pytest.mark.parametrize("case", GOLDEN, ids=lambda case: case["name"])
    def test_program(self, case):
        """Test exit code and the expected keys of the document."""
        result = runner.invoke(app, ["run", "--ring", case["ring"], "--expr", case["program"]])
        assert result.exit_code == case["exit"], result.stdout
        doc = json.loads(result.stdout)
        for key, value in case["expected"].items():
            assert doc[key] == value, key

    def test_output_is_deterministic(self):
        """Test two runs print byte-identical output."""
        for case in GOLDEN:
            args = ["run", "--ring", case["ring"], "--expr", case["program"]]
            assert runner.invoke(app, args).stdout == runner.invoke(app, args).stdout


class TestCheckCommand:
    """Tests for check command."""

    def test_json_report(self, config_file):
        """Test --json prints one report per suite."""
        result = runner.invoke(app, ["check", "artin", "--trials", "2", "--config", str(config_file), "--json"])
        assert result.exit_code == 0
        [report] = json.loads(result.stdout)
        assert report["suite"] == "artin"
        assert report["seed"] == 7
        assert all(r["failures"] == 0 and r["trials"] == 2 for r in report["results"])

    def test_seed_override(self, config_file):
        """Test --seed replaces the configured seed."""
        result = runner.invoke(app, ["check", "artin", "-t", "1", "-s", "11", "-c", str(config_file), "--json"])
        assert json.loads(result.stdout)[0]["seed"] == 11

    def test_trials_override_suite_counts(self, config_file):
        """Test --trials also replaces the per-suite trial counts."""
        result = runner.invoke(app, ["check", "fld", "--trials", "1", "--config", str(config_file), "--json"])
        assert result.exit_code == 0
        [report] = json.loads(result.stdout)
        assert all(r["trials"] == 1 for r in report["results"])

    def test_table(self, config_file):
        """Test the default output is a table."""
        result = runner.invoke(app, ["check", "annuli", "--trials", "1", "--config", str(config_file)])
        assert result.exit_code == 0
        assert "Property suites" in result.stdout

    def test_failure_exit_code(self, config_file, monkeypatch):
        """Test a failing property exits with 1."""
        def broken(ctx):
            expect(False, "always fails")

        monkeypatch.setitem(SUITES, Suite.ARTIN, [Property("broken", broken)])
        result = runner.invoke(app, ["check", "artin", "--trials", "1", "--config", str(config_file), "--json"])
        assert result.exit_code == 1
        assert json.loads(result.stdout)[0]["results"][0]["detail"] == "trial 0: PropertyFailure: always fails"


class TestConfigCommand:
    """Tests for config command."""

    def test_config_show(self, config_file):
        """Test showing config."""
        result = runner.invoke(app, ["config", "--show", "--path", str(config_file)])
        assert result.exit_code == 0
        assert "Ring" in result.stdout
        assert "Check trials" in result.stdout

    def test_config_init(self, tmp_path):
        """Test creating config file."""
        config_path = tmp_path / "test.json"

        result = runner.invoke(app, ["config", "--init", "--path", str(config_path)])
        assert result.exit_code == 0
        assert config_path.exists()
        assert "Created" in result.stdout
        assert json.loads(config_path.read_text())["ring"]["num_vars"] == 1


class TestHelpOutput:
    """Tests for help output."""

    def test_main_help(self):
        """Test main help."""
        result = runner.invoke(app, ["--help"])
        assert result.exit_code == 0
        assert "run" in result.stdout
        assert "check" in result.stdout

    def test_run_help(self):
        """Test run help."""
        result = runner.invoke(app, ["run", "--help"])
        assert result.exit_code == 0
        assert "--ring" in result.stdout
