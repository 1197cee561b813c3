"""Tests for formalcurves.checks module."""

import pytest

from formalcurves.checks import (
    SUITES,
    CheckContext,
    CheckRunner,
    CheckState,
    Property,
    PropertyFailure,
    Suite,
    expect,
)
from formalcurves.config import CheckConfig, CorollaBounds
from formalcurves.errors import NotAUnit


def _passes(ctx: CheckContext) -> None:
    expect(True, "never shown")


def _fails(ctx: CheckContext) -> None:
    expect(False, "law broken")


def _domain_error(ctx: CheckContext) -> None:
    raise NotAUnit("0 is not a unit")


@pytest.fixture
def small_config():
    return CheckConfig(seed=3, trials=2, suite_trials={}, num_vars=1, trunc_order=2,
                       corolla=CorollaBounds(max_vertices=1, max_valence=2, max_genus=1, max_edges=2))


@pytest.fixture
def fake_suite(monkeypatch):
    """Swap the artin suite for one passing and two failing properties."""
    monkeypatch.setitem(SUITES, Suite.ARTIN, [
        Property("passes", _passes),
        Property("fails", _fails),
        Property("domain_error", _domain_error),
        Property("once", _fails, exhaustive=True),
    ])


class TestExpect:
    """Tests for expect."""

    def test_raises_with_detail(self):
        """Test a false condition raises with the detail."""
        with pytest.raises(PropertyFailure, match="law broken"):
            _fails(None)


class TestCheckRunner:
    """Tests for CheckRunner."""

    def test_initial_state(self, small_config):
        """Test the runner starts idle."""
        assert CheckRunner(small_config).state == CheckState.IDLE

    def test_state_callbacks(self, small_config, fake_suite):
        """Test run moves through running to done."""
        states = []
        runner = CheckRunner(small_config, on_state=states.append)
        runner.run(Suite.ARTIN)
        assert states == [CheckState.RUNNING, CheckState.DONE]
        assert runner.state == CheckState.DONE

    def test_results_and_failures(self, small_config, fake_suite):
        """Test failures are counted per trial and the first is described."""
        results = []
        errors = []
        runner = CheckRunner(small_config, on_result=results.append, on_error=errors.append)
        [report] = runner.run(Suite.ARTIN)

        by_name = {r.name: r for r in report.results}
        assert [r.name for r in results] == ["passes", "fails", "domain_error", "once"]
        assert by_name["passes"].passed
        assert by_name["fails"].failures == 2
        assert by_name["fails"].detail == "trial 0: PropertyFailure: law broken"
        assert by_name["domain_error"].detail == "trial 0: NotAUnit: 0 is not a unit"
        assert by_name["once"].trials == 1
        assert not report.passed
        assert len(errors) == 3

    def test_callback_errors_are_contained(self, small_config, fake_suite):
        """Test a raising callback does not stop the run."""
        def boom(_):
            raise RuntimeError("callback")

        runner = CheckRunner(small_config, on_state=boom, on_result=boom, on_error=boom)
        [report] = runner.run(Suite.ARTIN)
        assert len(report.results) == 4

    def test_report_header(self, small_config, fake_suite):
        """Test reports carry the seed and the ring."""
        [report] = CheckRunner(small_config).run(Suite.ARTIN)
        assert report.seed == 3
        assert report.ring == {"vars": 1, "order": 2}

    def test_seeded_generators_repeat(self, small_config, monkeypatch):
        """Test the same seed hands each property the same random stream."""
        draws = []

        def record(ctx: CheckContext) -> None:
            draws.append(ctx.rng.random())

        monkeypatch.setitem(SUITES, Suite.ARTIN, [Property("record", record)])
        CheckRunner(small_config).run(Suite.ARTIN)
        CheckRunner(small_config).run(Suite.ARTIN)
        assert draws[:2] == draws[2:]

    def test_all_runs_every_suite(self, small_config, monkeypatch):
        """Test Suite.ALL covers each registered suite once."""
        for suite in list(SUITES):
            monkeypatch.setitem(SUITES, suite, [Property("passes", _passes)])
        reports = CheckRunner(small_config).run(Suite.ALL)
        assert [r.suite for r in reports] == [s.value for s in SUITES]


class TestSuites:
    """Run the real suites with a handful of trials."""

    @pytest.mark.parametrize("suite", [Suite.ARTIN, Suite.WITT, Suite.ANNULI, Suite.FLD, Suite.COMM])
    def test_suite_passes(self, small_config, suite):
        """Test the laws hold on random inputs."""
        [report] = CheckRunner(small_config).run(suite)
        failed = [(r.name, r.detail) for r in report.results if not r.passed]
        assert not failed

    @pytest.mark.slow
    def test_corolla_suite(self, small_config):
        """Test the exhaustive corolla suite within small bounds."""
        [report] = CheckRunner(small_config).run(Suite.COROLLA)
        failed = [(r.name, r.detail) for r in report.results if not r.passed]
        assert not failed


class TestAcceptanceScale:
    """Run every suite with the default trial counts and bounds."""

    @pytest.mark.slow
    @pytest.mark.parametrize("suite", [Suite.ARTIN, Suite.WITT, Suite.ANNULI, Suite.FLD, Suite.COMM, Suite.COROLLA])
    def test_defaults_pass(self, suite):
        """Test the laws hold at the configured acceptance scale."""
        config = CheckConfig()
        [report] = CheckRunner(config).run(suite)
        failed = [(r.name, r.detail) for r in report.results if not r.passed]
        assert not failed
        randomized = [r for r in report.results if r.trials > 1]
        assert all(r.trials == config.trials_for(suite.value) for r in randomized)
