"""Tests for the verification suites and their runners."""

import random

import pytest

from tate_derham.errors import NotAUnit
from tate_derham.models import SuiteReport
from tate_derham.models.types import VerifySuite
from tate_derham.runners import BaseSuiteRunner, SequentialSuiteRunner, ThreadPoolSuiteRunner
from tate_derham.settings import get_runner_instance, import_string
from tate_derham.suites import VerifyContext, guarded, random_tate, random_weyl, verify_suites


def fake_suite(name: str):
    def run() -> SuiteReport:
        return SuiteReport(suite=name, passed=True, checks=[])

    return run


class TestSuites:
    """Test the verification suites"""

    @pytest.mark.parametrize("suite", [s for s in VerifySuite if s != VerifySuite.ALL])
    def test_suite_passes(self, settings, suite):
        """Test that every check of the suite passes"""
        (report,) = verify_suites(suite, settings)

        failed = [check.name for check in report.checks if not check.passed]
        assert report.suite == suite.value
        assert report.checks
        assert failed == []
        assert report.passed

    def test_context(self, settings):
        """Test that the context follows the settings"""
        ctx = VerifyContext.from_settings(settings)

        assert ctx.cases == 20
        assert ctx.precision == 8
        assert ctx.tail == 0
        assert ctx.spectral_k_max == 8
        assert ctx.weyl("d1").equals(ctx.weyl("d1", precision=4))

    def test_chi_transfer_values(self, settings):
        """Test that the Euler characteristics are checked against their values"""
        (report,) = verify_suites(VerifySuite.CHI_TRANSFER, settings)
        details = {check.name: check.detail for check in report.checks}

        assert details["small-constant"]["chiTate"] == 1
        assert details["small-linear"]["chiTate"] == 1
        assert details["small-linear"]["tate"]["h1"] == 0

    def test_windows_follow_settings(self, settings):
        """Test that the completed-route check starts from the configured window"""
        settings.window.X_DEG_START = 4

        (report,) = verify_suites(VerifySuite.INVERSION, settings)
        (check,) = [c for c in report.checks if c.name == "completed-base-change"]

        assert check.passed
        assert check.detail["direct"]["trajectory"][0][0] == 4

    def test_random_elements(self):
        """Test that random elements are nonzero"""
        rng = random.Random(0)

        for _ in range(20):
            assert not random_tate(rng, 2, 8).is_zero
            assert not random_weyl(rng, 2, 8).is_zero


class TestGuarded:
    """Test the conversion of failures into checks"""

    def test_passed(self):
        """Test that the outcome and detail are kept"""
        check = guarded("ok", "1 = 1", lambda: (True, {"value": 1}))

        assert check.passed
        assert check.detail == {"value": 1}

    def test_mathematical_failure(self):
        """Test that a raised failure fails the check"""

        def boom():
            raise NotAUnit("zero is not a unit")

        check = guarded("boom", "0 is a unit", boom)

        assert not check.passed
        assert check.detail == {"error": "zero is not a unit"}

    def test_other_errors_propagate(self):
        """Test that programming errors are not swallowed"""

        def boom():
            raise KeyError("missing")

        with pytest.raises(KeyError):
            guarded("boom", "nothing", boom)


class TestRunners:
    """Test the suite runners"""

    @pytest.mark.parametrize("runner_class", [SequentialSuiteRunner, ThreadPoolSuiteRunner])
    def test_order(self, runner_class):
        """Test that reports come back in the order of the suites"""
        names = ["norms", "inversion", "spencer", "homotopy"]
        reports = runner_class(max_workers=3).run([fake_suite(name) for name in names])

        assert [report.suite for report in reports] == names

    def test_base_runner(self):
        """Test that the base runner is abstract"""
        with pytest.raises(NotImplementedError):
            BaseSuiteRunner().run([fake_suite("norms")])

    def test_configured_runner(self, settings):
        """Test that the runner class is read from the settings"""
        settings.runner.CLASS = "tate_derham.runners.ThreadPoolSuiteRunner"
        settings.runner.MAX_WORKERS = 2
        runner = get_runner_instance(settings)

        assert isinstance(runner, ThreadPoolSuiteRunner)
        assert runner.max_workers == 2

    def test_default_runner(self, settings):
        """Test the default runner"""
        assert isinstance(get_runner_instance(settings), SequentialSuiteRunner)
        assert import_string("tate_derham.suites.guarded") is guarded

    def test_threaded_verify(self, settings):
        """Test running a suite through the thread pool"""
        settings.runner.CLASS = "tate_derham.runners.ThreadPoolSuiteRunner"

        (report,) = verify_suites(VerifySuite.INVERSION, settings)

        assert report.passed
