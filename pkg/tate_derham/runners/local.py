"""Suite runners executing in the current process."""

import logging
from concurrent.futures import ThreadPoolExecutor

from tate_derham.runners.base import BaseSuiteRunner

logger = logging.getLogger(__name__)


class SequentialSuiteRunner(BaseSuiteRunner):
    """Run suites one after another."""

    def run(self, suites):
        reports = []
        for suite in suites:
            report = suite()
            logger.info("suite %s: %s", report.suite, "passed" if report.passed else "failed")
            reports.append(report)
        return reports


class ThreadPoolSuiteRunner(BaseSuiteRunner):
    """Run suites on a thread pool of ``max_workers`` threads."""

    def run(self, suites):
        with ThreadPoolExecutor(max_workers=self.max_workers) as pool:
            futures = [pool.submit(suite) for suite in suites]
            reports = [future.result() for future in futures]
        for report in reports:
            logger.info("suite %s: %s", report.suite, "passed" if report.passed else "failed")
        return reports
