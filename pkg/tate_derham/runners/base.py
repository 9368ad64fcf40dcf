"""Base verification suite runner class."""

from typing import Callable, Sequence

from tate_derham.models import SuiteReport

Suite = Callable[[], SuiteReport]


class BaseSuiteRunner:
    """Base verification suite runner class.

    Args:
        max_workers: The number of suites that may run at once.
    """

    def __init__(self, max_workers: int = 1):
        self.max_workers = max_workers

    def run(self, suites: Sequence[Suite]) -> list[SuiteReport]:
        """Run the given suites.

        Args:
            suites: The suites to run.

        Returns:
            One report per suite, in the order the suites were given.
        """
        raise NotImplementedError
