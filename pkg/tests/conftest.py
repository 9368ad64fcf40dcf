import pytest
from hypothesis import HealthCheck
from hypothesis import settings as hypothesis_settings
from typer.testing import CliRunner

from tate_derham.algebra.tate import TateElement
from tate_derham.algebra.weyl import WeylOperator
from tate_derham.parser import parse_tate, parse_weyl
from tate_derham.service import DRService
from tate_derham.settings import Settings

hypothesis_settings.register_profile(
    "tate-derham",
    derandomize=True,
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
hypothesis_settings.load_profile("tate-derham")

PRECISION = 8


@pytest.fixture
def weyl():
    """Fixture parsing operator expressions at the default precision."""

    def parse(src: str, var_count: int = 1, precision: int = PRECISION) -> WeylOperator:
        return parse_weyl(src, var_count, precision)

    return parse


@pytest.fixture
def tate():
    """Fixture parsing Tate-algebra elements at the default precision."""

    def parse(src: str, var_count: int = 1, precision: int = PRECISION) -> TateElement:
        return parse_tate(src, var_count, precision)

    return parse


@pytest.fixture
def settings() -> Settings:
    """Fixture to get fresh settings with a small number of random cases."""
    test_settings = Settings()
    test_settings.verify.CASES = 20
    return test_settings


@pytest.fixture
def service(settings) -> DRService:
    return DRService(settings)


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner()
