from importlib import import_module
from typing import Annotated

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from tate_derham.runners import BaseSuiteRunner


class PrecisionSettings(BaseSettings):
    """Settings for t-adic precision."""

    T_PRECISION: int = Field(8, ge=1, description="The relative t-adic precision given to every literal.")

    model_config = SettingsConfigDict(
        description="The configuration for t-adic precision.",
        env_prefix="TATE_DR_PRECISION_",
    )


class WindowSettings(BaseSettings):
    """Settings for the truncation windows of de Rham computations."""

    X_DEG_START: int = Field(8, ge=1, description="The first x-degree window tried when computing cohomology.")
    X_DEG_MAX: int = Field(64, ge=1, description="The x-degree window cap; exceeding it raises NoStabilization.")
    TAIL: int = Field(0, ge=0, description="The base window for the free d-tails of direct images.")
    SPECTRAL_K_MAX: int = Field(8, ge=1, description="The number of iterates used to estimate spectral radii.")

    model_config = SettingsConfigDict(
        description="The configuration for truncation windows.",
        env_prefix="TATE_DR_WINDOW_",
    )


class VerifySettings(BaseSettings):
    """Settings for the verification suites."""

    SEED: int = Field(20240917, description="The seed of the random generator used by randomized suites.")
    CASES: int = Field(200, ge=1, description="The number of random cases per randomized property.")

    model_config = SettingsConfigDict(
        description="The configuration for the verification suites.",
        env_prefix="TATE_DR_VERIFY_",
    )


class RunnerSettings(BaseSettings):
    """Settings for the suite runner."""

    CLASS: str = Field(
        "tate_derham.runners.SequentialSuiteRunner", description="The class to use for running verification suites."
    )
    MAX_WORKERS: int = Field(4, ge=1, description="The number of threads used by the thread-pool runner.")

    model_config = SettingsConfigDict(
        description="The configuration for the suite runner.",
        env_prefix="TATE_DR_RUNNER_",
    )


class LogSettings(BaseSettings):
    """Settings for logging."""

    LEVEL: str = Field("WARNING", description="The log level of the command-line interface.")

    model_config = SettingsConfigDict(
        description="The configuration for logging.",
        env_prefix="TATE_DR_LOG_",
    )


class Settings(BaseSettings):
    """Settings for the application."""

    precision: Annotated[PrecisionSettings, Field(default_factory=PrecisionSettings)]
    window: Annotated[WindowSettings, Field(default_factory=WindowSettings)]
    verify: Annotated[VerifySettings, Field(default_factory=VerifySettings)]
    runner: Annotated[RunnerSettings, Field(default_factory=RunnerSettings)]
    log: Annotated[LogSettings, Field(default_factory=LogSettings)]


def import_string(dotted_path: str):
    """Import a class or function from a dotted path string.

    Args:
        dotted_path: The dotted path to the class or function to import.
    """
    module_path, class_name = dotted_path.rsplit(".", 1)
    module = import_module(module_path)
    return getattr(module, class_name)


def get_runner_instance(settings: Settings = None) -> BaseSuiteRunner:
    """Get an instance of the configured suite runner."""
    settings = settings or app_settings
    runner_class = import_string(settings.runner.CLASS)
    return runner_class(max_workers=settings.runner.MAX_WORKERS)


app_settings = Settings()
