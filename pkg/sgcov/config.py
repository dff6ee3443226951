"""sgcov configuration and logging setup."""
import logging

from pydantic_settings import (
    BaseSettings,
    PydanticBaseSettingsSource,
    SettingsConfigDict,
)

# Knobs that change how a run executes but never what it computes.
EXECUTION_FIELDS = frozenset({"WORKERS", "LOG_LEVEL"})


class _ExecutionFieldsOnly(PydanticBaseSettingsSource):
    """Wraps an env/.env source and drops every result-affecting field."""

    def __init__(self, settings_cls, inner: PydanticBaseSettingsSource):
        super().__init__(settings_cls)
        self._inner = inner

    def get_field_value(self, field, field_name):
        return None, field_name, False

    def __call__(self) -> dict:
        return {k: v for k, v in self._inner().items() if k in EXECUTION_FIELDS}


class Settings(BaseSettings):
    """Library-wide defaults.

    Quadrature and simulation defaults are fixed here and can only be changed
    through explicit arguments, flags or config files. ``WORKERS`` and
    ``LOG_LEVEL`` may also come from ``SGCOV_*`` environment variables.
    """

    # Quadrature
    QUAD_EPSREL: float = 1e-8
    QUAD_EPSABS: float = 1e-12
    QUAD_LIMIT: int = 200

    # Monte Carlo
    SIM_TRIALS: int = 100_000
    SIM_DELTA: float = 1e-3
    SIM_MIN_EXPECTED_BS: int = 500
    SIM_BATCH_SIZE: int = 2_000
    SIM_MAX_EMPTY_REDRAWS: int = 10

    # Execution
    WORKERS: int = 1
    LOG_LEVEL: str = "WARNING"

    model_config = SettingsConfigDict(
        env_prefix="SGCOV_",
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls,
        init_settings,
        env_settings,
        dotenv_settings,
        file_secret_settings,
    ):
        return (
            init_settings,
            _ExecutionFieldsOnly(settings_cls, env_settings),
            _ExecutionFieldsOnly(settings_cls, dotenv_settings),
        )


settings = Settings()


def configure_logging(level: str | int | None = None) -> None:
    """Configure root logging once for command-line use."""
    level = level or settings.LOG_LEVEL
    if isinstance(level, str):
        level = level.upper()
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger().setLevel(level)
