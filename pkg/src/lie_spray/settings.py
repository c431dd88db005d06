"""Environment-driven settings, read once per process."""

from __future__ import annotations

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

SCHEMA_VERSION = 1


class LieSpraySettings(BaseSettings):
    model_config = SettingsConfigDict(env_prefix="LIE_SPRAY_", extra="ignore")

    max_workers: int = Field(default=1, ge=1, description="Cap on threads used for batch evaluations")
    log_level: str = "WARNING"
    schema_version: int = SCHEMA_VERSION


_settings_instance: LieSpraySettings | None = None


def get_settings() -> LieSpraySettings:
    global _settings_instance  # pylint: disable=global-statement
    if _settings_instance is None:
        _settings_instance = LieSpraySettings()
    return _settings_instance


def reset_settings() -> None:
    """Forget the cached settings so the environment is read again (used by tests)."""
    global _settings_instance  # pylint: disable=global-statement
    _settings_instance = None
