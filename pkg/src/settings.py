"""
Runtime Settings.

Provides environment-driven settings for the library and CLI:
- Worker thread count (LIMABEAN_THREADS)
- Log level and renderer selection
"""

from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class LimabeanSettings(BaseSettings):
    """Process-wide settings, read from LIMABEAN_* environment variables."""

    model_config = SettingsConfigDict(env_prefix="LIMABEAN_", extra="ignore")

    threads: int = Field(default=1, ge=1, description="Worker threads for trials and grid cells")
    log_level: str = Field(default="INFO", description="structlog level filter")
    json_logs: bool = Field(default=False, description="Render logs as JSON lines")


# Global settings instance
_settings: Optional[LimabeanSettings] = None


def get_settings() -> LimabeanSettings:
    """Get the settings instance."""
    global _settings
    if _settings is None:
        _settings = LimabeanSettings()
    return _settings


def set_settings(settings: Optional[LimabeanSettings]) -> None:
    """Set (or reset with None) the settings instance."""
    global _settings
    _settings = settings
