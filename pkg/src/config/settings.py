"""Application settings using Pydantic."""

from typing import Literal

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide settings read from the environment."""

    # Logging
    log_level: str = "INFO"
    log_format: Literal["console", "json"] = "console"

    # Environment
    environment: str = "development"

    model_config = SettingsConfigDict(
        env_prefix="FGFGAN_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )
