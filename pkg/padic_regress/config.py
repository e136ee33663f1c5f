"""
Configuration utilities for the p-adic regression tools.
"""

from __future__ import annotations

import json
import logging
import os
from functools import lru_cache
from pathlib import Path
from typing import Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from padic_regress.constants import (
    DEFAULT_GUARD_DIGITS,
    DEFAULT_ORACLE_MAX_LATTICE,
    DEFAULT_SEED,
    DEFAULT_WORKING_DIGITS,
)

logger = logging.getLogger(__name__)

CONFIG_FILE_PATH = Path(__file__).resolve().parent.parent / "config" / "padic_regress.json"

# environment variable -> key in the JSON config file
ENV_KEY_MAP = {
    "PADIC_WORKING_DIGITS": "working_digits",
    "PADIC_GUARD_DIGITS": "guard_digits",
    "PADIC_LOG_LEVEL": "log_level",
    "PADIC_DEFAULT_SEED": "default_seed",
    "PADIC_ORACLE_MAX_LATTICE": "oracle_max_lattice",
}


class ConfigurationError(RuntimeError):
    """Raised when settings cannot be loaded or fail validation."""


class Settings(BaseModel):
    """Runtime configuration loaded from environment variables."""

    working_digits: int = Field(default=DEFAULT_WORKING_DIGITS, ge=1)
    guard_digits: int = Field(default=DEFAULT_GUARD_DIGITS, ge=0)
    log_level: str = "INFO"
    default_seed: int = Field(default=DEFAULT_SEED, ge=0, lt=2**64)
    oracle_max_lattice: int = Field(default=DEFAULT_ORACLE_MAX_LATTICE, ge=1)


@lru_cache
def get_settings() -> Settings:
    """
    Load settings from environment variables.

    Uses python-dotenv to support local development with `.env` files; values missing
    from the environment fall back to `config/padic_regress.json`, then to defaults.
    """
    load_dotenv()
    file_values = _load_config_file()

    values: dict[str, str] = {}
    for env_name, field_name in ENV_KEY_MAP.items():
        value = _optional_env(env_name, file_values)
        if value is not None:
            values[field_name] = value

    try:
        return Settings(**values)
    except ValidationError as exc:
        invalid = ", ".join(
            sorted(
                name
                for name, field_name in ENV_KEY_MAP.items()
                if any(field_name in error["loc"] for error in exc.errors())
            )
        )
        raise ConfigurationError(
            f"Invalid configuration values. Check the following keys: {invalid}"
        ) from exc


def _optional_env(name: str, file_values: dict[str, object] | None = None) -> Optional[str]:
    file_values = file_values or {}
    value = os.getenv(name)
    if value:
        return value
    fallback = file_values.get(ENV_KEY_MAP.get(name, name.lower()))
    return None if fallback is None else str(fallback)


def _load_config_file(path: Path | None = None) -> dict[str, object]:
    config_path = path or CONFIG_FILE_PATH
    if not config_path.exists():
        return {}

    try:
        with config_path.open("r", encoding="utf-8") as handle:
            data = json.load(handle)
    except (json.JSONDecodeError, OSError) as exc:
        raise ConfigurationError(f"Failed to read config file at {config_path}") from exc

    if not isinstance(data, dict):
        raise ConfigurationError(f"Config file at {config_path} must hold a JSON object")
    logger.debug("Loaded settings file %s", config_path)
    return data
