"""Runtime settings: built-in defaults, a TOML file, then environment overrides."""

from __future__ import annotations

import os
from pathlib import Path
from typing import Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from .errors import InputFileError
from .models.evaluation import ThresholdPolicy
from .models.intervals import ScoreScale
from .utils.io import load_toml
from .utils.logging import get_logger

try:
    from dotenv import load_dotenv
except ImportError:  # pragma: no cover - optional dependency
    load_dotenv = None

LOGGER = get_logger("config")

CONFIG_ENV_VAR = "TQE_CONFIG"
HISTORY_ENV_VAR = "TQE_HISTORY_PATH"
CONFIG_TABLE = "tqe"

_dotenv_loaded = False


class Settings(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    scale_min: float = 0.0
    scale_max: float = 100.0
    confidence: float = Field(default=0.80, gt=0.0, lt=1.0)
    pass_threshold: float = 80.0
    arf_row: Literal["normal", "unknown"] = "normal"
    history_path: str = "tqe_history.jsonl"
    text_sample_min: int = Field(default=100, ge=0)
    text_sample_max: int = Field(default=10000, ge=0)
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="after")
    def _consistent(self) -> "Settings":
        if not self.scale_min < self.scale_max:
            raise ValueError("scale_min must be below scale_max")
        if not self.scale_min <= self.pass_threshold <= self.scale_max:
            raise ValueError("pass_threshold must lie within the scale")
        if self.text_sample_min > self.text_sample_max:
            raise ValueError("text_sample_min must not exceed text_sample_max")
        return self

    @property
    def scale(self) -> ScoreScale:
        return ScoreScale(min=self.scale_min, max=self.scale_max)

    @property
    def text_sample_bounds(self) -> Tuple[int, int]:
        return (self.text_sample_min, self.text_sample_max)

    def policy(self, threshold: Optional[float] = None, confidence: Optional[float] = None) -> ThresholdPolicy:
        return ThresholdPolicy(
            pass_threshold=self.pass_threshold if threshold is None else threshold,
            confidence=self.confidence if confidence is None else confidence,
            arf_row=self.arf_row,
        )


def _load_env_file() -> None:
    global _dotenv_loaded
    if _dotenv_loaded or load_dotenv is None:
        return
    load_dotenv(dotenv_path=Path(__file__).resolve().parents[1] / ".env", override=False)
    _dotenv_loaded = True


def load_settings(path: Optional[str] = None) -> Settings:
    """Resolve settings from ``path``, else ``$TQE_CONFIG``, else defaults."""

    _load_env_file()
    config_path = path or os.getenv(CONFIG_ENV_VAR)
    values = {}
    if config_path:
        data = load_toml(config_path)
        values = dict(data.get(CONFIG_TABLE, {}))
        LOGGER.debug("config_loaded path=%s keys=%s", config_path, sorted(values))
    history_override = os.getenv(HISTORY_ENV_VAR)
    if history_override:
        values["history_path"] = history_override
    try:
        return Settings(**values)
    except ValidationError as exc:
        first = exc.errors()[0]
        field = ".".join(str(part) for part in first["loc"]) or "tqe"
        raise InputFileError(f"invalid setting {field}: {first['msg']}", path=config_path) from exc


__all__ = ["Settings", "load_settings", "CONFIG_ENV_VAR", "HISTORY_ENV_VAR"]
