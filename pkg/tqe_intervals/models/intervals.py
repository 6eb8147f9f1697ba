"""Pydantic schemas for scores, scales and confidence intervals."""

from __future__ import annotations

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import DomainError


class ScoreScale(BaseModel):
    model_config = ConfigDict(frozen=True)

    min: float = 0.0
    max: float = 100.0

    @model_validator(mode="after")
    def _ordered(self) -> "ScoreScale":
        if not self.min < self.max:
            raise ValueError(f"scale min must be below max, got [{self.min}, {self.max}]")
        return self

    def clamp(self, value: float) -> float:
        return max(self.min, min(self.max, value))

    def contains(self, value: float) -> bool:
        return self.min <= value <= self.max

    def require(self, value: float, field: str = "score") -> float:
        if not self.contains(value):
            raise DomainError(f"{field}={value} outside scale [{self.min}, {self.max}]")
        return value


class SingleObservation(BaseModel):
    """One new measurement ``y`` against a prior mean fixed before it was taken."""

    model_config = ConfigDict(frozen=True)

    y: float
    prior_mean: float
    scale: ScoreScale = Field(default_factory=ScoreScale)

    @model_validator(mode="after")
    def _within_scale(self) -> "SingleObservation":
        self.scale.require(self.y, "y")
        self.scale.require(self.prior_mean, "prior_mean")
        return self


class ScoreSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    scores: List[float] = Field(..., min_length=1)
    scale: ScoreScale = Field(default_factory=ScoreScale)

    @model_validator(mode="after")
    def _within_scale(self) -> "ScoreSample":
        for idx, score in enumerate(self.scores):
            self.scale.require(score, f"scores[{idx}]")
        return self

    @property
    def n(self) -> int:
        return len(self.scores)


class ConfidenceInterval(BaseModel):
    center: float
    half_width: float = Field(..., ge=0.0)
    lower: float
    upper: float
    confidence: Optional[float] = Field(default=None, gt=0.0, lt=1.0)
    clamped_lower: bool = False
    clamped_upper: bool = False
    warnings: List[str] = Field(default_factory=list)

    @classmethod
    def build(
        cls,
        center: float,
        half_width: float,
        confidence: Optional[float],
        scale: ScoreScale,
        warnings: Optional[List[str]] = None,
    ) -> "ConfidenceInterval":
        raw_lower = center - half_width
        raw_upper = center + half_width
        lower = max(scale.min, raw_lower)
        upper = min(scale.max, raw_upper)
        return cls(
            center=center,
            half_width=half_width,
            lower=lower,
            upper=upper,
            confidence=confidence,
            clamped_lower=lower != raw_lower,
            clamped_upper=upper != raw_upper,
            warnings=list(warnings or []),
        )

    @property
    def raw_lower(self) -> float:
        return self.center - self.half_width

    @property
    def raw_upper(self) -> float:
        return self.center + self.half_width

    def contains(self, value: float) -> bool:
        """Pre-clamp containment; clamping is presentation only."""

        return self.raw_lower <= value <= self.raw_upper


class ArfKAlphaRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0.0, le=0.5)
    k_normal: Optional[float] = None
    k_unknown: float


__all__ = ["ScoreScale", "SingleObservation", "ScoreSample", "ConfidenceInterval", "ArfKAlphaRow"]
