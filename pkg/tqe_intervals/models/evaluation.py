"""Pydantic schemas for measurements, verdicts and evaluation reports."""

from __future__ import annotations

from datetime import datetime, timezone
from enum import Enum
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .agreement import PairwiseAgreement
from .intervals import ConfidenceInterval


def _utcnow() -> datetime:
    return datetime.now(timezone.utc)


class QualityMeasurement(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    project_id: str = Field(..., min_length=1)
    rater_id: str = Field(..., min_length=1)
    score: float
    sample_size_of_evaluated_text: Optional[int] = Field(default=None, ge=0)
    timestamp: datetime = Field(default_factory=_utcnow)

    @field_validator("timestamp")
    @classmethod
    def _as_utc(cls, value: datetime) -> datetime:
        if value.tzinfo is None:
            return value.replace(tzinfo=timezone.utc)
        return value.astimezone(timezone.utc)


class ThresholdPolicy(BaseModel):
    model_config = ConfigDict(frozen=True)

    pass_threshold: float
    confidence: float = Field(default=0.80, gt=0.0, lt=1.0)
    arf_row: Literal["normal", "unknown"] = "normal"


class VerdictKind(str, Enum):
    FAIL = "FAIL"
    BORDERLINE_FAIL = "BORDERLINE_FAIL"
    BORDERLINE_PASS = "BORDERLINE_PASS"
    PASS = "PASS"

    @property
    def rank(self) -> int:
        return _VERDICT_ORDER.index(self)

    @property
    def gates(self) -> bool:
        """Whether a scripted pipeline should stop on this verdict."""

        return self in (VerdictKind.FAIL, VerdictKind.BORDERLINE_FAIL)


_VERDICT_ORDER = [
    VerdictKind.FAIL,
    VerdictKind.BORDERLINE_FAIL,
    VerdictKind.BORDERLINE_PASS,
    VerdictKind.PASS,
]


class Verdict(BaseModel):
    kind: VerdictKind
    interval: ConfidenceInterval
    mean: float
    threshold: float
    rationale: str


class SuspectFlag(str, Enum):
    OUTLIER = "OUTLIER"
    SMALL_TEXT_SAMPLE = "SMALL_TEXT_SAMPLE"
    LARGE_TEXT_SAMPLE = "LARGE_TEXT_SAMPLE"


class FlaggedMeasurement(BaseModel):
    measurement: QualityMeasurement
    flag: SuspectFlag
    detail: str = ""


class CriticalConstant(BaseModel):
    name: Literal["k", "t"]
    value: float
    df: Optional[int] = None
    tail_probability: Optional[float] = None
    arf_row: Optional[Literal["normal", "unknown"]] = None


class ReportInputs(BaseModel):
    scores: List[float]
    prior_mean: Optional[float] = None
    confidence: float
    threshold: Optional[float] = None
    scale_min: float
    scale_max: float
    project_id: Optional[str] = None


class Provenance(BaseModel):
    sources: List[str] = Field(default_factory=list)
    generated_at: str = Field(default_factory=lambda: _utcnow().isoformat())


class EvaluationReport(BaseModel):
    method: Literal["ARF", "T"]
    inputs: ReportInputs
    mean: float
    stddev: Optional[float] = None
    critical: CriticalConstant
    margin: float
    relative_margin: Optional[float] = None
    interval: ConfidenceInterval
    estimate: Optional[float] = None
    agreement: Optional[PairwiseAgreement] = None
    verdict: Optional[Verdict] = None
    warnings: List[str] = Field(default_factory=list)
    provenance: Provenance = Field(default_factory=Provenance)


__all__ = [
    "QualityMeasurement",
    "ThresholdPolicy",
    "VerdictKind",
    "Verdict",
    "SuspectFlag",
    "FlaggedMeasurement",
    "CriticalConstant",
    "ReportInputs",
    "Provenance",
    "EvaluationReport",
]
