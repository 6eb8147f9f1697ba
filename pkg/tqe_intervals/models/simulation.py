"""Pydantic schemas for Monte Carlo coverage scenarios and results."""

from __future__ import annotations

from enum import Enum
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Philox keys are 128-bit
MAX_SEED = 2**128


class Method(str, Enum):
    ARF_NORMAL = "ARF_NORMAL"
    ARF_UNKNOWN_FORMULA = "ARF_UNKNOWN_FORMULA"
    T_INTERVAL = "T_INTERVAL"

    @property
    def is_arf(self) -> bool:
        return self is not Method.T_INTERVAL


class SimulationScenario(BaseModel):
    """One coverage experiment; invariants are checked by ``validate_scenario``."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    true_mean: float
    true_stddev: float
    n_observations: int
    confidence: float
    trials: int
    seed: int = Field(default=0, ge=0, lt=MAX_SEED)
    method: Method = Method.T_INTERVAL
    prior_mean: Optional[float] = None
    prior_mode: Literal["fixed", "randomized"] = "fixed"
    prior_spread: float = Field(default=0.0, ge=0.0)
    population: Literal["normal", "uniform"] = "normal"
    workers: int = Field(default=1, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _coerce_method(cls, data):
        if isinstance(data, dict) and isinstance(data.get("method"), str):
            data = dict(data)
            data["method"] = data["method"].upper()
        return data


class CoverageResult(BaseModel):
    empirical_coverage: float = Field(..., ge=0.0, le=1.0)
    covered_trials: int
    mean_halfwidth: float
    trials: int
    critical_value: float
    prior_mean_used: Optional[float] = None
    scenario: SimulationScenario


__all__ = ["MAX_SEED", "Method", "SimulationScenario", "CoverageResult"]
