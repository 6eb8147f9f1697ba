"""Pydantic schemas for inter-rater agreement inputs."""

from __future__ import annotations

from typing import List

from pydantic import BaseModel, ConfigDict, Field, model_validator


class KappaProportions(BaseModel):
    model_config = ConfigDict(frozen=True)

    p_o: float = Field(..., ge=0.0, le=1.0)
    p_e: float = Field(..., ge=0.0, le=1.0)


class KappaFrequencies(BaseModel):
    model_config = ConfigDict(frozen=True)

    f_o: float = Field(..., ge=0.0)
    f_e: float = Field(..., ge=0.0)
    N: float = Field(..., gt=0.0)

    @model_validator(mode="after")
    def _bounded(self) -> "KappaFrequencies":
        if self.f_o > self.N:
            raise ValueError(f"f_o={self.f_o} exceeds N={self.N}")
        if self.f_e > self.N:
            raise ValueError(f"f_e={self.f_e} exceeds N={self.N}")
        return self


class RaterLabelMatrix(BaseModel):
    """Square contingency table: rows are rater A's categories, columns rater B's."""

    model_config = ConfigDict(frozen=True)

    counts: List[List[float]]
    categories: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _square(self) -> "RaterLabelMatrix":
        size = len(self.counts)
        if size == 0:
            raise ValueError("contingency matrix is empty")
        for row in self.counts:
            if len(row) != size:
                raise ValueError(f"contingency matrix must be {size}x{size}, got a row of {len(row)}")
            if any(value < 0 for value in row):
                raise ValueError("contingency counts must be non-negative")
        if sum(sum(row) for row in self.counts) <= 0:
            raise ValueError("contingency matrix total must be positive")
        if self.categories and len(self.categories) != size:
            raise ValueError(f"expected {size} category names, got {len(self.categories)}")
        return self


class PairwiseAgreement(BaseModel):
    """Relative closeness of two scores; each direction uses its own denominator."""

    qs2_of_qs1: float
    qs1_of_qs2: float


__all__ = ["KappaProportions", "KappaFrequencies", "RaterLabelMatrix", "PairwiseAgreement"]
