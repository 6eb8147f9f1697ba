"""Confidence intervals from a single observation (ARF) and from small samples (t)."""

from __future__ import annotations

import math
from typing import Dict, List, Literal, Optional

import numpy as np

from ..errors import DomainError, InsufficientDataError, UnsupportedAlphaError
from ..models.intervals import ArfKAlphaRow, ConfidenceInterval, ScoreSample, SingleObservation
from ..utils.logging import get_logger
from .tdist import TCriticalQuery, t_quantile

LOGGER = get_logger("services.intervals")

ArfRow = Literal["normal", "unknown"]

SMALL_SAMPLE_MAX = 30
_ALPHA_TOL = 1e-9

# Normal-distribution row of the published (k, alpha) table. There is no generating
# formula for this row, so lookups are exact and never interpolated.
ARF_NORMAL_TABLE: Dict[float, float] = {
    0.5: 0.05,
    1 / 3: 1.26,
    0.25: 1.8,
    0.2: 2.31,
    0.1: 4.79,
    0.05: 9.66,
    0.01: 48.39,
}

DATA_SUSPECT_ALPHAS = (0.5,)

LARGE_SAMPLE_WARNING = "large-sample: n > 30, consider the normal approximation"


# ---------------------------------------------------------------------------
# Single observation (ARF)
# ---------------------------------------------------------------------------


def standardize(y: float, mu: float, sigma: float) -> float:
    if not sigma > 0:
        raise DomainError(f"sigma must be positive, got {sigma}")
    return (y - mu) / sigma


def _check_alpha(alpha: float) -> float:
    if not 0.0 < alpha <= 0.5:
        raise DomainError(f"alpha must lie in (0, 0.5], got {alpha}")
    return float(alpha)


def arf_k_unknown(alpha: float) -> float:
    """k for an unknown distribution: k = (1 - a + sqrt(1 - 2a)) / (2a)."""

    alpha = _check_alpha(alpha)
    return (1.0 - alpha + math.sqrt(max(0.0, 1.0 - 2.0 * alpha))) / (2.0 * alpha)


def arf_alpha_unknown(k: float) -> float:
    """Inverse of ``arf_k_unknown``: alpha = 4k / (2k + 1)^2, valid for k >= 0.5."""

    if k < 0.5:
        raise DomainError(f"k below 0.5 carries no distribution-free level, got {k}")
    return 4.0 * k / (2.0 * k + 1.0) ** 2


def _table_alpha(alpha: float) -> Optional[float]:
    for key in ARF_NORMAL_TABLE:
        if abs(key - alpha) <= _ALPHA_TOL:
            return key
    return None


def arf_k_normal(alpha: float) -> float:
    key = _table_alpha(alpha)
    if key is None:
        supported = ", ".join(f"{a:.4g}" for a in ARF_NORMAL_TABLE)
        raise UnsupportedAlphaError(f"alpha={alpha} has no normal-row k; supported: {supported}")
    if key in DATA_SUSPECT_ALPHAS:
        LOGGER.warning("arf_table_data_suspect alpha=%s k=%s", key, ARF_NORMAL_TABLE[key])
    return ARF_NORMAL_TABLE[key]


def arf_k(alpha: float, row: ArfRow = "normal") -> float:
    if row == "normal":
        return arf_k_normal(alpha)
    if row == "unknown":
        return arf_k_unknown(alpha)
    raise DomainError(f"row must be 'normal' or 'unknown', got {row!r}")


def arf_table_warnings(alpha: float, row: ArfRow) -> List[str]:
    key = _table_alpha(alpha)
    if row == "normal" and key in DATA_SUSPECT_ALPHAS:
        return [
            f"data-suspect: normal-row k={ARF_NORMAL_TABLE[key]} at alpha={key} is below "
            f"the unknown-row value {arf_k_unknown(key):.2f}"
        ]
    return []


def arf_table() -> List[ArfKAlphaRow]:
    return [
        ArfKAlphaRow(alpha=alpha, k_normal=k_normal, k_unknown=arf_k_unknown(alpha))
        for alpha, k_normal in ARF_NORMAL_TABLE.items()
    ]


def arf_alpha_normal(k: float) -> Optional[float]:
    """Alpha whose normal-row k equals ``k``, or None when the row has no such entry."""

    for alpha, k_normal in ARF_NORMAL_TABLE.items():
        if abs(k_normal - k) <= _ALPHA_TOL:
            return alpha
    return None


def arf_alpha_for_k(k: float, row: ArfRow = "normal") -> Optional[float]:
    if row == "normal":
        return arf_alpha_normal(k)
    if row == "unknown":
        return arf_alpha_unknown(k) if k >= 0.5 else None
    raise DomainError(f"row must be 'normal' or 'unknown', got {row!r}")


def arf_interval(
    obs: SingleObservation,
    k: float,
    alpha: Optional[float] = None,
    row: ArfRow = "normal",
) -> ConfidenceInterval:
    """ARF interval (y + prior)/2 +/- k|y - prior|, clamped to the observation's scale.

    The confidence is ``1 - alpha``. Without an explicit alpha it is looked up
    from ``k`` in the chosen row; a k the row does not carry leaves the
    confidence unset and adds a warning. The bounds never depend on the lookup.
    """

    if not k >= 0:
        raise DomainError(f"k must be non-negative, got {k}")
    if alpha is None:
        alpha = arf_alpha_for_k(k, row)
    else:
        alpha = _check_alpha(alpha)
    if alpha is None:
        confidence = None
        warnings = [f"no-level: the {row} row carries no confidence level for k={k:g}"]
    else:
        confidence = 1.0 - alpha
        warnings = arf_table_warnings(alpha, row)
    center = (obs.y + obs.prior_mean) / 2.0
    half_width = k * abs(obs.y - obs.prior_mean)
    ci = ConfidenceInterval.build(
        center=center,
        half_width=half_width,
        confidence=confidence,
        scale=obs.scale,
        warnings=warnings,
    )
    LOGGER.debug(
        "arf_interval y=%s prior=%s k=%s lower=%s upper=%s", obs.y, obs.prior_mean, k, ci.lower, ci.upper
    )
    return ci


# ---------------------------------------------------------------------------
# Small samples (Student's t)
# ---------------------------------------------------------------------------


def sample_mean(sample: ScoreSample) -> float:
    if sample.n < 1:
        raise InsufficientDataError("sample mean needs at least one score")
    return float(np.mean(np.asarray(sample.scores, dtype=float)))


def sample_stddev(sample: ScoreSample) -> float:
    if sample.n < 2:
        raise InsufficientDataError(f"sample standard deviation needs n >= 2, got n={sample.n}")
    return float(np.std(np.asarray(sample.scores, dtype=float), ddof=1))


def t_margin(stddev: float, n: int, confidence: float) -> float:
    """Error bound E = t_{alpha/2}(n - 1) * s / sqrt(n)."""

    t_crit = t_quantile(TCriticalQuery.confidence_level(n - 1, confidence))
    return t_crit * stddev / math.sqrt(n)


def t_interval(sample: ScoreSample, confidence: float) -> ConfidenceInterval:
    if not 0.0 < confidence < 1.0:
        raise DomainError(f"confidence must lie in (0, 1), got {confidence}")
    if sample.n < 2:
        raise InsufficientDataError(
            f"t interval needs at least two scores, got {sample.n}; use the ARF interval"
        )
    warnings: List[str] = []
    if sample.n > SMALL_SAMPLE_MAX:
        LOGGER.warning("t_interval_large_sample n=%s", sample.n)
        warnings.append(LARGE_SAMPLE_WARNING)
    mean = sample_mean(sample)
    margin = t_margin(sample_stddev(sample), sample.n, confidence)
    return ConfidenceInterval.build(
        center=mean,
        half_width=margin,
        confidence=confidence,
        scale=sample.scale,
        warnings=warnings,
    )


def relative_margin(ci: ConfidenceInterval) -> float:
    if ci.center == 0:
        raise DomainError("relative margin is undefined for a zero center")
    return ci.half_width / abs(ci.center)


__all__ = [
    "ARF_NORMAL_TABLE",
    "SMALL_SAMPLE_MAX",
    "standardize",
    "arf_k_unknown",
    "arf_alpha_unknown",
    "arf_k_normal",
    "arf_k",
    "arf_table",
    "arf_table_warnings",
    "arf_alpha_normal",
    "arf_alpha_for_k",
    "arf_interval",
    "sample_mean",
    "sample_stddev",
    "t_margin",
    "t_interval",
    "relative_margin",
]
