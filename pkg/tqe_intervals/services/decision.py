"""PASS/FAIL decisions, the halfway rule of thumb and data-quality flags."""

from __future__ import annotations

from typing import List, Sequence, Tuple

import pandas as pd

from ..models.evaluation import (
    FlaggedMeasurement,
    QualityMeasurement,
    SuspectFlag,
    ThresholdPolicy,
    Verdict,
    VerdictKind,
)
from ..models.intervals import ConfidenceInterval
from ..utils.logging import get_logger

LOGGER = get_logger("services.decision")

IQR_FACTOR = 1.5
DEFAULT_TEXT_SAMPLE_BOUNDS: Tuple[int, int] = (100, 10000)


# ---------------------------------------------------------------------------
# Estimates and verdicts
# ---------------------------------------------------------------------------


def rule_of_thumb_estimate(historical_avg: float, new_score: float) -> float:
    """A deviant single score: the true value is most likely halfway back to the average."""

    return (historical_avg + new_score) / 2.0


def threshold_verdict(ci: ConfidenceInterval, mean: float, policy: ThresholdPolicy) -> Verdict:
    threshold = policy.pass_threshold
    if ci.lower >= threshold:
        kind = VerdictKind.PASS
        rationale = f"lower bound {ci.lower:.2f} is at or above the threshold {threshold:.2f}"
    elif ci.upper < threshold:
        kind = VerdictKind.FAIL
        rationale = f"upper bound {ci.upper:.2f} is below the threshold {threshold:.2f}"
    elif mean < threshold:
        kind = VerdictKind.BORDERLINE_FAIL
        rationale = (
            f"interval [{ci.lower:.2f}, {ci.upper:.2f}] straddles {threshold:.2f} and the mean "
            f"{mean:.2f} is below it, so more than half of the plausible values fail"
        )
    else:
        # a mean exactly on the threshold leaves no more than half of the values below it
        kind = VerdictKind.BORDERLINE_PASS
        rationale = (
            f"interval [{ci.lower:.2f}, {ci.upper:.2f}] straddles {threshold:.2f} and the mean "
            f"{mean:.2f} is not below it"
        )
    return Verdict(kind=kind, interval=ci, mean=mean, threshold=threshold, rationale=rationale)


# ---------------------------------------------------------------------------
# Data-quality flags
# ---------------------------------------------------------------------------


def flag_suspect_measurements(
    history: Sequence[QualityMeasurement],
    text_sample_bounds: Tuple[int, int] = DEFAULT_TEXT_SAMPLE_BOUNDS,
) -> List[FlaggedMeasurement]:
    """Annotate, never remove, measurements that deserve a second look.

    Outliers use the 1.5 IQR fences of each project's own scores; text sample sizes
    are compared with the configured bounds.
    """

    if not history:
        return []
    lo_size, hi_size = text_sample_bounds
    frame = pd.DataFrame(
        {
            "project_id": [m.project_id for m in history],
            "score": [m.score for m in history],
            "size": [m.sample_size_of_evaluated_text for m in history],
        }
    )
    grouped = frame.groupby("project_id")["score"]
    q1 = grouped.transform(lambda s: s.quantile(0.25))
    q3 = grouped.transform(lambda s: s.quantile(0.75))
    iqr = q3 - q1
    low_fence = q1 - IQR_FACTOR * iqr
    high_fence = q3 + IQR_FACTOR * iqr

    flags: List[FlaggedMeasurement] = []
    for idx, measurement in enumerate(history):
        score = measurement.score
        if score < low_fence.iloc[idx] or score > high_fence.iloc[idx]:
            flags.append(
                FlaggedMeasurement(
                    measurement=measurement,
                    flag=SuspectFlag.OUTLIER,
                    detail=(
                        f"score {score:.2f} outside [{low_fence.iloc[idx]:.2f}, "
                        f"{high_fence.iloc[idx]:.2f}] for project {measurement.project_id}"
                    ),
                )
            )
        size = measurement.sample_size_of_evaluated_text
        if size is not None and size < lo_size:
            flags.append(
                FlaggedMeasurement(
                    measurement=measurement,
                    flag=SuspectFlag.SMALL_TEXT_SAMPLE,
                    detail=f"text sample size {size} below {lo_size}",
                )
            )
        elif size is not None and size > hi_size:
            flags.append(
                FlaggedMeasurement(
                    measurement=measurement,
                    flag=SuspectFlag.LARGE_TEXT_SAMPLE,
                    detail=f"text sample size {size} above {hi_size}",
                )
            )
    if flags:
        LOGGER.warning("suspect_measurements count=%s total=%s", len(flags), len(history))
    return flags


__all__ = [
    "IQR_FACTOR",
    "DEFAULT_TEXT_SAMPLE_BOUNDS",
    "rule_of_thumb_estimate",
    "threshold_verdict",
    "flag_suspect_measurements",
]
