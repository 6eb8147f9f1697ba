"""Assemble evaluation reports from scores, history and a threshold policy."""

from __future__ import annotations

from typing import List, Optional, Sequence

from ..config import Settings
from ..db.history_repo import HistoryStore, historical_average
from ..errors import InsufficientDataError
from ..models.evaluation import (
    CriticalConstant,
    EvaluationReport,
    Provenance,
    QualityMeasurement,
    ReportInputs,
    ThresholdPolicy,
)
from ..models.intervals import ConfidenceInterval, ScoreSample, ScoreScale, SingleObservation
from ..utils.logging import get_logger
from .agreement import pairwise_agreement
from .decision import flag_suspect_measurements, rule_of_thumb_estimate, threshold_verdict
from .intervals import (
    ArfRow,
    arf_interval,
    arf_k,
    relative_margin,
    sample_mean,
    sample_stddev,
    t_interval,
)
from .tdist import TCriticalQuery, t_quantile

LOGGER = get_logger("services.evaluation")


def _relative_margin(ci: ConfidenceInterval) -> Optional[float]:
    return relative_margin(ci) if ci.center else None


def build_arf_report(
    y: float,
    prior_mean: float,
    alpha: float,
    row: ArfRow = "normal",
    scale: Optional[ScoreScale] = None,
    threshold: Optional[float] = None,
    project_id: Optional[str] = None,
    sources: Optional[List[str]] = None,
) -> EvaluationReport:
    scale = scale or ScoreScale()
    obs = SingleObservation(y=y, prior_mean=prior_mean, scale=scale)
    k = arf_k(alpha, row)
    ci = arf_interval(obs, k, alpha=alpha, row=row)
    estimate = rule_of_thumb_estimate(prior_mean, y)
    verdict = None
    if threshold is not None:
        policy = ThresholdPolicy(pass_threshold=threshold, confidence=1.0 - alpha, arf_row=row)
        verdict = threshold_verdict(ci, estimate, policy)
    return EvaluationReport(
        method="ARF",
        inputs=ReportInputs(
            scores=[y],
            prior_mean=prior_mean,
            confidence=1.0 - alpha,
            threshold=threshold,
            scale_min=scale.min,
            scale_max=scale.max,
            project_id=project_id,
        ),
        mean=y,
        critical=CriticalConstant(name="k", value=k, arf_row=row),
        margin=ci.half_width,
        relative_margin=_relative_margin(ci),
        interval=ci,
        estimate=estimate,
        verdict=verdict,
        warnings=list(ci.warnings),
        provenance=Provenance(sources=list(sources or [])),
    )


def build_t_report(
    scores: Sequence[float],
    confidence: float,
    scale: Optional[ScoreScale] = None,
    threshold: Optional[float] = None,
    project_id: Optional[str] = None,
    sources: Optional[List[str]] = None,
) -> EvaluationReport:
    scale = scale or ScoreScale()
    sample = ScoreSample(scores=list(scores), scale=scale)
    if sample.n < 2:
        raise InsufficientDataError(
            f"a t interval needs at least two scores, got {sample.n}; use the ARF interval"
        )
    ci = t_interval(sample, confidence)
    query = TCriticalQuery.confidence_level(sample.n - 1, confidence)
    mean = sample_mean(sample)
    agreement = None
    if sample.n == 2 and all(score > 0 for score in sample.scores):
        agreement = pairwise_agreement(sample.scores[0], sample.scores[1])
    verdict = None
    if threshold is not None:
        policy = ThresholdPolicy(pass_threshold=threshold, confidence=confidence)
        verdict = threshold_verdict(ci, mean, policy)
    return EvaluationReport(
        method="T",
        inputs=ReportInputs(
            scores=list(sample.scores),
            confidence=confidence,
            threshold=threshold,
            scale_min=scale.min,
            scale_max=scale.max,
            project_id=project_id,
        ),
        mean=mean,
        stddev=sample_stddev(sample),
        critical=CriticalConstant(
            name="t",
            value=t_quantile(query),
            df=query.df,
            tail_probability=query.tail_probability,
        ),
        margin=ci.half_width,
        relative_margin=_relative_margin(ci),
        interval=ci,
        agreement=agreement,
        verdict=verdict,
        warnings=list(ci.warnings),
        provenance=Provenance(sources=list(sources or [])),
    )


def evaluate(
    history: Sequence[QualityMeasurement],
    new_scores: Sequence[float],
    policy: ThresholdPolicy,
    scale: Optional[ScoreScale] = None,
    project_id: Optional[str] = None,
) -> EvaluationReport:
    """One new score: ARF around the historical average. Two or more: t interval."""

    if not new_scores:
        raise InsufficientDataError("evaluation needs at least one new score")
    if len(new_scores) == 1:
        prior = historical_average(list(history))
        report = build_arf_report(
            y=new_scores[0],
            prior_mean=prior,
            alpha=1.0 - policy.confidence,
            row=policy.arf_row,
            scale=scale,
            threshold=policy.pass_threshold,
            project_id=project_id,
        )
    else:
        report = build_t_report(
            new_scores,
            policy.confidence,
            scale=scale,
            threshold=policy.pass_threshold,
            project_id=project_id,
        )
    LOGGER.info(
        "evaluation method=%s n=%s lower=%s upper=%s verdict=%s",
        report.method,
        len(new_scores),
        report.interval.lower,
        report.interval.upper,
        report.verdict.kind.value if report.verdict else None,
    )
    return report


class EvaluationService:
    """Evaluates new scores for a project against its stored history."""

    def __init__(self, store: HistoryStore, settings: Settings) -> None:
        self.store = store
        self.settings = settings

    def decide(
        self,
        project_id: str,
        scores: Sequence[float],
        threshold: Optional[float] = None,
        confidence: Optional[float] = None,
        record: bool = False,
        rater_id: str = "cli",
    ) -> EvaluationReport:
        history = self.store.load(project_id)
        policy = self.settings.policy(threshold=threshold, confidence=confidence)
        report = evaluate(history, scores, policy, scale=self.settings.scale, project_id=project_id)

        flags = flag_suspect_measurements(history, self.settings.text_sample_bounds)
        if flags:
            kinds = sorted({flag.flag.value for flag in flags})
            report.warnings.append(
                f"history: {len(flags)} suspect measurement(s) flagged ({', '.join(kinds)})"
            )
        report.provenance.sources.append(str(self.store.path))

        if record:
            self.store.extend(
                [
                    QualityMeasurement(project_id=project_id, rater_id=rater_id, score=score)
                    for score in scores
                ]
            )
        return report


__all__ = ["build_arf_report", "build_t_report", "evaluate", "EvaluationService"]
