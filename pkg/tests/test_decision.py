import pytest

from tqe_intervals.models.evaluation import QualityMeasurement, SuspectFlag, ThresholdPolicy, VerdictKind
from tqe_intervals.models.intervals import ConfidenceInterval, ScoreScale
from tqe_intervals.services.decision import (
    flag_suspect_measurements,
    rule_of_thumb_estimate,
    threshold_verdict,
)


def _ci(lower: float, upper: float) -> ConfidenceInterval:
    return ConfidenceInterval.build(
        center=(lower + upper) / 2.0,
        half_width=(upper - lower) / 2.0,
        confidence=0.80,
        scale=ScoreScale(),
    )


def _measurement(score: float, project: str = "p1", size=None) -> QualityMeasurement:
    return QualityMeasurement(
        project_id=project,
        rater_id="r1",
        score=score,
        sample_size_of_evaluated_text=size,
    )


def _verdict(lower: float, upper: float, mean: float, threshold: float) -> VerdictKind:
    return threshold_verdict(_ci(lower, upper), mean, ThresholdPolicy(pass_threshold=threshold)).kind


def test_rule_of_thumb():
    assert rule_of_thumb_estimate(96.3, 85.2) == pytest.approx(90.75)
    assert rule_of_thumb_estimate(70.0, 70.0) == 70.0
    assert rule_of_thumb_estimate(100.0, 0.0) == 50.0


def test_straddling_interval_with_low_mean_is_borderline_fail():
    assert _verdict(71.51, 87.33, 79.42, 80.0) is VerdictKind.BORDERLINE_FAIL


def test_straddling_interval_with_high_mean_is_borderline_pass():
    assert _verdict(75.0, 95.0, 85.0, 80.0) is VerdictKind.BORDERLINE_PASS


def test_interval_above_threshold_passes():
    assert _verdict(85.0, 95.0, 90.0, 80.0) is VerdictKind.PASS
    assert _verdict(71.51, 87.33, 79.42, 70.0) is VerdictKind.PASS


def test_interval_below_threshold_fails():
    assert _verdict(60.0, 75.0, 67.5, 80.0) is VerdictKind.FAIL


def test_boundary_conventions():
    assert _verdict(80.0, 90.0, 85.0, 80.0) is VerdictKind.PASS
    assert _verdict(70.0, 90.0, 80.0, 80.0) is VerdictKind.BORDERLINE_PASS


def test_zero_width_interval():
    assert _verdict(80.0, 80.0, 80.0, 80.0) is VerdictKind.PASS
    assert _verdict(79.0, 79.0, 79.0, 80.0) is VerdictKind.FAIL


def test_verdict_never_improves_as_threshold_rises():
    ci = _ci(71.51, 87.33)
    ranks = [
        threshold_verdict(ci, 79.42, ThresholdPolicy(pass_threshold=t)).kind.rank
        for t in range(60, 101)
    ]
    assert all(b <= a for a, b in zip(ranks, ranks[1:]))


def test_verdict_covers_every_case():
    for lower, upper in [(0.0, 0.0), (10.0, 90.0), (50.0, 100.0), (100.0, 100.0)]:
        for threshold in (0.0, 25.0, 50.0, 99.9, 100.0):
            verdict = threshold_verdict(
                _ci(lower, upper), (lower + upper) / 2.0, ThresholdPolicy(pass_threshold=threshold)
            )
            assert verdict.kind in VerdictKind
            assert verdict.rationale


def test_gating_kinds():
    assert VerdictKind.FAIL.gates and VerdictKind.BORDERLINE_FAIL.gates
    assert not VerdictKind.PASS.gates and not VerdictKind.BORDERLINE_PASS.gates


def test_outlier_is_flagged():
    history = [_measurement(s) for s in (95.0, 96.0, 94.0, 97.0, 60.0)]
    flags = flag_suspect_measurements(history)
    assert [f.measurement.score for f in flags] == [60.0]
    assert flags[0].flag is SuspectFlag.OUTLIER


def test_uniform_history_is_clean():
    history = [_measurement(90.0) for _ in range(3)]
    assert flag_suspect_measurements(history) == []


def test_outliers_are_judged_per_project():
    history = [_measurement(s, "a") for s in (95.0, 96.0, 94.0, 97.0)]
    history += [_measurement(s, "b") for s in (60.0, 61.0, 59.0, 62.0)]
    assert flag_suspect_measurements(history) == []


def test_text_sample_bounds():
    history = [_measurement(90.0, size=3), _measurement(90.0, size=20000), _measurement(90.0, size=500)]
    flags = flag_suspect_measurements(history, (100, 10000))
    assert [f.flag for f in flags] == [SuspectFlag.SMALL_TEXT_SAMPLE, SuspectFlag.LARGE_TEXT_SAMPLE]


def test_empty_history_has_no_flags():
    assert flag_suspect_measurements([]) == []
