"""Human-readable and JSON renderings of evaluation reports."""

from __future__ import annotations

from typing import List, Optional

from ..models.evaluation import EvaluationReport


def _fmt_number(value: Optional[float], precision: int = 2) -> str:
    if value is None:
        return "n/a"
    return f"{value:.{precision}f}"


def _fmt_percent(value: Optional[float]) -> str:
    if value is None:
        return "n/a"
    return f"{value * 100:.1f}%"


def _fmt_bound(value: float, clamped: bool) -> str:
    text = _fmt_number(value)
    return f"{text}*" if clamped else text


def explain_lines(report: EvaluationReport) -> List[str]:
    """The formula instantiated with this report's numbers."""

    ci = report.interval
    if report.method == "ARF":
        y = report.inputs.scores[0]
        prior = report.inputs.prior_mean
        return [
            f"center = ({_fmt_number(y)} + {_fmt_number(prior)}) / 2 = {_fmt_number(ci.center)}",
            f"half-width = {_fmt_number(report.critical.value)} × |{_fmt_number(y)} − "
            f"{_fmt_number(prior)}| = {_fmt_number(ci.half_width)}",
            f"ARF = {_fmt_number(ci.center)} ± {_fmt_number(ci.half_width)}",
        ]
    n = len(report.inputs.scores)
    return [
        f"x̄ = ({' + '.join(_fmt_number(s) for s in report.inputs.scores)}) / {n} = "
        f"{_fmt_number(report.mean)}",
        f"s = {_fmt_number(report.stddev, 4)}",
        f"t(df={report.critical.df}, q={_fmt_number(report.critical.tail_probability, 4)}) = "
        f"{_fmt_number(report.critical.value, 3)}",
        f"E = {_fmt_number(report.critical.value, 3)} × {_fmt_number(report.stddev, 4)} / √{n} = "
        f"{_fmt_number(report.margin)}",
    ]


def render_text(report: EvaluationReport, explain: bool = False) -> str:
    ci = report.interval
    lines = [f"method: {report.method}"]
    if report.inputs.project_id:
        lines.append(f"project: {report.inputs.project_id}")
    lines.append(f"scores: {', '.join(_fmt_number(s) for s in report.inputs.scores)}")
    if report.inputs.prior_mean is not None:
        lines.append(f"prior mean: {_fmt_number(report.inputs.prior_mean)}")
    lines.append(f"confidence: {_fmt_percent(ci.confidence)}")
    lines.append(f"mean: {_fmt_number(report.mean)}")
    if report.stddev is not None:
        lines.append(f"stddev: {_fmt_number(report.stddev, 4)}")
    critical = report.critical
    label = critical.name if critical.df is None else f"{critical.name} (df={critical.df})"
    lines.append(f"{label}: {_fmt_number(critical.value, 3)}")
    lines.append(f"margin: {_fmt_number(report.margin)}")
    if report.relative_margin is not None:
        lines.append(f"relative margin: {report.relative_margin * 100:.2f}%")
    lines.append(
        f"interval: [{_fmt_bound(ci.lower, ci.clamped_lower)}, {_fmt_bound(ci.upper, ci.clamped_upper)}]"
    )
    if ci.clamped_lower or ci.clamped_upper:
        lines.append("  * clamped to the score scale")
    if report.estimate is not None:
        lines.append(f"most likely value: {_fmt_number(report.estimate)}")
    if report.agreement is not None:
        lines.append(
            f"agreement: QS2 agrees with {_fmt_percent(report.agreement.qs2_of_qs1)} of QS1, "
            f"QS1 agrees with {_fmt_percent(report.agreement.qs1_of_qs2)} of QS2"
        )
    if report.verdict is not None:
        lines.append(f"verdict: {report.verdict.kind.value} (threshold {_fmt_number(report.verdict.threshold)})")
        lines.append(f"  {report.verdict.rationale}")
    if explain:
        lines.append("explain:")
        lines.extend(f"  {line}" for line in explain_lines(report))
    for warning in report.warnings:
        lines.append(f"warning: {warning}")
    return "\n".join(lines)


def emit_json(report: EvaluationReport) -> str:
    return report.model_dump_json(indent=2)


def parse_json(text: str) -> EvaluationReport:
    return EvaluationReport.model_validate_json(text)


__all__ = ["render_text", "explain_lines", "emit_json", "parse_json"]
