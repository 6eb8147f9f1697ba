"""Command-line surface: thin handlers over the services, one per subcommand.

Exit codes: 0 ok, 2 input or domain error, 3 gating verdict (FAIL or
BORDERLINE_FAIL), 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from typing import Callable, Dict, Iterator, List, Optional, Sequence

from pydantic import ValidationError

from . import __version__
from .config import Settings, load_settings
from .db.history_repo import HistoryStore
from .errors import NumericalFailure, TQEError
from .models.agreement import KappaFrequencies, KappaProportions, RaterLabelMatrix
from .models.evaluation import EvaluationReport, QualityMeasurement
from .models.intervals import ScoreScale
from .models.simulation import SimulationScenario
from .services import report as report_view
from .services.agreement import (
    cohen_kappa_frequencies,
    cohen_kappa_proportions,
    expected_agreement,
    kappa_from_matrix,
    matrix_from_labels,
    observed_agreement,
    pairwise_agreement,
)
from .services.coverage_service import coverage_table, run_coverage, width_vs_n_sweep
from .services.decision import flag_suspect_measurements
from .services.evaluation_service import EvaluationService, build_arf_report, build_t_report
from .services.tdist import STANDARD_TAILS, TCriticalQuery, critical_value_table, t_quantile
from .utils.coerce import to_float, to_float_list, to_int
from .utils.io import (
    load_label_pairs,
    load_mapping,
    load_matrix_file,
    load_score_file,
    provenance_tag,
)
from .utils.logging import get_logger, set_level

LOGGER = get_logger("cli")

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_GATE = 3
EXIT_NUMERICAL = 4


class CliInputError(TQEError):
    def __init__(self, flag: str, message: str) -> None:
        self.flag = flag
        super().__init__(f"{flag}: {message}")


def _first_line(exc: BaseException) -> str:
    if isinstance(exc, ValidationError):
        first = exc.errors()[0]
        loc = ".".join(str(part) for part in first["loc"])
        return f"{loc}: {first['msg']}" if loc else first["msg"]
    text = str(exc).strip()
    return text.splitlines()[0] if text else exc.__class__.__name__


@contextmanager
def _flag(name: str) -> Iterator[None]:
    """Attribute domain errors raised inside the block to a command-line flag."""

    try:
        yield
    except (CliInputError, NumericalFailure):
        raise
    except (TQEError, ValidationError) as exc:
        raise CliInputError(name, _first_line(exc)) from exc


# ---------------------------------------------------------------------------
# argparse value types (dot decimal separator only)
# ---------------------------------------------------------------------------


def _decimal(text: str) -> float:
    try:
        return to_float(text)
    except TQEError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _integer(text: str) -> int:
    try:
        return to_int(text)
    except TQEError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _decimal_list(text: str) -> List[float]:
    try:
        return to_float_list(text)
    except TQEError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _integer_list(text: str) -> List[int]:
    try:
        return [to_int(part) for part in text.split(",")]
    except TQEError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _print_report(report: EvaluationReport, args: argparse.Namespace) -> None:
    if args.json:
        print(report_view.emit_json(report))
    else:
        print(report_view.render_text(report, explain=args.explain))


def _print_payload(payload: Dict, text: str, args: argparse.Namespace) -> None:
    print(json.dumps(payload, indent=2) if args.json else text)


def _gate(report: EvaluationReport) -> int:
    if report.verdict is not None and report.verdict.kind.gates:
        return EXIT_GATE
    return EXIT_OK


def _with_scale(args: argparse.Namespace, settings: Settings) -> Settings:
    """Apply --scale-min/--scale-max on top of the configured scale."""

    lo = getattr(args, "scale_min", None)
    hi = getattr(args, "scale_max", None)
    if lo is None and hi is None:
        return settings
    with _flag("--scale-min"):
        scale = ScoreScale(
            min=settings.scale_min if lo is None else lo,
            max=settings.scale_max if hi is None else hi,
        )
    return settings.model_copy(update={"scale_min": scale.min, "scale_max": scale.max})


# ---------------------------------------------------------------------------
# Handlers
# ---------------------------------------------------------------------------


def cmd_arf(args: argparse.Namespace, settings: Settings) -> int:
    with _flag("--y"):
        settings.scale.require(args.y, "y")
    with _flag("--prior"):
        settings.scale.require(args.prior, "prior")
    with _flag("--alpha"):
        report = build_arf_report(
            y=args.y,
            prior_mean=args.prior,
            alpha=args.alpha,
            row=args.row or settings.arf_row,
            scale=settings.scale,
            threshold=args.threshold,
        )
    _print_report(report, args)
    return EXIT_OK


def cmd_tci(args: argparse.Namespace, settings: Settings) -> int:
    sources: List[str] = []
    if args.input:
        with _flag("--input"):
            measurements = load_score_file(args.input, settings.scale)
        scores = [m.score for m in measurements]
        sources.append(provenance_tag(args.input))
    elif args.scores is not None:
        scores = args.scores
        with _flag("--scores"):
            for score in scores:
                settings.scale.require(score, "score")
    else:
        raise CliInputError("--scores", "give --scores or --input")
    if len(scores) < 2:
        raise CliInputError("--scores", f"t interval needs at least two scores, got {len(scores)}; use `arf`")
    confidence = settings.confidence if args.confidence is None else args.confidence
    with _flag("--confidence"):
        report = build_t_report(
            scores,
            confidence,
            scale=settings.scale,
            threshold=args.threshold,
            sources=sources,
        )
    _print_report(report, args)
    return _gate(report)


def cmd_tcrit(args: argparse.Namespace, settings: Settings) -> int:
    if args.table:
        table = critical_value_table(range(1, args.max_df + 1), STANDARD_TAILS)
        if args.json:
            print(table.to_json(orient="index"))
        else:
            print(table.to_string(float_format=lambda v: f"{v:.3f}"))
        return EXIT_OK
    if args.df is None:
        raise CliInputError("--df", "required unless --table is given")
    with _flag("--df"):
        if args.one_tail is not None:
            query = TCriticalQuery.one_tail(args.df, args.one_tail)
        elif args.two_tail is not None:
            query = TCriticalQuery.two_tail(args.df, args.two_tail)
        elif args.confidence is not None:
            query = TCriticalQuery.confidence_level(args.df, args.confidence)
        else:
            raise CliInputError("--one-tail", "give one of --one-tail, --two-tail, --confidence")
    value = t_quantile(query)
    payload = {
        "df": query.df,
        "interpretation": query.interpretation,
        "value": query.value,
        "tail_probability": query.tail_probability,
        "t": value,
    }
    _print_payload(payload, f"{value:.3f}", args)
    return EXIT_OK


def cmd_kappa(args: argparse.Namespace, settings: Settings) -> int:
    payload: Dict = {}
    if args.po is not None or args.pe is not None:
        if args.po is None or args.pe is None:
            raise CliInputError("--po", "--po and --pe go together")
        with _flag("--pe"):
            kappa = cohen_kappa_proportions(KappaProportions(p_o=args.po, p_e=args.pe))
        payload = {"p_o": args.po, "p_e": args.pe}
    elif args.fo is not None:
        if args.fe is None or args.N is None:
            raise CliInputError("--fo", "--fo, --fe and --N go together")
        with _flag("--fe"):
            kappa = cohen_kappa_frequencies(KappaFrequencies(f_o=args.fo, f_e=args.fe, N=args.N))
        payload = {"f_o": args.fo, "f_e": args.fe, "N": args.N}
    elif args.matrix or args.labels:
        flag = "--matrix" if args.matrix else "--labels"
        with _flag(flag):
            if args.matrix:
                matrix = RaterLabelMatrix(counts=load_matrix_file(args.matrix))
            else:
                matrix = matrix_from_labels(*load_label_pairs(args.labels))
            kappa = kappa_from_matrix(matrix)
        payload = {
            "p_o": observed_agreement(matrix),
            "p_e": expected_agreement(matrix),
            "categories": matrix.categories,
            "source": provenance_tag(args.matrix or args.labels),
        }
    else:
        raise CliInputError("--po", "give --po/--pe, --fo/--fe/--N, --matrix or --labels")
    payload["kappa"] = kappa
    _print_payload(payload, f"{kappa:.2f}", args)
    return EXIT_OK


def cmd_agree(args: argparse.Namespace, settings: Settings) -> int:
    with _flag("--qs1"):
        result = pairwise_agreement(args.qs1, args.qs2)
    text = (
        f"QS2 agrees with {result.qs2_of_qs1 * 100:.1f}% of QS1\n"
        f"QS1 agrees with {result.qs1_of_qs2 * 100:.1f}% of QS2"
    )
    _print_payload(result.model_dump(), text, args)
    return EXIT_OK


def cmd_decide(args: argparse.Namespace, settings: Settings) -> int:
    service = EvaluationService(HistoryStore(settings.history_path), settings)
    with _flag("--scores"):
        for score in args.scores:
            settings.scale.require(score, "score")
    with _flag("--project"):
        report = service.decide(
            args.project,
            args.scores,
            threshold=args.threshold,
            confidence=args.confidence,
            record=args.record,
            rater_id=args.rater,
        )
    _print_report(report, args)
    return _gate(report)


def cmd_history(args: argparse.Namespace, settings: Settings) -> int:
    store = HistoryStore(settings.history_path)
    if args.history_command == "add":
        with _flag("--score"):
            settings.scale.require(args.score, "score")
            measurement = QualityMeasurement(
                project_id=args.project,
                rater_id=args.rater,
                score=args.score,
                sample_size_of_evaluated_text=args.sample_size,
                **({"timestamp": args.timestamp} if args.timestamp else {}),
            )
        store.append(measurement)
        _print_payload(measurement.model_dump(mode="json"), f"recorded {measurement.score:.2f}", args)
        return EXIT_OK
    if args.history_command == "import":
        with _flag("--input"):
            measurements = load_score_file(args.input, settings.scale)
        store.extend(measurements)
        _print_payload({"imported": len(measurements)}, f"imported {len(measurements)} measurement(s)", args)
        return EXIT_OK

    with _flag("history"):
        records = store.load(args.project)
    if args.history_command == "list":
        if args.json:
            print(json.dumps([m.model_dump(mode="json") for m in records], indent=2))
        else:
            frame = store.to_frame(args.project)
            print(frame.to_string(index=False) if not frame.empty else "no measurements")
            if args.project and records:
                print(f"average: {store.project_average(args.project):.2f}")
        return EXIT_OK

    flags = flag_suspect_measurements(records, settings.text_sample_bounds)
    if args.json:
        print(json.dumps([f.model_dump(mode="json") for f in flags], indent=2))
    elif not flags:
        print("no suspect measurements")
    else:
        for item in flags:
            m = item.measurement
            print(f"{item.flag.value}\t{m.project_id}\t{m.rater_id}\t{m.score:.2f}\t{item.detail}")
    return EXIT_OK


def _load_scenario(args: argparse.Namespace, settings: Settings) -> SimulationScenario:
    with _flag("--config"):
        data = dict(load_mapping(args.scenario, "scenario"))
        for key in ("trials", "seed", "workers"):
            override = getattr(args, key, None)
            if override is not None:
                data[key] = override
        data.setdefault("workers", settings.workers)
        return SimulationScenario(**data)


def cmd_coverage(args: argparse.Namespace, settings: Settings) -> int:
    scenario = _load_scenario(args, settings)
    with _flag("--config"):
        result = run_coverage(scenario)
    if args.csv:
        coverage_table(result).to_csv(args.csv, index=False)
    text = (
        f"method: {scenario.method.value}\n"
        f"n: {scenario.n_observations}\n"
        f"nominal: {scenario.confidence:.2%}\n"
        f"coverage: {result.empirical_coverage:.4f} ({result.covered_trials}/{result.trials})\n"
        f"mean half-width: {result.mean_halfwidth:.4f}"
    )
    _print_payload(result.model_dump(mode="json"), text, args)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    base = _load_scenario(args, settings)
    with _flag("--n"):
        table = width_vs_n_sweep(base, args.n, include_single=False if args.no_single else None)
    if args.output:
        table.to_csv(args.output, index=False)
    if args.json:
        print(table.to_json(orient="records"))
    else:
        print(table.to_csv(index=False), end="")
    return EXIT_OK


HANDLERS: Dict[str, Callable[[argparse.Namespace, Settings], int]] = {
    "arf": cmd_arf,
    "tci": cmd_tci,
    "tcrit": cmd_tcrit,
    "kappa": cmd_kappa,
    "agree": cmd_agree,
    "decide": cmd_decide,
    "history": cmd_history,
    "coverage": cmd_coverage,
    "sweep": cmd_sweep,
}


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="full-precision JSON output")
    common.add_argument("--explain", action="store_true", help="print the formula instantiation")
    common.add_argument("--settings", dest="settings_path", help="TOML settings file (default: $TQE_CONFIG)")
    common.add_argument("--log-level", type=str.upper, choices=["DEBUG", "INFO", "WARNING", "ERROR"])

    scaled = argparse.ArgumentParser(add_help=False)
    scaled.add_argument("--scale-min", type=_decimal, help="lowest score on the scale (default from settings)")
    scaled.add_argument("--scale-max", type=_decimal, help="highest score on the scale (default from settings)")

    parser = argparse.ArgumentParser(
        prog="tqe",
        description="Confidence intervals and rater agreement for scarce quality scores.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    arf = sub.add_parser("arf", parents=[common, scaled], help="interval from one score and a prior mean")
    arf.add_argument("--y", type=_decimal, required=True, help="the new measurement")
    arf.add_argument("--prior", type=_decimal, required=True, help="prior mean fixed before measuring")
    arf.add_argument("--alpha", type=_decimal, required=True)
    arf.add_argument("--row", choices=["normal", "unknown"], default=None)
    arf.add_argument("--threshold", type=_decimal)

    tci = sub.add_parser("tci", parents=[common, scaled], help="Student's t interval for 2+ scores")
    tci.add_argument("--scores", type=_decimal_list, help="comma-separated scores")
    tci.add_argument("--input", help="CSV or JSON score file")
    tci.add_argument("--confidence", type=_decimal)
    tci.add_argument("--threshold", type=_decimal)

    tcrit = sub.add_parser("tcrit", parents=[common], help="critical value of Student's t")
    tcrit.add_argument("--df", type=_integer)
    tail = tcrit.add_mutually_exclusive_group()
    tail.add_argument("--one-tail", type=_decimal)
    tail.add_argument("--two-tail", type=_decimal)
    tail.add_argument("--confidence", type=_decimal)
    tcrit.add_argument("--table", action="store_true", help="print the critical-value table")
    tcrit.add_argument("--max-df", type=_integer, default=30)

    kappa = sub.add_parser("kappa", parents=[common], help="Cohen's kappa")
    kappa.add_argument("--po", type=_decimal)
    kappa.add_argument("--pe", type=_decimal)
    kappa.add_argument("--fo", type=_decimal)
    kappa.add_argument("--fe", type=_decimal)
    kappa.add_argument("--N", type=_decimal)
    kappa.add_argument("--matrix", help="headerless CSV or JSON contingency matrix")
    kappa.add_argument("--labels", help="CSV with rater_a,rater_b label columns")

    agree = sub.add_parser("agree", parents=[common], help="pairwise agreement of two scores")
    agree.add_argument("--qs1", type=_decimal, required=True)
    agree.add_argument("--qs2", type=_decimal, required=True)

    decide = sub.add_parser("decide", parents=[common, scaled], help="evaluate new scores against history")
    decide.add_argument("--project", required=True)
    decide.add_argument("--scores", type=_decimal_list, required=True)
    decide.add_argument("--threshold", type=_decimal)
    decide.add_argument("--confidence", type=_decimal)
    decide.add_argument("--rater", default="cli")
    decide.add_argument("--record", action="store_true", help="append the new scores afterwards")

    history = sub.add_parser("history", parents=[common], help="inspect or extend the history store")
    history_sub = history.add_subparsers(dest="history_command", required=True)
    add = history_sub.add_parser("add", parents=[common, scaled])
    add.add_argument("--project", required=True)
    add.add_argument("--rater", required=True)
    add.add_argument("--score", type=_decimal, required=True)
    add.add_argument("--sample-size", type=_integer)
    add.add_argument("--timestamp", help="ISO-8601, UTC assumed when no offset is given")
    imp = history_sub.add_parser("import", parents=[common, scaled])
    imp.add_argument("--input", required=True)
    for name in ("list", "flags"):
        reader = history_sub.add_parser(name, parents=[common])
        reader.add_argument("--project")

    for name, helptext in (("coverage", "Monte Carlo coverage"), ("sweep", "half-width versus n")):
        cmd = sub.add_parser(name, parents=[common], help=helptext)
        cmd.add_argument("--config", dest="scenario", required=True, help="scenario JSON or TOML")
        cmd.add_argument("--trials", type=_integer)
        cmd.add_argument("--seed", type=_integer)
        cmd.add_argument("--workers", type=_integer)
        if name == "coverage":
            cmd.add_argument("--csv", help="write the one-row result CSV here")
        else:
            cmd.add_argument("--n", type=_integer_list, default=[2, 3, 5, 10, 30])
            cmd.add_argument("--output", help="write the sweep CSV here")
            cmd.add_argument("--no-single", action="store_true", help="omit the n = 1 ARF row")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    if args.log_level:
        set_level(args.log_level)
    try:
        settings = _with_scale(args, load_settings(args.settings_path))
        return HANDLERS[args.command](args, settings)
    except NumericalFailure as exc:
        print(f"tqe {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (TQEError, ValidationError) as exc:
        print(f"tqe {args.command}: error: {_first_line(exc)}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"tqe {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_INPUT", "EXIT_GATE", "EXIT_NUMERICAL"]
