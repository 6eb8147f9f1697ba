"""IO helpers for score files, label files and config files."""

from __future__ import annotations

import hashlib
import json
import os

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd
from pydantic import ValidationError

from ..errors import DomainError, InputFileError
from ..models.evaluation import QualityMeasurement
from ..models.intervals import ScoreScale
from .coerce import to_float, to_optional_int, to_str
from .logging import get_logger

LOGGER = get_logger("utils.io")

REQUIRED_SCORE_COLUMNS = ("project_id", "rater_id", "score")
OPTIONAL_SCORE_COLUMNS = ("sample_size", "timestamp")
LABEL_COLUMNS = ("rater_a", "rater_b")


def _require_file(path: str | os.PathLike) -> Path:
    resolved = Path(path)
    if not resolved.exists():
        raise InputFileError("file not found", path=str(resolved))
    return resolved


def file_sha256(path: str | os.PathLike) -> Optional[str]:
    """Hex sha256 of an input file, or None when it is not a regular file."""

    resolved = Path(path)
    if not resolved.is_file():
        return None
    with resolved.open("rb") as handle:
        if hasattr(hashlib, "file_digest"):
            return hashlib.file_digest(handle, "sha256").hexdigest()
        return hashlib.sha256(handle.read()).hexdigest()  # Python < 3.11


def provenance_tag(path: str | os.PathLike) -> str:
    sha = file_sha256(path)
    return f"{path}#sha256:{sha}" if sha else str(path)


def _read_csv(path: Path) -> pd.DataFrame:
    try:
        return pd.read_csv(
            path,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            encoding="utf-8",
        )
    except pd.errors.ParserError as exc:
        raise InputFileError(f"malformed CSV: {exc}", path=str(path)) from exc
    except pd.errors.EmptyDataError as exc:
        raise InputFileError("empty CSV, a header row is required", path=str(path)) from exc
    except UnicodeDecodeError as exc:
        raise InputFileError("CSV must be UTF-8", path=str(path)) from exc


def _check_columns(columns: List[str], required: Tuple[str, ...], optional: Tuple[str, ...], path: Path) -> None:
    unknown = [c for c in columns if c not in required + optional]
    if unknown:
        raise InputFileError(f"unknown column(s): {', '.join(unknown)}", path=str(path), line=1)
    missing = [c for c in required if c not in columns]
    if missing:
        raise InputFileError(f"missing column(s): {', '.join(missing)}", path=str(path), line=1)


def _measurement_from_row(row: Dict[str, Any], scale: ScoreScale, path: Path, line: int) -> QualityMeasurement:
    try:
        score = to_float(row.get("score"), "score")
        scale.require(score, "score")
        payload: Dict[str, Any] = {
            "project_id": to_str(row.get("project_id")),
            "rater_id": to_str(row.get("rater_id")),
            "score": score,
            "sample_size_of_evaluated_text": to_optional_int(row.get("sample_size"), "sample_size"),
        }
        timestamp = to_str(row.get("timestamp"))
        if timestamp:
            payload["timestamp"] = timestamp
        return QualityMeasurement.model_validate(payload)
    except (DomainError, ValidationError, ValueError) as exc:
        raise InputFileError(str(exc).splitlines()[0], path=str(path), line=line) from exc


def load_score_file(path: str | os.PathLike, scale: Optional[ScoreScale] = None) -> List[QualityMeasurement]:
    """Load measurements from a CSV (header required) or a JSON array of objects."""

    resolved = _require_file(path)
    scale = scale or ScoreScale()
    if resolved.suffix.lower() == ".json":
        try:
            payload = json.loads(resolved.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputFileError(f"invalid JSON: {exc.msg}", path=str(resolved), line=exc.lineno) from exc
        if not isinstance(payload, list) or not all(isinstance(item, dict) for item in payload):
            raise InputFileError("expected a JSON array of objects", path=str(resolved))
        rows = payload
        for item in rows:
            _check_columns(list(item), REQUIRED_SCORE_COLUMNS, OPTIONAL_SCORE_COLUMNS, resolved)
        # JSON has no meaningful line per record; report the 1-based record index
        numbered = [(idx + 1, row) for idx, row in enumerate(rows)]
    else:
        frame = _read_csv(resolved)
        _check_columns(list(frame.columns), REQUIRED_SCORE_COLUMNS, OPTIONAL_SCORE_COLUMNS, resolved)
        numbered = [(idx + 2, row) for idx, row in enumerate(frame.to_dict("records"))]

    measurements = [_measurement_from_row(row, scale, resolved, line) for line, row in numbered]
    if not measurements:
        raise InputFileError("no score rows", path=str(resolved))
    LOGGER.debug("score_file_loaded path=%s rows=%s", resolved, len(measurements))
    return measurements


def load_label_pairs(path: str | os.PathLike) -> Tuple[List[str], List[str]]:
    """Two-column CSV ``rater_a,rater_b`` of category labels, one item per row."""

    resolved = _require_file(path)
    frame = _read_csv(resolved)
    _check_columns(list(frame.columns), LABEL_COLUMNS, (), resolved)
    labels_a: List[str] = []
    labels_b: List[str] = []
    for idx, row in enumerate(frame.to_dict("records")):
        a, b = to_str(row.get("rater_a")), to_str(row.get("rater_b"))
        if not a or not b:
            raise InputFileError("both raters need a label", path=str(resolved), line=idx + 2)
        labels_a.append(a)
        labels_b.append(b)
    return labels_a, labels_b


def load_matrix_file(path: str | os.PathLike) -> List[List[float]]:
    """Headerless CSV of counts, or a JSON array of arrays."""

    resolved = _require_file(path)
    if resolved.suffix.lower() == ".json":
        try:
            payload = json.loads(resolved.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputFileError(f"invalid JSON: {exc.msg}", path=str(resolved), line=exc.lineno) from exc
        return [[to_float(v, "count") for v in row] for row in payload]
    matrix: List[List[float]] = []
    for lineno, raw in enumerate(resolved.read_text(encoding="utf-8").splitlines(), start=1):
        try:
            matrix.append([to_float(v, "count") for v in raw.split(",")])
        except DomainError as exc:
            raise InputFileError(str(exc), path=str(resolved), line=lineno) from exc
    return matrix


def load_toml(path: str | os.PathLike) -> Dict[str, Any]:
    resolved = _require_file(path)
    try:
        with open(resolved, "rb") as handle:
            return tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise InputFileError(f"invalid TOML: {exc}", path=str(resolved)) from exc


def load_mapping(path: str | os.PathLike, table: str) -> Dict[str, Any]:
    """Read a JSON object or the named table of a TOML file."""

    resolved = _require_file(path)
    if resolved.suffix.lower() == ".json":
        try:
            payload = json.loads(resolved.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise InputFileError(f"invalid JSON: {exc.msg}", path=str(resolved), line=exc.lineno) from exc
        if not isinstance(payload, dict):
            raise InputFileError("expected a JSON object", path=str(resolved))
        return payload.get(table, payload)
    data = load_toml(resolved)
    return data.get(table, data)


__all__ = [
    "file_sha256",
    "provenance_tag",
    "load_score_file",
    "load_label_pairs",
    "load_matrix_file",
    "load_toml",
    "load_mapping",
]
