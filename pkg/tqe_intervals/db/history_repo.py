"""Append-only JSON-lines store of quality measurements."""

from __future__ import annotations

import os
import threading
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
from pydantic import ValidationError

from ..errors import InputFileError, NoHistoryError
from ..models.evaluation import QualityMeasurement
from ..utils.logging import get_logger

LOGGER = get_logger("db.history")

DEFAULT_HISTORY_PATH = "tqe_history.jsonl"


class HistoryStore:
    """One measurement per line; lines are only ever appended.

    Appends from threads of one process serialise on a lock and each record is
    written with a single ``write`` call. Readers never see a partial record
    unless another process is mid-append.
    """

    _locks: Dict[str, threading.Lock] = {}
    _locks_guard = threading.Lock()

    def __init__(self, path: str | os.PathLike = DEFAULT_HISTORY_PATH) -> None:
        self.path = Path(path)
        key = str(self.path.resolve())
        with self._locks_guard:
            self._lock = self._locks.setdefault(key, threading.Lock())

    # ------------------------------------------------------------------
    # Writes
    def append(self, measurement: QualityMeasurement) -> None:
        line = measurement.model_dump_json() + "\n"
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as handle:
                handle.write(line)
        LOGGER.info(
            "history_append path=%s project=%s rater=%s score=%s",
            self.path,
            measurement.project_id,
            measurement.rater_id,
            measurement.score,
        )

    def extend(self, measurements: List[QualityMeasurement]) -> None:
        for measurement in measurements:
            self.append(measurement)

    # ------------------------------------------------------------------
    # Reads
    def load(self, project_id: Optional[str] = None) -> List[QualityMeasurement]:
        if not self.path.exists():
            return []
        records: List[QualityMeasurement] = []
        with open(self.path, "r", encoding="utf-8") as handle:
            for lineno, raw in enumerate(handle, start=1):
                if not raw.strip():
                    continue
                try:
                    record = QualityMeasurement.model_validate_json(raw)
                except ValidationError as exc:
                    raise InputFileError(
                        f"invalid history record: {exc.errors()[0]['msg']}",
                        path=str(self.path),
                        line=lineno,
                    ) from exc
                if project_id is None or record.project_id == project_id:
                    records.append(record)
        LOGGER.debug("history_load path=%s project=%s records=%s", self.path, project_id, len(records))
        return records

    def project_average(self, project_id: str) -> float:
        scores = [m.score for m in self.load(project_id)]
        if not scores:
            raise NoHistoryError(f"no history for project {project_id!r} in {self.path}")
        return float(np.mean(scores))

    def to_frame(self, project_id: Optional[str] = None) -> pd.DataFrame:
        records = [m.model_dump(mode="json") for m in self.load(project_id)]
        columns = list(QualityMeasurement.model_fields)
        return pd.DataFrame(records, columns=columns)


def historical_average(history: List[QualityMeasurement]) -> float:
    if not history:
        raise NoHistoryError("a single score needs a prior average, but the history is empty")
    return float(np.mean([m.score for m in history]))


__all__ = ["HistoryStore", "historical_average", "DEFAULT_HISTORY_PATH"]
