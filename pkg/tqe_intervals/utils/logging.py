"""Stderr logging shared by the services and the command line.

Everything logs under the ``tqe_intervals`` namespace as ``event key=value``
records, so stdout stays reserved for reports.
"""

from __future__ import annotations

import logging
import os
import sys
from typing import Optional

LEVEL_ENV_VAR = "TQE_LOG_LEVEL"
NAMESPACE = "tqe_intervals"

_RECORD_FORMAT = "%(asctime)s %(levelname)s %(name)s %(message)s"
_DATE_FORMAT = "%Y-%m-%dT%H:%M:%S"


def configure_logging(level: Optional[str] = None) -> logging.Logger:
    """Attach the stderr handler once and return the namespace logger.

    The first call takes its level from ``$TQE_LOG_LEVEL`` (WARNING when unset);
    an explicit ``level`` wins on any call.
    """

    root = logging.getLogger(NAMESPACE)
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(_RECORD_FORMAT, datefmt=_DATE_FORMAT))
        root.addHandler(handler)
        root.propagate = False
        root.setLevel(os.getenv(LEVEL_ENV_VAR, "WARNING").upper())
    if level:
        root.setLevel(level.upper())
    return root


def set_level(level: str) -> None:
    configure_logging(level)


def get_logger(child: Optional[str] = None) -> logging.Logger:
    configure_logging()
    return logging.getLogger(f"{NAMESPACE}.{child}" if child else NAMESPACE)


__all__ = ["LEVEL_ENV_VAR", "NAMESPACE", "configure_logging", "get_logger", "set_level"]
