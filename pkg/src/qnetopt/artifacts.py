"""Reading and writing solver artifacts.

Structured results are JSON (floats written with ``repr`` precision, so a
load returns the exact same doubles); plot data is CSV.
"""

from __future__ import annotations

import csv
import json
import logging
from collections.abc import Iterable, Sequence
from pathlib import Path
from typing import Any, TypeVar

from pydantic import BaseModel

from qnetopt.errors import ConfigError

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)

COSTATE_FILE = "costate.json"
COSTATE_IH_FILE = "costate_ih.json"
POLICY_FILE = "policy.json"
ESTIMATE_FILE = "estimate.json"
VALIDATION_FILE = "validation.json"
VALUE_TABLE_FILE = "value_table.csv"


def write_json(path: Path, payload: BaseModel | dict[str, Any]) -> Path:
    """Write JSON atomically: a sibling .tmp file is renamed over the target."""
    path.parent.mkdir(parents=True, exist_ok=True)
    if isinstance(payload, BaseModel):
        text = payload.model_dump_json(indent=2)
    else:
        text = json.dumps(payload, indent=2)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text + "\n", encoding="utf-8")
    tmp.replace(path)
    logger.debug("Wrote %s", path)
    return path


def read_model(path: Path, model: type[M]) -> M:
    if not path.exists():
        raise ConfigError(f"Missing artifact: {path}")
    return model.model_validate_json(path.read_text(encoding="utf-8"))


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    logger.debug("Wrote %s", path)
    return path


def read_csv(path: Path) -> tuple[list[str], list[list[str]]]:
    if not path.exists():
        raise ConfigError(f"Missing artifact: {path}")
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, [])
        return header, [row for row in reader]
