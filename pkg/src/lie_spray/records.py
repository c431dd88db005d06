"""Line-delimited JSON records, flat tables and the run manifest.

Floats carry 17 significant digits in records and 6 in tables; keys are
sorted, so two runs with the same config and seed differ only in the
manifest's wall time.
"""

from __future__ import annotations

import json
import math
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, Field

from . import __version__
from .settings import SCHEMA_VERSION

OutputFormat = Literal["records", "table"]

RECORD_DIGITS = 17
TABLE_DIGITS = 6


def format_float(value: float, digits: int = RECORD_DIGITS) -> str:
    if math.isnan(value):
        return '"NaN"'
    if math.isinf(value):
        return '"Infinity"' if value > 0 else '"-Infinity"'
    return format(value, f".{digits}g")


def to_plain(value: Any) -> Any:
    """numpy scalars and arrays to Python builtins, recursively."""
    if isinstance(value, np.ndarray):
        return [to_plain(x) for x in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Mapping):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(x) for x in value]
    if isinstance(value, BaseModel):
        return to_plain(value.model_dump(by_alias=True))
    return value


def dumps_record(value: Any, digits: int = RECORD_DIGITS) -> str:
    value = to_plain(value)
    if isinstance(value, bool) or value is None:
        return json.dumps(value)
    if isinstance(value, float):
        return format_float(value, digits)
    if isinstance(value, (int, str)):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, Mapping):
        items = (f"{json.dumps(k, ensure_ascii=False)}: {dumps_record(v, digits)}" for k, v in sorted(value.items()))
        return "{" + ", ".join(items) + "}"
    if isinstance(value, Sequence):
        return "[" + ", ".join(dumps_record(x, digits) for x in value) + "]"
    raise TypeError(f"cannot serialise {type(value).__name__}")


def _table_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value, TABLE_DIGITS).strip('"')
    return str(value)


def _flatten(record: Mapping[str, Any]) -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in record.items():
        if isinstance(value, list):
            for index, item in enumerate(value):
                flat[f"{key}[{index}]"] = item
        else:
            flat[key] = value
    return flat


def render_table(records: Sequence[Mapping[str, Any]]) -> str:
    """One tab-separated block per record kind, in first-seen order."""
    lines = [f"# schema_version={SCHEMA_VERSION}"]
    groups: dict[str, list[dict[str, Any]]] = {}
    for record in records:
        plain = to_plain(record)
        groups.setdefault(str(plain.get("kind", "record")), []).append(_flatten(plain))
    for kind, rows in groups.items():
        columns: list[str] = []
        for row in rows:
            columns.extend(c for c in row if c not in columns)
        lines.append(f"# kind={kind}")
        lines.append("\t".join(columns))
        lines.extend("\t".join(_table_cell(row.get(c)) for c in columns) for row in rows)
    return "\n".join(lines) + "\n"


def write_records(records: Sequence[Mapping[str, Any]], path: Path, output_format: OutputFormat = "records") -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    stamped = [{**record, "schema_version": SCHEMA_VERSION} for record in records]
    if output_format == "table":
        path.write_text(render_table(stamped), encoding="utf-8")
    else:
        path.write_text("".join(dumps_record(r) + "\n" for r in stamped), encoding="utf-8")
    return path


class RunManifest(BaseModel):
    schema_version: int = SCHEMA_VERSION
    tool: str = "lie-spray"
    version: str = __version__
    command: str
    config: dict[str, Any] | None = None  # resolved config, or None when it could not be parsed
    seed: int | None = None
    status: Literal["ok", "checks_failed", "config_error", "error"]
    exit_code: int
    checks: dict[str, bool] = Field(default_factory=dict)
    error: dict[str, Any] | None = None
    outputs: list[str] = Field(default_factory=list)
    wall_time_s: float = 0.0


def write_manifest(manifest: RunManifest, out_dir: Path) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "manifest.json"
    path.write_text(dumps_record(manifest.model_dump()) + "\n", encoding="utf-8")
    return path
