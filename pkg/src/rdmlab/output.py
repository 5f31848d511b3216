"""Structured CSV/JSON emission for the experiment driver.

CSV files carry `#`-prefixed metadata lines followed by a header row and data
rows; floats are printed with 17 significant digits so they round-trip
exactly.  JSON reports carry a `schema_version` and the same metadata.  The
data sections are pure functions of (config, seed), so re-running a command
reproduces them byte for byte; volatile fields (wall clock) stay in the
metadata, never in the data.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, Mapping, Sequence

SCHEMA_VERSION = 1


def format_value(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def csv_text(metadata: Mapping[str, object], header: Sequence[str],
             rows: Iterable[Sequence[object]]) -> str:
    lines = [f"# {key} = {format_value(value)}" for key, value in metadata.items()]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_value(cell) for cell in row))
    return "\n".join(lines) + "\n"


def write_csv(path: str | Path, metadata: Mapping[str, object], header: Sequence[str],
              rows: Iterable[Sequence[object]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(csv_text(metadata, header, rows))
    return path


def table_payload(header: Sequence[str], rows: Iterable[Sequence[object]]) -> dict:
    return {"header": list(header), "rows": [list(row) for row in rows]}


def write_json(path: str | Path, metadata: Mapping[str, object], results: dict) -> Path:
    payload = {"schema_version": SCHEMA_VERSION, **metadata, "results": results}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path
