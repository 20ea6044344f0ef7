"""Plot-ready data files: CSV with a ``#`` metadata header, or the same content as JSON.

CSV layout::

    # dickelab <command>
    # key = <json value>            (one line per metadata entry, sorted)
    # summary.key = <json value>    (optional result summary, sorted)
    col_a,col_b,...
    1.0,2.5,...

Floats are written with ``repr`` so parsing and re-emitting is byte-identical.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

MAGIC = "# dickelab "


@dataclass
class DataFile:
    command: str
    metadata: dict[str, Any]
    columns: list[str]
    rows: list[list[Any]]
    summary: dict[str, Any] = field(default_factory=dict)

    def column(self, name: str) -> list[Any]:
        k = self.columns.index(name)
        return [r[k] for r in self.rows]

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(f"{MAGIC}{self.command}\n")
        for key in sorted(self.metadata):
            out.write(f"# {key} = {_dump(self.metadata[key])}\n")
        for key in sorted(self.summary):
            out.write(f"# summary.{key} = {_dump(self.summary[key])}\n")
        out.write(",".join(self.columns) + "\n")
        for row in self.rows:
            if len(row) != len(self.columns):
                raise ValueError(f"row {row} does not match columns {self.columns}")
            out.write(",".join(_cell(v) for v in row) + "\n")
        return out.getvalue()

    def to_json(self) -> str:
        doc = {
            "command": self.command,
            "metadata": self.metadata,
            "summary": self.summary,
            "columns": self.columns,
            "rows": self.rows,
        }
        return json.dumps(_plain(doc), indent=1, sort_keys=True) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "json":
            return self.to_json()
        raise ValueError(f"unknown format {fmt!r}")

    def write(self, path: str | Path, fmt: str = "csv") -> None:
        Path(path).write_text(self.render(fmt))


def _plain(obj):
    """Convert numpy scalars, tuples and enums into JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "item") and callable(obj.item):
        return obj.item()
    if hasattr(obj, "value") and not isinstance(obj, (int, float, str, bool)):
        return obj.value
    return obj


def _dump(value) -> str:
    return json.dumps(_plain(value), sort_keys=True)


def _cell(value) -> str:
    value = _plain(value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    text = str(value)
    if "," in text or "\n" in text:
        raise ValueError(f"cell {text!r} would break the CSV layout")
    return text


def _parse_cell(text: str):
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def parse_csv(text: str) -> DataFile:
    lines = text.splitlines()
    if not lines or not lines[0].startswith(MAGIC):
        raise ValueError("not a dickelab data file (missing header line)")
    command = lines[0][len(MAGIC) :]
    metadata: dict[str, Any] = {}
    summary: dict[str, Any] = {}
    i = 1
    while i < len(lines) and lines[i].startswith("# "):
        key, sep, raw = lines[i][2:].partition(" = ")
        if not sep:
            raise ValueError(f"malformed metadata line: {lines[i]!r}")
        target = summary if key.startswith("summary.") else metadata
        target[key.removeprefix("summary.")] = json.loads(raw)
        i += 1
    if i >= len(lines):
        raise ValueError("missing column header")
    columns = lines[i].split(",")
    rows = [[_parse_cell(c) for c in line.split(",")] for line in lines[i + 1 :] if line]
    return DataFile(command, metadata, columns, rows, summary)


def parse_json(text: str) -> DataFile:
    doc = json.loads(text)
    return DataFile(doc["command"], doc["metadata"], doc["columns"], doc["rows"], doc.get("summary", {}))


def parse(text: str) -> DataFile:
    return parse_json(text) if text.lstrip().startswith("{") else parse_csv(text)


def read(path: str | Path) -> DataFile:
    return parse(Path(path).read_text())
