"""Deterministic artifact I/O: CSV/JSON tables, config loading, manifests.

Every emitter renders floats with 17 significant digits (exact double
round-trip), fixes column and key order, and writes newline-terminated
UTF-8, so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass

__all__ = [
    "fmt_float",
    "Table",
    "emit",
    "load_config",
    "ConfigError",
    "write_manifest",
]


def fmt_float(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


@dataclass(frozen=True)
class Table:
    columns: tuple[str, ...]
    rows: tuple[tuple, ...]

    @staticmethod
    def of(columns, rows) -> "Table":
        return Table(tuple(columns), tuple(tuple(r) for r in rows))


def _table_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([fmt_float(x) for x in row])
    return buf.getvalue()


def _table_json(table: Table) -> str:
    payload = {
        "columns": list(table.columns),
        "rows": [[x if not isinstance(x, float) else float(fmt_float(x)) for x in row]
                 for row in table.rows],
    }
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def emit(table: Table, fmt: str, path) -> None:
    """Write a table as csv or json with deterministic bytes."""
    if fmt == "csv":
        text = _table_csv(table)
    elif fmt == "json":
        text = _table_json(table)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(text)


class ConfigError(ValueError):
    pass


def load_config(path, schema: dict) -> dict:
    """Strict JSON config: required keys present, unknown keys rejected.

    schema maps field name -> (required: bool, type or tuple of types,
    default).  Returns the validated dict with defaults applied.
    """
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        raw = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"unknown config key: {unknown[0]}")
    out = {}
    for name in schema:
        required, types, default = schema[name]
        if name not in raw:
            if required:
                raise ConfigError(f"missing required config field: {name}")
            out[name] = default
            continue
        val = raw[name]
        if types is float and isinstance(val, int):
            val = float(val)
        if not isinstance(val, types):
            raise ConfigError(f"config field {name} has wrong type")
        out[name] = val
    return out


def save_config(path, config: dict) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(json.dumps(config, indent=1, sort_keys=True) + "\n")


def write_manifest(out_dir, command: str, inputs: dict, constants: dict,
                   data_versions: dict | None = None) -> None:
    """Provenance record for one run; deliberately timestamp-free."""
    payload = {
        "command": command,
        "inputs": inputs,
        "constants": constants,
        "data_versions": data_versions or {"pulse_tables": 1, "bases": 1},
    }
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(json.dumps(payload, indent=1, sort_keys=True, default=fmt_float) + "\n")
