"""CSV / JSON emission of flat or one-level-nested dataclass records.

Nested dataclass fields are flattened with their field name as prefix
(``box.P`` becomes ``box_P``).  Floats holding an exact integer are written
without a fractional part, all other floats with 17 significant digits, so
every double survives a round trip.  Output bytes depend only on the records.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import typing
from typing import Any, Iterable

import numpy as np


def flatten(record: Any) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for f in dataclasses.fields(record):
        v = getattr(record, f.name)
        if dataclasses.is_dataclass(v):
            for k, inner in flatten(v).items():
                out[f"{f.name}_{k}"] = inner
        else:
            out[f.name] = v
    return out


def columns(record_type: type) -> list[str]:
    """Flattened column names of a record type, nested dataclasses included."""
    hints = typing.get_type_hints(record_type)
    out = []
    for f in dataclasses.fields(record_type):
        t = hints[f.name]
        if dataclasses.is_dataclass(t):
            out.extend(f"{f.name}_{c}" for c in columns(t))
        else:
            out.append(f.name)
    return out


def _number(v: float) -> str:
    if math.isnan(v):
        return "NaN"
    if math.isinf(v):
        return "Infinity" if v > 0 else "-Infinity"
    if v == int(v) and abs(v) < 2**63:
        return str(int(v))
    return "%.17g" % v


def format_value(v: Any, for_json: bool) -> str:
    if isinstance(v, np.generic):
        v = v.item()
    if v is None:
        return "null" if for_json else ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return _number(v)
    return json.dumps(str(v)) if for_json else str(v)


def emit_records(records: Iterable[Any], fmt: str = "csv", record_type: type | None = None) -> bytes:
    """Serialize records; ``record_type`` supplies the CSV header when the list is empty."""
    rows = [flatten(r) for r in records]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        names = list(rows[0]) if rows else (columns(record_type) if record_type else [])
        writer.writerow(names)
        for row in rows:
            writer.writerow([format_value(row[k], False) for k in names])
        return buf.getvalue().encode()
    if fmt == "json":
        body = ",\n".join(
            "  {" + ", ".join(f"{json.dumps(k)}: {format_value(v, True)}" for k, v in row.items()) + "}"
            for row in rows
        )
        return ("[\n" + body + "\n]\n" if rows else "[]\n").encode()
    raise ValueError(f"unknown output format {fmt!r}")


def _parse_cell(s: str) -> Any:
    if s == "":
        return None
    if s in ("true", "false"):
        return s == "true"
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


_COERCE = {"float": float, "int": int, "str": str, "bool": bool}


def parse_records(data: bytes, fmt: str = "csv", record_type: type | None = None) -> list:
    """Inverse of :func:`emit_records` for flat records.

    Without ``record_type`` a list of dicts is returned.
    """
    text = data.decode()
    if fmt == "csv":
        reader = csv.reader(io.StringIO(text))
        names = next(reader, [])
        rows = [dict(zip(names, (_parse_cell(c) for c in line))) for line in reader]
    elif fmt == "json":
        rows = json.loads(text)
    else:
        raise ValueError(f"unknown output format {fmt!r}")
    if record_type is None:
        return rows
    out = []
    for row in rows:
        kwargs = {}
        for f in dataclasses.fields(record_type):
            v = row[f.name]
            conv = _COERCE.get(f.type if isinstance(f.type, str) else getattr(f.type, "__name__", ""))
            kwargs[f.name] = conv(v) if conv is not None and v is not None else v
        out.append(record_type(**kwargs))
    return out
