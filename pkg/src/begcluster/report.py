"""CSV / JSON report writer shared by the CLI subcommands."""

from __future__ import annotations

import csv
import io
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping, Sequence, TextIO

from . import __version__
from .errors import BegError


class EmptyReportError(BegError):
    """Rows were empty and the caller did not flag an empty result as expected."""


def encode_value(v: Any) -> Any:
    """JSON/CSV-safe value: non-integral rationals become "p/q" strings, containers are walked."""
    if isinstance(v, Fraction):
        return str(v) if v.denominator != 1 else v.numerator
    if isinstance(v, Mapping):
        return {str(k): encode_value(x) for k, x in v.items()}
    if isinstance(v, bool) or v is None or isinstance(v, (int, float, str)):
        return v
    if isinstance(v, (tuple, list)):
        return [encode_value(x) for x in v]
    return str(v)


def normalise_rows(rows: Sequence[Mapping[str, Any]]) -> list[dict[str, Any]]:
    return [{k: encode_value(v) for k, v in row.items()} for row in rows]


def build_meta(command: str, parameters: Mapping[str, Any], seed: int | None) -> dict[str, Any]:
    return {
        "version": __version__,
        "command": command,
        "seed": seed,
        "parameters": {k: encode_value(v) for k, v in parameters.items()},
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def render(rows: Sequence[Mapping[str, Any]], meta: Mapping[str, Any], fmt: str, allow_empty: bool = False) -> str:
    if not rows and not allow_empty:
        raise EmptyReportError("no rows to report")
    data = normalise_rows(rows)
    if fmt == "json":
        return json.dumps({"meta": dict(meta), "rows": data}, indent=2) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        fields = list(data[0]) if data else []
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\r\n")
        writer.writeheader()
        writer.writerows(data)
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def emit_report(
    rows: Sequence[Mapping[str, Any]],
    meta: Mapping[str, Any],
    fmt: str = "json",
    sink: str | Path | TextIO | None = None,
    allow_empty: bool = False,
) -> None:
    """Write ``rows`` as CSV (header + rows) or JSON ({"meta", "rows"}) to a path or stream."""
    text = render(rows, meta, fmt, allow_empty=allow_empty)
    if sink is None:
        sys.stdout.write(text)
    elif isinstance(sink, (str, Path)):
        with open(sink, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sink.write(text)
